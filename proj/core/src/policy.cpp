#include "gcsim/policy.hpp"

#include <algorithm>

#include "gcsim/errors.hpp"

namespace gcsim {

std::string_view to_string(CallType call) {
    return call == CallType::NewCall ? "NewCall" : "HandoffCall";
}

std::string_view to_string(AdmitDecision decision) {
    switch (decision) {
    case AdmitDecision::AdmittedShared: return "AdmittedShared";
    case AdmitDecision::AdmittedGuard: return "AdmittedGuard";
    case AdmitDecision::AdmittedBorrowed: return "AdmittedBorrowed";
    case AdmitDecision::Blocked: return "Blocked";
    }
    return "?";
}

std::optional<AdmitDecision> admit_decision_from_string(std::string_view name) {
    for (AdmitDecision d : {AdmitDecision::AdmittedShared, AdmitDecision::AdmittedGuard,
                            AdmitDecision::AdmittedBorrowed, AdmitDecision::Blocked})
        if (name == to_string(d)) return d;
    return std::nullopt;
}

AdmitOutcome admit(SchemeKind scheme, const CellChannelState& state, CallType call,
                   const PolicyParams& params) {
    const int capacity = state.capacity;
    const int shared = state.shared_limit();

    AdmitDecision decision = AdmitDecision::Blocked;
    switch (scheme) {
    case SchemeKind::Fca:
        // No guard semantics: every call competes for the whole pool.
        if (state.busy < capacity) decision = AdmitDecision::AdmittedShared;
        break;

    case SchemeKind::StaticGc:
    case SchemeKind::DynamicGc:
        if (call == CallType::HandoffCall) {
            if (state.busy < capacity)
                decision = state.busy < shared ? AdmitDecision::AdmittedShared
                                               : AdmitDecision::AdmittedGuard;
        } else if (state.busy < shared) {
            decision = AdmitDecision::AdmittedShared;
        }
        break;

    case SchemeKind::DgcaCbs:
        if (call == CallType::HandoffCall) {
            if (state.busy < capacity)
                decision = state.busy < shared ? AdmitDecision::AdmittedShared
                                               : AdmitDecision::AdmittedGuard;
        } else if (state.busy < shared) {
            decision = AdmitDecision::AdmittedShared;
        } else if (state.busy < capacity - params.borrow_reserve) {
            // Shared pool full but idle guard channels remain above the
            // reserve floor: the new call borrows one.
            decision = AdmitDecision::AdmittedBorrowed;
        }
        break;
    }

    AdmitOutcome out{decision, state};
    if (is_admitted(decision)) {
        ++out.state.busy;
        if (decision == AdmitDecision::AdmittedBorrowed) ++out.state.borrowed_busy;
    }
    return out;
}

CellChannelState release(CellChannelState state, bool was_borrowed) {
    if (state.busy < 1) throw LogicError("release: cell has no busy channel");
    if (was_borrowed && state.borrowed_busy < 1)
        throw LogicError("release: no borrowed channel to release");
    --state.busy;
    if (was_borrowed) --state.borrowed_busy;
    return state;
}

double guard_utilization(const WindowStats& window, int guard_count) {
    if (!(window.window_length > 0))
        throw DomainError("guard_utilization: window_length must be positive");
    if (guard_count <= 0) return 1.0;
    double u = window.guard_busy_integral / (static_cast<double>(guard_count) * window.window_length);
    return std::clamp(u, 0.0, 1.0);
}

int adjust_guard(const WindowStats& window, const PolicyParams& params, int guard_count) {
    double handoff_blocking =
        window.handoff_attempts > 0
            ? static_cast<double>(window.handoff_blocks) / static_cast<double>(window.handoff_attempts)
            : 0.0;
    if (handoff_blocking > params.handoff_block_target)
        return std::min(guard_count + params.adjust_step, params.guard_max);
    if (guard_utilization(window, guard_count) < params.guard_util_floor)
        return std::max(guard_count - params.adjust_step, params.guard_min);
    return guard_count;
}

} // namespace gcsim
