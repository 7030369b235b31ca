#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "gcsim/model.hpp"

namespace gcsim {

enum class CallType { NewCall, HandoffCall };

/// Outcome of an admission attempt. AdmittedGuard can only happen to a
/// handoff call; AdmittedBorrowed only to a new call under DGCA-CBS.
enum class AdmitDecision { AdmittedShared, AdmittedGuard, AdmittedBorrowed, Blocked };

std::string_view to_string(CallType call);
std::string_view to_string(AdmitDecision decision);
std::optional<AdmitDecision> admit_decision_from_string(std::string_view name);

constexpr bool is_admitted(AdmitDecision d) { return d != AdmitDecision::Blocked; }

/// Per-cell occupancy counters. Channels are counts against thresholds, not
/// labeled objects: new calls are admitted below capacity - guard_count (and,
/// when borrowing, below capacity - borrow_reserve), handoffs below capacity.
/// busy may sit above capacity - guard_count after the guard grows; admissions
/// always respect the thresholds in force at decision time.
struct CellChannelState {
    int capacity = 0;      // S
    int guard_count = 0;   // S_R
    int busy = 0;
    int borrowed_busy = 0; // busy channels held by new calls admitted via borrowing

    int shared_limit() const { return capacity - guard_count; }

    bool operator==(const CellChannelState&) const = default;
};

struct AdmitOutcome {
    AdmitDecision decision = AdmitDecision::Blocked;
    CellChannelState state;
};

/// Admission rule for every scheme, as a pure transition on the cell state.
///   FCA:                  any call admitted iff busy < capacity.
///   StaticGC / DynamicGC: handoff iff busy < capacity,
///                         new call iff busy < capacity - guard_count.
///   DGCA-CBS:             as above, plus a new call that misses the shared
///                         pool borrows an idle guard channel while
///                         busy < capacity - borrow_reserve.
/// Blocked is a value, not an error; the state is returned unchanged.
AdmitOutcome admit(SchemeKind scheme, const CellChannelState& state, CallType call,
                   const PolicyParams& params);

/// Frees one channel. Throws LogicError on an empty cell or when was_borrowed
/// names a borrowed channel the cell does not hold.
CellChannelState release(CellChannelState state, bool was_borrowed);

/// Per-window counters driving the dynamic guard controller.
struct WindowStats {
    std::int64_t handoff_attempts = 0;
    std::int64_t handoff_blocks = 0;
    std::int64_t new_attempts = 0;
    std::int64_t new_blocks = 0;
    double guard_busy_integral = 0.0; // time integral of max(busy - (S - S_R), 0)
    double window_length = 0.0;

    bool operator==(const WindowStats&) const = default;
};

/// Fraction of guard channel-time actually used inside the window, in [0, 1].
/// By convention 1.0 when guard_count is 0 (no idle guard capacity exists).
double guard_utilization(const WindowStats& window, int guard_count);

/// Periodic guard-count update. With p_h the window's handoff blocking (0 when
/// the window saw no handoff attempts):
///   p_h above the target       -> grow by adjust_step, clamped to guard_max;
///   else utilization below the
///   floor                      -> shrink by adjust_step, clamped to guard_min;
///   else                       -> unchanged.
/// Growth takes precedence over shrinking. The caller resets the window stats
/// after each tick.
int adjust_guard(const WindowStats& window, const PolicyParams& params, int guard_count);

} // namespace gcsim
