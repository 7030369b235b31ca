#include "gcsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>

#include "gcsim/errors.hpp"

namespace gcsim {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::NewArrival: return "NewArrival";
    case EventKind::ExogenousHandoffArrival: return "ExogenousHandoffArrival";
    case EventKind::OutboundHandoff: return "OutboundHandoff";
    case EventKind::Completion: return "Completion";
    case EventKind::AdjustTick: return "AdjustTick";
    }
    return "?";
}

void EventQueue::schedule(Event e) {
    if (e.time < now_)
        throw LogicError("schedule: event at t=" + std::to_string(e.time) +
                         " lies before the clock t=" + std::to_string(now_));
    e.seq = next_seq_++;
    heap_.push(std::move(e));
}

std::optional<Event> EventQueue::advance() {
    if (heap_.empty()) return std::nullopt;
    Event e = heap_.top();
    heap_.pop();
    now_ = e.time;
    return e;
}

LifecyclePlan plan_call_lifecycle(RngStream& stream, double service_rate, double dwell_rate,
                                  MobilityMode mode) {
    double holding = draw_exponential(stream, service_rate);
    if (mode == MobilityMode::Exogenous) return {false, holding};
    double dwell = draw_exponential(stream, dwell_rate);
    if (dwell < holding) return {true, dwell};
    return {false, holding};
}

int route_handoff(const Topology& topology, int from_cell, RngStream& stream) {
    std::vector<int> nb = neighbors(topology, from_cell);
    if (nb.empty())
        throw ConfigError("route_handoff: cell " + std::to_string(from_cell) +
                          " has no neighbor to hand off to");
    return nb[static_cast<std::size_t>(stream.uniform_below(nb.size()))];
}

CellCounts& CellCounts::operator+=(const CellCounts& other) {
    new_attempts += other.new_attempts;
    new_blocks += other.new_blocks;
    handoff_attempts += other.handoff_attempts;
    handoff_blocks += other.handoff_blocks;
    completions += other.completions;
    drops += other.drops;
    admitted_new += other.admitted_new;
    busy_time += other.busy_time;
    guard_busy_time += other.guard_busy_time;
    guard_count_time += other.guard_count_time;
    return *this;
}

CellCounts ReplicationResult::totals() const {
    CellCounts sum;
    for (const CellCounts& c : cells) sum += c;
    return sum;
}

namespace {

struct Cell {
    CellChannelState channels;
    WindowStats window;
    CellCounts counts;
    double result_last = 0.0; // last accrual point of the post-warmup integrals
    double window_last = 0.0; // last accrual point of the window guard integral
    int live_calls = 0;
};

// Single replication worth of engine state; everything is exclusively owned.
class Replication {
public:
    Replication(const ValidatedScenario& validated, int replication_index, std::ostream* trace)
        : sc_(validated.value()),
          rep_(replication_index),
          trace_(trace),
          end_(sc_.sim_duration),
          warmup_(sc_.warmup),
          service_rate_(sc_.traffic.service_rate()),
          dwell_rate_(sc_.traffic.dwell_rate()),
          endogenous_(sc_.traffic.mobility_mode == MobilityMode::Endogenous),
          has_controller_(sc_.scheme == SchemeKind::DynamicGc ||
                          sc_.scheme == SchemeKind::DgcaCbs) {
        const int n = sc_.topology.cell_count;
        cells_.resize(static_cast<std::size_t>(n));
        for (Cell& c : cells_) {
            c.channels = {sc_.policy.total_channels, sc_.policy.initial_guard, 0, 0};
            c.window.window_length = sc_.policy.adjust_period;
        }
        auto seed = sc_.base_seed;
        auto rep = static_cast<std::uint64_t>(rep_);
        for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(n); ++c) {
            arrivals_.emplace_back(seed, rep, StreamLabel::NewArrivals, c);
            exo_arrivals_.emplace_back(seed, rep, StreamLabel::HandoffArrivals, c);
            lifecycles_.emplace_back(seed, rep, StreamLabel::Lifecycle, c);
            routes_.emplace_back(seed, rep, StreamLabel::Routing, c);
        }
    }

    ReplicationResult run() {
        schedule_initial_events();
        while (auto next = queue_.advance()) {
            const Event ev = *next;
            if (ev.time > end_) break;
            switch (ev.kind) {
            case EventKind::NewArrival: on_new_arrival(ev); break;
            case EventKind::ExogenousHandoffArrival: on_exogenous_handoff(ev); break;
            case EventKind::OutboundHandoff: on_outbound_handoff(ev); break;
            case EventKind::Completion: on_completion(ev); break;
            case EventKind::AdjustTick: on_adjust_tick(ev); break;
            }
        }
        finalize();

        ReplicationResult result;
        result.replication_index = rep_;
        result.measured_duration = end_ - warmup_;
        result.cells.reserve(cells_.size());
        for (const Cell& c : cells_) result.cells.push_back(c.counts);
        result.guard_trace = std::move(guard_trace_);
        return result;
    }

private:
    // Closes the post-warmup integrals up to `now`. Called only when busy or
    // the guard count is about to change (and once at the horizon), so runs
    // with identical admission histories accrue in identical steps.
    void accrue_result(Cell& c, double now) {
        double lo = std::max(c.result_last, warmup_);
        double hi = std::min(now, end_);
        if (hi > lo) {
            double span = hi - lo;
            c.counts.busy_time += static_cast<double>(c.channels.busy) * span;
            c.counts.guard_busy_time += static_cast<double>(guard_excess(c)) * span;
            c.counts.guard_count_time += static_cast<double>(c.channels.guard_count) * span;
        }
        c.result_last = now;
    }

    void accrue_window(Cell& c, double now) {
        if (now > c.window_last)
            c.window.guard_busy_integral +=
                static_cast<double>(guard_excess(c)) * (now - c.window_last);
        c.window_last = now;
    }

    int guard_excess(const Cell& c) const {
        return std::max(c.channels.busy - c.channels.shared_limit(), 0);
    }

    // Both integrals, ahead of a busy-count change.
    void touch(Cell& c, double now) {
        accrue_result(c, now);
        accrue_window(c, now);
    }

    void schedule_initial_events() {
        const double new_rate = sc_.traffic.new_call_rate;
        const double exo_rate = sc_.traffic.exogenous_handoff_rate;
        for (int c = 0; c < cell_count(); ++c) {
            if (new_rate > 0)
                queue_.schedule({draw_exponential(arrivals_[c], new_rate), 0,
                                 EventKind::NewArrival, c, {}});
            if (!endogenous_ && exo_rate > 0)
                queue_.schedule({draw_exponential(exo_arrivals_[c], exo_rate), 0,
                                 EventKind::ExogenousHandoffArrival, c, {}});
            if (has_controller_)
                queue_.schedule({sc_.policy.adjust_period, 0, EventKind::AdjustTick, c, {}});
        }
    }

    void on_new_arrival(const Event& ev) {
        const int c = ev.cell;
        Cell& cell = cells_[c];
        // The arrival stream renews itself regardless of the admission
        // outcome, so it stays identical across schemes under a shared seed.
        queue_.schedule({ev.time + draw_exponential(arrivals_[c], sc_.traffic.new_call_rate), 0,
                         EventKind::NewArrival, c, {}});

        const bool measured = ev.time >= warmup_;
        ++cell.window.new_attempts;
        if (measured) ++cell.counts.new_attempts;

        AdmitOutcome out = admit(sc_.scheme, cell.channels, CallType::NewCall, sc_.policy);
        if (!is_admitted(out.decision)) {
            ++cell.window.new_blocks;
            if (measured) ++cell.counts.new_blocks;
            trace_line(ev.time, ev.seq, EventKind::NewArrival, c, 0, to_string(out.decision));
            return;
        }
        touch(cell, ev.time);
        cell.channels = out.state;
        ++cell.live_calls;
        if (measured) ++cell.counts.admitted_new;

        CallRecord rec{next_call_id_++, CallType::NewCall,
                       out.decision == AdmitDecision::AdmittedBorrowed, ev.time, c, measured};
        schedule_lifecycle(c, rec, ev.time);
        trace_line(ev.time, ev.seq, EventKind::NewArrival, c, rec.call_id, to_string(out.decision));
    }

    void on_exogenous_handoff(const Event& ev) {
        const int c = ev.cell;
        Cell& cell = cells_[c];
        queue_.schedule({ev.time + draw_exponential(exo_arrivals_[c],
                                                    sc_.traffic.exogenous_handoff_rate),
                         0, EventKind::ExogenousHandoffArrival, c, {}});

        const bool measured = ev.time >= warmup_;
        ++cell.window.handoff_attempts;
        if (measured) ++cell.counts.handoff_attempts;

        AdmitOutcome out = admit(sc_.scheme, cell.channels, CallType::HandoffCall, sc_.policy);
        if (!is_admitted(out.decision)) {
            ++cell.window.handoff_blocks;
            if (measured) ++cell.counts.handoff_blocks;
            trace_line(ev.time, ev.seq, EventKind::ExogenousHandoffArrival, c, 0,
                       to_string(out.decision));
            return;
        }
        touch(cell, ev.time);
        cell.channels = out.state;
        ++cell.live_calls;

        CallRecord rec{next_call_id_++, CallType::HandoffCall, false, ev.time, c, measured};
        schedule_lifecycle(c, rec, ev.time);
        trace_line(ev.time, ev.seq, EventKind::ExogenousHandoffArrival, c, rec.call_id,
                   to_string(out.decision));
    }

    void on_outbound_handoff(const Event& ev) {
        const int src = ev.cell;
        Cell& source = cells_[src];
        // The channel frees as the call leaves, before the target admits it.
        touch(source, ev.time);
        source.channels = release(source.channels, ev.call.borrowed);
        --source.live_calls;

        const int dst = route_handoff(sc_.topology, src, routes_[src]);
        Cell& target = cells_[dst];
        const bool measured = ev.time >= warmup_;
        ++target.window.handoff_attempts;
        if (measured) ++target.counts.handoff_attempts;

        AdmitOutcome out = admit(sc_.scheme, target.channels, CallType::HandoffCall, sc_.policy);
        if (!is_admitted(out.decision)) {
            // Forced termination: the call is gone; the drop is charged to
            // the cell that admitted it, and only for calls whose admission
            // was itself measured.
            ++target.window.handoff_blocks;
            if (measured) {
                ++target.counts.handoff_blocks;
                if (ev.call.measured) ++cells_[ev.call.home_cell].counts.drops;
            }
            trace_line(ev.time, ev.seq, EventKind::OutboundHandoff, dst, ev.call.call_id,
                       to_string(out.decision));
            return;
        }
        touch(target, ev.time);
        target.channels = out.state;
        ++target.live_calls;

        CallRecord rec = ev.call;
        rec.origin_type = CallType::HandoffCall;
        rec.borrowed = false;
        rec.admitted_at = ev.time;
        schedule_lifecycle(dst, rec, ev.time);
        trace_line(ev.time, ev.seq, EventKind::OutboundHandoff, dst, rec.call_id,
                   to_string(out.decision));
    }

    void on_completion(const Event& ev) {
        const int c = ev.cell;
        Cell& cell = cells_[c];
        touch(cell, ev.time);
        cell.channels = release(cell.channels, ev.call.borrowed);
        --cell.live_calls;
        if (ev.time >= warmup_) ++cell.counts.completions;
        trace_line(ev.time, ev.seq, EventKind::Completion, c, ev.call.call_id, "-");
    }

    void on_adjust_tick(const Event& ev) {
        const int c = ev.cell;
        Cell& cell = cells_[c];
        accrue_window(cell, ev.time);

        const int old_guard = cell.channels.guard_count;
        const int new_guard = adjust_guard(cell.window, sc_.policy, old_guard);
        const double window_blocking =
            cell.window.handoff_attempts > 0
                ? static_cast<double>(cell.window.handoff_blocks) /
                      static_cast<double>(cell.window.handoff_attempts)
                : 0.0;
        const double utilization = guard_utilization(cell.window, old_guard);
        if (new_guard != old_guard) {
            accrue_result(cell, ev.time);
            cell.channels.guard_count = new_guard;
            // No call is dropped when the guard shrinks below the current
            // guard occupancy; the counts converge as calls depart.
        }
        guard_trace_.push_back(
            {ev.time, c, new_guard, cell.window.handoff_attempts, window_blocking, utilization});

        cell.window = WindowStats{};
        cell.window.window_length = sc_.policy.adjust_period;
        cell.window_last = ev.time;
        queue_.schedule({ev.time + sc_.policy.adjust_period, 0, EventKind::AdjustTick, c, {}});
        trace_line(ev.time, ev.seq, EventKind::AdjustTick, c, 0, std::to_string(new_guard));
    }

    void schedule_lifecycle(int cell, const CallRecord& rec, double now) {
        LifecyclePlan plan = plan_call_lifecycle(lifecycles_[cell], service_rate_, dwell_rate_,
                                                 sc_.traffic.mobility_mode);
        Event e;
        e.time = now + plan.delay;
        e.kind = plan.handoff ? EventKind::OutboundHandoff : EventKind::Completion;
        e.cell = cell;
        e.call = rec;
        queue_.schedule(e);
    }

    void finalize() {
        for (int c = 0; c < cell_count(); ++c) {
            Cell& cell = cells_[c];
            accrue_result(cell, end_);
            if (cell.channels.busy != cell.live_calls)
                throw LogicError("replication " + std::to_string(rep_) + ": cell " +
                                 std::to_string(c) + " ends with busy=" +
                                 std::to_string(cell.channels.busy) + " but " +
                                 std::to_string(cell.live_calls) + " live calls");
        }
    }

    void trace_line(double time, std::uint64_t seq, EventKind kind, int cell, std::uint64_t call_id,
                    std::string_view decision) {
        if (!trace_) return;
        char buf[160];
        char id[24] = "-";
        if (call_id != 0) std::snprintf(id, sizeof id, "%" PRIu64, call_id);
        std::snprintf(buf, sizeof buf, "%.12g\t%" PRIu64 "\t%.*s\t%d\t%s\t%.*s\n", time, seq,
                      static_cast<int>(to_string(kind).size()), to_string(kind).data(), cell, id,
                      static_cast<int>(decision.size()), decision.data());
        *trace_ << buf;
    }

    int cell_count() const { return sc_.topology.cell_count; }

    const Scenario& sc_;
    int rep_;
    std::ostream* trace_;
    double end_;
    double warmup_;
    double service_rate_;
    double dwell_rate_;
    bool endogenous_;
    bool has_controller_;

    std::vector<Cell> cells_;
    std::vector<RngStream> arrivals_;
    std::vector<RngStream> exo_arrivals_;
    std::vector<RngStream> lifecycles_;
    std::vector<RngStream> routes_;
    std::vector<GuardAdjustment> guard_trace_;
    EventQueue queue_;
    std::uint64_t next_call_id_ = 1;
};

} // namespace

ReplicationResult run_replication(const ValidatedScenario& scenario, int replication_index,
                                  std::ostream* trace) {
    Replication rep(scenario, replication_index, trace);
    return rep.run();
}

std::vector<ReplicationResult> run_replications(const ValidatedScenario& scenario, int thread_cap,
                                                std::ostream* trace_rep0) {
    const int n = scenario.value().replications;
    std::vector<ReplicationResult> results(static_cast<std::size_t>(n));

    int first_pooled = 0;
    if (trace_rep0 != nullptr) {
        // The trace sink is not thread safe; capture replication 0 inline.
        results[0] = run_replication(scenario, 0, trace_rep0);
        first_pooled = 1;
    }
    if (first_pooled >= n) return results;

    unsigned hw = std::thread::hardware_concurrency();
    int workers = thread_cap > 0 ? thread_cap : static_cast<int>(hw > 0 ? hw : 1);
    workers = std::min(workers, n - first_pooled);

    if (workers <= 1) {
        for (int i = first_pooled; i < n; ++i) results[i] = run_replication(scenario, i);
        return results;
    }

    std::atomic<int> next{first_pooled};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    int failure_index = n;

    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = run_replication(scenario, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (i < failure_index) {
                    failure_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (failure) std::rethrow_exception(failure);
    return results;
}

} // namespace gcsim
