#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <vector>

#include "gcsim/model.hpp"
#include "gcsim/policy.hpp"
#include "gcsim/rng.hpp"

namespace gcsim {

enum class EventKind { NewArrival, ExogenousHandoffArrival, OutboundHandoff, Completion, AdjustTick };

std::string_view to_string(EventKind kind);

/// Identity an admitted call carries through the system. The record travels
/// inside the call's single pending lifecycle event, so the engine keeps no
/// separate call registry.
struct CallRecord {
    std::uint64_t call_id = 0;
    CallType origin_type = CallType::NewCall; // how the call entered its current cell
    bool borrowed = false;                    // currently holding a borrowed guard channel
    double admitted_at = 0.0;
    int home_cell = 0;    // cell that admitted the call as a new call
    bool measured = false; // admitted inside the measurement window

    bool operator==(const CallRecord&) const = default;
};

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // tie-breaker, assigned by the queue at scheduling
    EventKind kind = EventKind::NewArrival;
    int cell = 0;
    CallRecord call; // meaningful for OutboundHandoff / Completion

    bool operator==(const Event&) const = default;
};

/// Future event list ordered by (time, seq). seq increases with every
/// schedule call, which removes floating-point-tie nondeterminism.
class EventQueue {
public:
    /// Queues the event, stamping its seq. Throws LogicError when the event
    /// lies before the current clock.
    void schedule(Event e);

    /// Removes and returns the (time, seq)-minimal event, advancing the
    /// clock. Empty queue means the simulation is over.
    std::optional<Event> advance();

    double now() const { return now_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
};

struct LifecyclePlan {
    bool handoff = false; // false: the call completes in place
    double delay = 0.0;
};

/// Draws the call's next milestone. Holding time T_d ~ Exp(service_rate); in
/// endogenous mode also dwell T_w ~ Exp(dwell_rate), and the call hands off
/// iff T_w < T_d. Memorylessness makes a full redraw at each handoff target
/// distributionally correct. Exogenous mode always completes in place.
LifecyclePlan plan_call_lifecycle(RngStream& stream, double service_rate, double dwell_rate,
                                  MobilityMode mode);

/// Uniform choice among the neighbors of from_cell.
/// Throws ConfigError when the cell is isolated.
int route_handoff(const Topology& topology, int from_cell, RngStream& stream);

/// Post-warmup tallies for one cell (attempt/block counts by stream plus the
/// occupancy time integrals behind carried load and guard metrics).
struct CellCounts {
    std::int64_t new_attempts = 0;
    std::int64_t new_blocks = 0;
    std::int64_t handoff_attempts = 0;
    std::int64_t handoff_blocks = 0;
    std::int64_t completions = 0;
    std::int64_t drops = 0;        // admitted calls lost to a blocked handoff
    std::int64_t admitted_new = 0;
    double busy_time = 0.0;        // integral of busy channels
    double guard_busy_time = 0.0;  // integral of max(busy - (S - S_R), 0)
    double guard_count_time = 0.0; // integral of S_R

    CellCounts& operator+=(const CellCounts& other);
    bool operator==(const CellCounts&) const = default;
};

/// One controller evaluation: the guard count in force after the tick plus
/// the window readings that produced it.
struct GuardAdjustment {
    double time = 0.0;
    int cell = 0;
    int guard_count = 0;
    std::int64_t window_handoff_attempts = 0;
    double window_handoff_blocking = 0.0;
    double window_guard_utilization = 0.0;

    bool operator==(const GuardAdjustment&) const = default;
};

struct ReplicationResult {
    int replication_index = 0;
    double measured_duration = 0.0; // sim_duration - warmup
    std::vector<CellCounts> cells;
    std::vector<GuardAdjustment> guard_trace;

    CellCounts totals() const;
    bool operator==(const ReplicationResult&) const = default;
};

/// Runs one replication to sim_duration and returns its post-warmup tallies.
/// The result is a pure function of (scenario, base_seed, replication_index).
/// When trace is non-null every processed event is written to it, one line
/// per event: time, seq, kind, cell, call id, decision (tab-separated).
ReplicationResult run_replication(const ValidatedScenario& scenario, int replication_index,
                                  std::ostream* trace = nullptr);

/// Runs all replications of the scenario, fanning out across up to
/// thread_cap workers (0 = hardware concurrency). Results are keyed by
/// replication index, so the output is identical for any thread count.
/// A trace sink, when given, captures replication 0 only.
std::vector<ReplicationResult> run_replications(const ValidatedScenario& scenario,
                                                int thread_cap = 0,
                                                std::ostream* trace_rep0 = nullptr);

} // namespace gcsim
