#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gcsim/engine.hpp"

namespace gcsim {

/// blocks / attempts, with 0/0 defined as 0.
/// Throws LogicError when blocks exceeds attempts or either count is negative.
double blocking_probability(std::int64_t blocks, std::int64_t attempts);

/// Fraction of measured admitted new calls later lost to a blocked handoff.
double forced_termination_probability(const ReplicationResult& result);

enum class Metric { NewCallBlocking, HandoffBlocking, ForcedTermination, CarriedLoad, MeanGuardCount };

inline constexpr std::array<Metric, 5> kAllMetrics = {
    Metric::NewCallBlocking, Metric::HandoffBlocking, Metric::ForcedTermination,
    Metric::CarriedLoad, Metric::MeanGuardCount};

std::string_view metric_name(Metric metric);

/// System-wide value of one metric for a single replication.
double metric_value(const ReplicationResult& result, Metric metric);

/// mean over replications; std_error and ci95_half are NaN when only one
/// replication is available.
struct MetricSummary {
    double mean = 0.0;
    double std_error = 0.0;
    double ci95_half = 0.0;
    int replications = 0;
};

struct BlockingReport {
    MetricSummary new_call_blocking;
    MetricSummary handoff_blocking;
    MetricSummary forced_termination;
    MetricSummary carried_load;
    MetricSummary mean_guard_count;
    int replications = 0;

    const MetricSummary& by(Metric metric) const;
};

/// Folds independent replications into per-metric means, standard errors and
/// 95% Student-t confidence half-widths. The fold is keyed by replication
/// index, so input order never changes the output. Throws LogicError on an
/// empty input or on results with mismatched scenario shapes.
BlockingReport aggregate(const std::vector<ReplicationResult>& results);

/// Raw counts pooled across replications (associative; used by trace-level
/// checks and per-cell reporting, not by the replication-mean report above).
CellCounts pool_counts(const std::vector<ReplicationResult>& results);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
/// Table-backed for small df, interpolated in 1/df elsewhere.
double student_t_975(int dof);

} // namespace gcsim
