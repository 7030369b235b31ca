#include "gcsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gcsim/errors.hpp"

namespace gcsim {

double blocking_probability(std::int64_t blocks, std::int64_t attempts) {
    if (blocks < 0 || attempts < 0 || blocks > attempts)
        throw LogicError("blocking_probability: blocks must lie within [0, attempts]");
    if (attempts == 0) return 0.0;
    return static_cast<double>(blocks) / static_cast<double>(attempts);
}

double forced_termination_probability(const ReplicationResult& result) {
    CellCounts t = result.totals();
    if (t.admitted_new == 0) return 0.0;
    return static_cast<double>(t.drops) / static_cast<double>(t.admitted_new);
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
    case Metric::NewCallBlocking: return "new_call_blocking";
    case Metric::HandoffBlocking: return "handoff_blocking";
    case Metric::ForcedTermination: return "forced_termination";
    case Metric::CarriedLoad: return "carried_load";
    case Metric::MeanGuardCount: return "mean_guard_count";
    }
    return "?";
}

double metric_value(const ReplicationResult& result, Metric metric) {
    CellCounts t = result.totals();
    switch (metric) {
    case Metric::NewCallBlocking: return blocking_probability(t.new_blocks, t.new_attempts);
    case Metric::HandoffBlocking: return blocking_probability(t.handoff_blocks, t.handoff_attempts);
    case Metric::ForcedTermination: return forced_termination_probability(result);
    case Metric::CarriedLoad:
        return result.measured_duration > 0 ? t.busy_time / result.measured_duration : 0.0;
    case Metric::MeanGuardCount:
        return result.measured_duration > 0 && !result.cells.empty()
                   ? t.guard_count_time /
                         (result.measured_duration * static_cast<double>(result.cells.size()))
                   : 0.0;
    }
    return 0.0;
}

const MetricSummary& BlockingReport::by(Metric metric) const {
    switch (metric) {
    case Metric::NewCallBlocking: return new_call_blocking;
    case Metric::HandoffBlocking: return handoff_blocking;
    case Metric::ForcedTermination: return forced_termination;
    case Metric::CarriedLoad: return carried_load;
    case Metric::MeanGuardCount: return mean_guard_count;
    }
    return new_call_blocking;
}

double student_t_975(int dof) {
    if (dof < 1) throw LogicError("student_t_975: degrees of freedom must be >= 1");
    struct Entry {
        int df;
        double t;
    };
    static constexpr Entry table[] = {
        {1, 12.706204736}, {2, 4.302652730},  {3, 3.182446305},  {4, 2.776445105},
        {5, 2.570581836},  {6, 2.446911851},  {7, 2.364624252},  {8, 2.306004135},
        {9, 2.262157163},  {10, 2.228138852}, {11, 2.200985160}, {12, 2.178812830},
        {13, 2.160368656}, {14, 2.144786688}, {15, 2.131449546}, {16, 2.119905299},
        {17, 2.109815578}, {18, 2.100922040}, {19, 2.093024054}, {20, 2.085963447},
        {21, 2.079613845}, {22, 2.073873068}, {23, 2.068657610}, {24, 2.063898562},
        {25, 2.059538553}, {26, 2.055529439}, {27, 2.051830516}, {28, 2.048407142},
        {29, 2.045229642}, {30, 2.042272456}, {40, 2.021075390}, {50, 2.008559112},
        {60, 2.000297822}, {80, 1.990063421}, {100, 1.983971519}, {120, 1.979930405},
    };
    constexpr double asymptote = 1.959963985;

    const Entry* prev = nullptr;
    for (const Entry& e : table) {
        if (e.df == dof) return e.t;
        if (e.df > dof) {
            // Interpolate linearly in 1/df between the bracketing entries.
            double x = 1.0 / dof, x0 = 1.0 / prev->df, x1 = 1.0 / e.df;
            return e.t + (prev->t - e.t) * (x - x1) / (x0 - x1);
        }
        prev = &e;
    }
    double x = 1.0 / dof, x1 = 1.0 / 120.0;
    return asymptote + (prev->t - asymptote) * x / x1;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.replications = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        s.std_error = std::numeric_limits<double>::quiet_NaN();
        s.ci95_half = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    double stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    s.std_error = stddev / std::sqrt(static_cast<double>(values.size()));
    s.ci95_half = student_t_975(s.replications - 1) * s.std_error;
    return s;
}

} // namespace

BlockingReport aggregate(const std::vector<ReplicationResult>& results) {
    if (results.empty()) throw LogicError("aggregate: need at least one replication");
    for (const ReplicationResult& r : results) {
        if (r.cells.size() != results.front().cells.size() ||
            r.measured_duration != results.front().measured_duration)
            throw LogicError("aggregate: replications come from different scenario shapes");
    }

    // Key the fold by replication index so list order cannot matter.
    std::vector<const ReplicationResult*> ordered;
    ordered.reserve(results.size());
    for (const ReplicationResult& r : results) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const ReplicationResult* a, const ReplicationResult* b) {
                  return a->replication_index < b->replication_index;
              });

    BlockingReport report;
    report.replications = static_cast<int>(results.size());
    for (Metric m : kAllMetrics) {
        std::vector<double> values;
        values.reserve(ordered.size());
        for (const ReplicationResult* r : ordered) values.push_back(metric_value(*r, m));
        MetricSummary s = summarize(values);
        switch (m) {
        case Metric::NewCallBlocking: report.new_call_blocking = s; break;
        case Metric::HandoffBlocking: report.handoff_blocking = s; break;
        case Metric::ForcedTermination: report.forced_termination = s; break;
        case Metric::CarriedLoad: report.carried_load = s; break;
        case Metric::MeanGuardCount: report.mean_guard_count = s; break;
        }
    }
    return report;
}

CellCounts pool_counts(const std::vector<ReplicationResult>& results) {
    CellCounts sum;
    for (const ReplicationResult& r : results) sum += r.totals();
    return sum;
}

} // namespace gcsim
