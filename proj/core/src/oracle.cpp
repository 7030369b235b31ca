#include "gcsim/oracle.hpp"

#include <cmath>

#include "gcsim/errors.hpp"

namespace gcsim {

double erlang_b(int channels, double offered_load) {
    if (channels < 0) throw DomainError("erlang_b: channels must be >= 0");
    if (!(offered_load >= 0) || !std::isfinite(offered_load))
        throw DomainError("erlang_b: offered load must be a finite value >= 0");
    double b = 1.0;
    for (int k = 1; k <= channels; ++k) b = offered_load * b / (k + offered_load * b);
    return b;
}

namespace {

void check_spec(const ChainSpec& spec) {
    if (spec.total_channels < 0) throw DomainError("chain: total_channels must be >= 0");
    if (spec.guard_count < 0 || spec.guard_count > spec.total_channels)
        throw DomainError("chain: guard_count must lie within [0, total_channels]");
    if (!(spec.new_call_rate >= 0) || !(spec.handoff_rate >= 0))
        throw DomainError("chain: arrival rates must be >= 0");
    if (!(spec.service_rate > 0)) throw DomainError("chain: service_rate must be positive");
    if (!(spec.new_call_rate + spec.handoff_rate > 0))
        throw DomainError("chain: combined arrival rate must be positive");
}

} // namespace

SteadyState cutoff_steady_state(const ChainSpec& spec) {
    check_spec(spec);
    const int states = spec.total_channels;
    const int shared = spec.total_channels - spec.guard_count;
    const double both = spec.new_call_rate + spec.handoff_rate;

    std::vector<double> p(static_cast<std::size_t>(states) + 1);
    p[0] = 1.0;
    for (int n = 1; n <= states; ++n) {
        double birth = (n - 1) < shared ? both : spec.handoff_rate;
        p[n] = p[n - 1] * birth / (static_cast<double>(n) * spec.service_rate);
        if (p[n] > 1e300) {
            // Renormalize the running prefix before the products overflow.
            double scale = p[n];
            for (int k = 0; k <= n; ++k) p[k] /= scale;
        }
    }

    long double sum = 0.0L;
    for (double v : p) sum += v;
    for (double& v : p) v = static_cast<double>(v / sum);
    return {std::move(p)};
}

BlockingPair blocking_probabilities(const SteadyState& state, const ChainSpec& spec) {
    const auto& p = state.probabilities;
    const int states = spec.total_channels;
    BlockingPair out;
    out.handoff = p[static_cast<std::size_t>(states)];
    long double blocked_new = 0.0L;
    for (int n = states - spec.guard_count; n <= states; ++n)
        blocked_new += p[static_cast<std::size_t>(n)];
    out.new_call = static_cast<double>(blocked_new);
    return out;
}

BlockingPair predicted_cbs_blocking(int total_channels, int guard_count, int borrow_reserve,
                                    double new_call_rate, double handoff_rate,
                                    double service_rate) {
    if (borrow_reserve < 0 || borrow_reserve > guard_count || guard_count > total_channels)
        throw DomainError("predicted_cbs_blocking: need 0 <= r <= S_R <= S");
    ChainSpec spec{total_channels, borrow_reserve, new_call_rate, handoff_rate, service_rate};
    return blocking_probabilities(cutoff_steady_state(spec), spec);
}

} // namespace gcsim
