#pragma once

#include <vector>

namespace gcsim {

/// Birth-death chain for a single cell with two Poisson arrival streams and a
/// guard cutoff: both streams admitted below total_channels - guard_count,
/// handoffs alone up to total_channels. Death rate in state n is n * service_rate.
struct ChainSpec {
    int total_channels = 0;  // S
    int guard_count = 0;     // cutoff g: new calls admitted while n < S - g
    double new_call_rate = 0.0;
    double handoff_rate = 0.0;
    double service_rate = 0.0;
};

struct SteadyState {
    std::vector<double> probabilities; // p_0 .. p_S, normalized to 1
};

struct BlockingPair {
    double new_call = 0.0;
    double handoff = 0.0;
};

/// Erlang-B blocking of an M/M/S/S loss system at the given offered load,
/// via the stable recursion B_0 = 1, B_k = a B_{k-1} / (k + a B_{k-1}).
/// Throws DomainError on negative inputs.
double erlang_b(int channels, double offered_load);

/// Steady state of the guard-cutoff chain. Uses running renormalization of
/// the product form, so it stays finite up to S ~ 10^4 at any load.
/// Throws DomainError when the spec violates its invariants
/// (0 <= g <= S, rates >= 0, service_rate > 0, combined arrival rate > 0).
SteadyState cutoff_steady_state(const ChainSpec& spec);

/// (P_new, P_handoff) read off a normalized steady state:
/// P_handoff = p_S, P_new = sum of p_n for n >= S - g. P_new >= P_handoff.
BlockingPair blocking_probabilities(const SteadyState& state, const ChainSpec& spec);

/// Analytic companion to DGCA-CBS with a static guard count: borrowing moves
/// the new-call cutoff from S - S_R down to S - r, so the chain is the guard
/// cutoff solved at g = r. Requires 0 <= r <= S_R <= S.
BlockingPair predicted_cbs_blocking(int total_channels, int guard_count, int borrow_reserve,
                                    double new_call_rate, double handoff_rate,
                                    double service_rate);

} // namespace gcsim
