#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gcsim {

/// The four channel-allocation schemes under comparison.
enum class SchemeKind { Fca, StaticGc, DynamicGc, DgcaCbs };

inline constexpr std::array<SchemeKind, 4> kAllSchemes = {
    SchemeKind::Fca, SchemeKind::StaticGc, SchemeKind::DynamicGc, SchemeKind::DgcaCbs};

std::string_view to_string(SchemeKind scheme);
std::optional<SchemeKind> scheme_from_string(std::string_view name);

/// How handoff traffic enters a cell: generated by call movement across the
/// topology (endogenous), or fed as an independent Poisson stream so a run is
/// directly comparable to the single-cell analytic chain (exogenous).
enum class MobilityMode { Endogenous, Exogenous };

std::string_view to_string(MobilityMode mode);
std::optional<MobilityMode> mobility_from_string(std::string_view name);

/// Cell graph. Links are held as (low, high) pairs, sorted and de-duplicated,
/// so adjacency is symmetric by construction.
struct Topology {
    int cell_count = 0;
    std::vector<std::pair<int, int>> links;

    static Topology ring(int cells);
    static Topology fully_connected(int cells);

    /// Orders each pair low-first, sorts the list, and drops exact duplicates.
    /// Self-loops are kept so validation can report them.
    void normalize();

    bool operator==(const Topology&) const = default;
};

/// Ascending list of the cells adjacent to `cell`.
/// Throws IndexError when `cell` is outside [0, cell_count).
std::vector<int> neighbors(const Topology& topology, int cell);

struct TrafficParams {
    double new_call_rate = 0.0;          // per-cell Poisson arrival rate
    double exogenous_handoff_rate = 0.0; // per-cell handoff arrival rate, exogenous mode only
    double mean_call_duration = 0.0;     // mean unencumbered call length
    double mean_cell_dwell = 0.0;        // mean time before a call crosses a cell boundary
    MobilityMode mobility_mode = MobilityMode::Endogenous;

    double service_rate() const { return mean_call_duration > 0 ? 1.0 / mean_call_duration : 0.0; }
    double dwell_rate() const { return mean_cell_dwell > 0 ? 1.0 / mean_cell_dwell : 0.0; }

    bool operator==(const TrafficParams&) const = default;
};

struct PolicyParams {
    int total_channels = 0; // channels per cell
    int initial_guard = 0;  // guard channels at t = 0
    int guard_min = 0;
    int guard_max = 0;
    double adjust_period = 100.0;       // controller window length
    double handoff_block_target = 0.02; // handoff blocking the controller steers toward
    double guard_util_floor = 0.3;      // guard utilization below which the guard shrinks
    int adjust_step = 1;
    int borrow_reserve = 0; // guard channels a new call may never borrow into

    bool operator==(const PolicyParams&) const = default;
};

struct Scenario {
    Topology topology = Topology::ring(6);
    TrafficParams traffic;
    PolicyParams policy;
    SchemeKind scheme = SchemeKind::Fca;
    double sim_duration = 0.0;
    double warmup = 0.0;
    int replications = 1;
    std::uint64_t base_seed = 0;

    bool operator==(const Scenario&) const = default;
};

struct ValidationError {
    std::string field;
    std::string rule;

    bool operator==(const ValidationError&) const = default;
};

struct ValidationResult;

/// A scenario that passed validate_scenario. Only that function can mint one,
/// so downstream code may rely on every invariant without re-checking.
class ValidatedScenario {
public:
    const Scenario& value() const { return scenario_; }

private:
    explicit ValidatedScenario(Scenario s) : scenario_(std::move(s)) {}
    Scenario scenario_;

    friend ValidationResult validate_scenario(Scenario s);
};

struct ValidationResult {
    std::optional<ValidatedScenario> scenario; // engaged iff errors is empty
    std::vector<ValidationError> errors;

    bool ok() const { return errors.empty(); }
};

/// Checks every scenario invariant and reports all violations, each naming the
/// offending field and the rule it breaks. Never stops at the first failure.
ValidationResult validate_scenario(Scenario s);

/// Re-validating an already validated scenario is the identity.
inline ValidatedScenario validate_scenario(ValidatedScenario s) { return s; }

struct ScenarioParse {
    std::optional<Scenario> scenario;
    std::vector<ValidationError> errors;

    bool ok() const { return errors.empty(); }
};

/// Builds a Scenario from a JSON document. Field names match the struct
/// members verbatim; unknown fields are reported as errors. Structural errors
/// (bad JSON, wrong types, missing required fields) surface here; invariants
/// are checked separately by validate_scenario.
ScenarioParse scenario_from_json(const std::string& text);

/// Normalized echo of a scenario: fixed key order, defaults materialized.
/// Feeding the output back through scenario_from_json reproduces the input.
std::string scenario_to_json(const Scenario& s);

/// Reads a whole file into memory. Throws IoError when the file cannot be read.
std::string read_text_file(const std::string& path);

} // namespace gcsim
