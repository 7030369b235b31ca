#include "gcsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gcsim/errors.hpp"

namespace gcsim {

std::string_view to_string(SchemeKind scheme) {
    switch (scheme) {
    case SchemeKind::Fca: return "FCA";
    case SchemeKind::StaticGc: return "StaticGC";
    case SchemeKind::DynamicGc: return "DynamicGC";
    case SchemeKind::DgcaCbs: return "DGCA_CBS";
    }
    return "?";
}

std::optional<SchemeKind> scheme_from_string(std::string_view name) {
    for (SchemeKind s : kAllSchemes)
        if (name == to_string(s)) return s;
    return std::nullopt;
}

std::string_view to_string(MobilityMode mode) {
    return mode == MobilityMode::Endogenous ? "endogenous" : "exogenous";
}

std::optional<MobilityMode> mobility_from_string(std::string_view name) {
    if (name == "endogenous") return MobilityMode::Endogenous;
    if (name == "exogenous") return MobilityMode::Exogenous;
    return std::nullopt;
}

Topology Topology::ring(int cells) {
    Topology t;
    t.cell_count = cells;
    if (cells == 2) {
        t.links.emplace_back(0, 1);
    } else if (cells >= 3) {
        for (int i = 0; i < cells; ++i) t.links.emplace_back(i, (i + 1) % cells);
    }
    t.normalize();
    return t;
}

Topology Topology::fully_connected(int cells) {
    Topology t;
    t.cell_count = cells;
    for (int i = 0; i < cells; ++i)
        for (int j = i + 1; j < cells; ++j) t.links.emplace_back(i, j);
    t.normalize();
    return t;
}

void Topology::normalize() {
    for (auto& [a, b] : links)
        if (a > b) std::swap(a, b);
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
}

std::vector<int> neighbors(const Topology& topology, int cell) {
    if (cell < 0 || cell >= topology.cell_count)
        throw IndexError("neighbors: cell index " + std::to_string(cell) + " outside [0, " +
                         std::to_string(topology.cell_count) + ")");
    std::vector<int> out;
    for (const auto& [a, b] : topology.links) {
        if (a == cell && b != cell) out.push_back(b);
        if (b == cell && a != cell) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void require(std::vector<ValidationError>& errors, bool ok, const char* field, const char* rule) {
    if (!ok) errors.push_back({field, rule});
}

} // namespace

ValidationResult validate_scenario(Scenario s) {
    std::vector<ValidationError> errors;

    const Topology& topo = s.topology;
    require(errors, topo.cell_count >= 1, "topology.cell_count", "must be a positive integer");
    bool links_sane = true;
    for (const auto& [a, b] : topo.links) {
        if (a == b) {
            errors.push_back({"topology.adjacency",
                              "self-loop on cell " + std::to_string(a) + " is not allowed"});
            links_sane = false;
        }
        if (a < 0 || b < 0 || a >= topo.cell_count || b >= topo.cell_count) {
            errors.push_back({"topology.adjacency", "link (" + std::to_string(a) + ", " +
                                                        std::to_string(b) +
                                                        ") refers to a cell index out of range"});
            links_sane = false;
        }
    }

    const TrafficParams& tr = s.traffic;
    require(errors, tr.new_call_rate >= 0 && std::isfinite(tr.new_call_rate),
            "traffic.new_call_rate", "must be a finite rate >= 0");
    require(errors, tr.exogenous_handoff_rate >= 0 && std::isfinite(tr.exogenous_handoff_rate),
            "traffic.exogenous_handoff_rate", "must be a finite rate >= 0");
    require(errors, tr.mean_call_duration > 0 && std::isfinite(tr.mean_call_duration),
            "traffic.mean_call_duration", "must be positive (the call service rate must be > 0)");
    if (tr.mobility_mode == MobilityMode::Endogenous) {
        require(errors, tr.mean_cell_dwell > 0 && std::isfinite(tr.mean_cell_dwell),
                "traffic.mean_cell_dwell",
                "endogenous mobility requires a positive dwell rate (mean_cell_dwell > 0)");
        if (topo.cell_count >= 1 && links_sane) {
            for (int c = 0; c < topo.cell_count; ++c) {
                if (neighbors(topo, c).empty()) {
                    errors.push_back({"topology.adjacency",
                                      "cell " + std::to_string(c) +
                                          " has no neighbor; every cell needs one when mobility "
                                          "is endogenous"});
                }
            }
        }
    } else {
        require(errors, tr.mean_cell_dwell >= 0, "traffic.mean_cell_dwell",
                "must be >= 0 (ignored in exogenous mode)");
    }

    const PolicyParams& p = s.policy;
    require(errors, p.total_channels >= 1, "policy.total_channels", "must be a positive integer");
    require(errors, p.guard_min >= 0, "policy.guard_min", "must be >= 0");
    require(errors, p.guard_min <= p.initial_guard, "policy.initial_guard",
            "initial_guard is below guard_min");
    require(errors, p.initial_guard <= p.guard_max, "policy.initial_guard",
            "initial_guard exceeds guard_max");
    require(errors, p.initial_guard <= p.total_channels, "policy.initial_guard",
            "initial_guard exceeds total_channels");
    require(errors, p.guard_max <= p.total_channels, "policy.guard_max",
            "guard_max exceeds total_channels");
    require(errors, p.borrow_reserve >= 0 && p.borrow_reserve <= p.guard_max,
            "policy.borrow_reserve", "must lie within [0, guard_max]");
    require(errors, p.adjust_period > 0 && std::isfinite(p.adjust_period), "policy.adjust_period",
            "must be a positive time");
    require(errors, p.handoff_block_target > 0 && p.handoff_block_target < 1,
            "policy.handoff_block_target", "must lie strictly between 0 and 1");
    require(errors, p.guard_util_floor >= 0 && p.guard_util_floor <= 1, "policy.guard_util_floor",
            "must lie within [0, 1]");
    require(errors, p.adjust_step >= 1, "policy.adjust_step", "must be a positive integer");

    require(errors, s.sim_duration > 0 && std::isfinite(s.sim_duration), "sim_duration",
            "must be a positive time");
    require(errors, s.warmup >= 0 && std::isfinite(s.warmup), "warmup", "must be >= 0");
    require(errors, s.warmup < s.sim_duration, "warmup", "must be shorter than sim_duration");
    require(errors, s.replications >= 1, "replications", "must be >= 1");

    ValidationResult result;
    result.errors = std::move(errors);
    if (result.errors.empty()) result.scenario = ValidatedScenario(std::move(s));
    return result;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads one JSON object's fields with full error accumulation: wrong types,
// missing required keys and unknown keys all become ValidationErrors.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string prefix, std::vector<ValidationError>& errors)
        : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

    const json* field(const std::string& key, bool required) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            if (required) fail(key, "required field is missing");
            return nullptr;
        }
        return &*it;
    }

    void number(const std::string& key, double& out, bool required) {
        if (const json* v = field(key, required)) {
            if (!v->is_number()) return fail(key, "must be a number");
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, int& out, bool required) {
        if (const json* v = field(key, required)) {
            if (!v->is_number_integer()) return fail(key, "must be an integer");
            auto raw = v->get<std::int64_t>();
            if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max())
                return fail(key, "integer out of range");
            out = static_cast<int>(raw);
        }
    }

    void unsigned64(const std::string& key, std::uint64_t& out, bool required) {
        if (const json* v = field(key, required)) {
            if (v->is_number_unsigned()) {
                out = v->get<std::uint64_t>();
            } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
                out = static_cast<std::uint64_t>(v->get<std::int64_t>());
            } else {
                fail(key, "must be a non-negative integer");
            }
        }
    }

    void text(const std::string& key, std::string& out, bool required) {
        if (const json* v = field(key, required)) {
            if (!v->is_string()) return fail(key, "must be a string");
            out = v->get<std::string>();
        }
    }

    // Flags any key not consumed above.
    void finish() {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key())) fail(item.key(), "unknown field");
    }

    void fail(const std::string& key, const std::string& rule) {
        errors_.push_back({prefix_.empty() ? key : prefix_ + "." + key, rule});
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<ValidationError>& errors_;
    std::set<std::string> seen_;
};

Topology parse_topology(const json& node, std::vector<ValidationError>& errors) {
    ObjectReader r(node, "topology", errors);
    int cell_count = 0;
    r.integer("cell_count", cell_count, true);

    Topology topo;
    if (const json* adj = r.field("adjacency", false)) {
        topo.cell_count = cell_count;
        if (!adj->is_array()) {
            r.fail("adjacency", "must be an array of [a, b] cell-index pairs");
        } else {
            for (std::size_t i = 0; i < adj->size(); ++i) {
                const json& pair = (*adj)[i];
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
                    !pair[1].is_number_integer()) {
                    r.fail("adjacency[" + std::to_string(i) + "]",
                           "must be a pair of integer cell indices");
                    continue;
                }
                topo.links.emplace_back(pair[0].get<int>(), pair[1].get<int>());
            }
            topo.normalize();
        }
    } else {
        // No adjacency given: default to a ring over the requested cells.
        topo = Topology::ring(cell_count);
    }
    r.finish();
    return topo;
}

TrafficParams parse_traffic(const json& node, std::vector<ValidationError>& errors) {
    ObjectReader r(node, "traffic", errors);
    TrafficParams tr;
    r.number("new_call_rate", tr.new_call_rate, true);
    r.number("exogenous_handoff_rate", tr.exogenous_handoff_rate, false);
    r.number("mean_call_duration", tr.mean_call_duration, true);
    r.number("mean_cell_dwell", tr.mean_cell_dwell, false);
    std::string mode;
    r.text("mobility_mode", mode, false);
    if (!mode.empty()) {
        if (auto parsed = mobility_from_string(mode))
            tr.mobility_mode = *parsed;
        else
            r.fail("mobility_mode", "must be one of: endogenous, exogenous");
    }
    r.finish();
    return tr;
}

PolicyParams parse_policy(const json& node, std::vector<ValidationError>& errors) {
    ObjectReader r(node, "policy", errors);
    PolicyParams p;
    r.integer("total_channels", p.total_channels, true);
    r.integer("initial_guard", p.initial_guard, false);
    r.integer("guard_min", p.guard_min, false);
    bool have_guard_max = node.is_object() && node.contains("guard_max");
    r.integer("guard_max", p.guard_max, false);
    if (!have_guard_max) p.guard_max = p.total_channels / 2;
    r.number("adjust_period", p.adjust_period, false);
    r.number("handoff_block_target", p.handoff_block_target, false);
    r.number("guard_util_floor", p.guard_util_floor, false);
    r.integer("adjust_step", p.adjust_step, false);
    r.integer("borrow_reserve", p.borrow_reserve, false);
    r.finish();
    return p;
}

} // namespace

ScenarioParse scenario_from_json(const std::string& text) {
    ScenarioParse out;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        out.errors.push_back({"", std::string("invalid JSON: ") + e.what()});
        return out;
    }
    if (!doc.is_object()) {
        out.errors.push_back({"", "scenario document must be a JSON object"});
        return out;
    }

    Scenario s;
    ObjectReader top(doc, "", out.errors);

    if (const json* t = top.field("topology", false)) {
        if (t->is_object())
            s.topology = parse_topology(*t, out.errors);
        else
            top.fail("topology", "must be an object");
    }
    if (const json* t = top.field("traffic", true)) {
        if (t->is_object())
            s.traffic = parse_traffic(*t, out.errors);
        else
            top.fail("traffic", "must be an object");
    }
    if (const json* p = top.field("policy", true)) {
        if (p->is_object())
            s.policy = parse_policy(*p, out.errors);
        else
            top.fail("policy", "must be an object");
    }

    std::string scheme;
    top.text("scheme", scheme, true);
    if (!scheme.empty()) {
        if (auto parsed = scheme_from_string(scheme))
            s.scheme = *parsed;
        else
            top.fail("scheme", "must be one of: FCA, StaticGC, DynamicGC, DGCA_CBS");
    }

    top.number("sim_duration", s.sim_duration, true);
    bool have_warmup = doc.contains("warmup");
    top.number("warmup", s.warmup, false);
    if (!have_warmup) s.warmup = 0.1 * s.sim_duration;
    top.integer("replications", s.replications, false);
    top.unsigned64("base_seed", s.base_seed, false);
    top.finish();

    if (out.errors.empty()) out.scenario = std::move(s);
    return out;
}

std::string scenario_to_json(const Scenario& s) {
    ordered_json adjacency = ordered_json::array();
    for (const auto& [a, b] : s.topology.links) adjacency.push_back({a, b});

    ordered_json doc{
        {"topology", {{"cell_count", s.topology.cell_count}, {"adjacency", adjacency}}},
        {"traffic",
         {{"new_call_rate", s.traffic.new_call_rate},
          {"exogenous_handoff_rate", s.traffic.exogenous_handoff_rate},
          {"mean_call_duration", s.traffic.mean_call_duration},
          {"mean_cell_dwell", s.traffic.mean_cell_dwell},
          {"mobility_mode", std::string(to_string(s.traffic.mobility_mode))}}},
        {"policy",
         {{"total_channels", s.policy.total_channels},
          {"initial_guard", s.policy.initial_guard},
          {"guard_min", s.policy.guard_min},
          {"guard_max", s.policy.guard_max},
          {"adjust_period", s.policy.adjust_period},
          {"handoff_block_target", s.policy.handoff_block_target},
          {"guard_util_floor", s.policy.guard_util_floor},
          {"adjust_step", s.policy.adjust_step},
          {"borrow_reserve", s.policy.borrow_reserve}}},
        {"scheme", std::string(to_string(s.scheme))},
        {"sim_duration", s.sim_duration},
        {"warmup", s.warmup},
        {"replications", s.replications},
        {"base_seed", s.base_seed},
    };
    return doc.dump(2);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("I/O failure while reading: " + path);
    return buf.str();
}

} // namespace gcsim
