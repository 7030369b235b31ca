#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcsim/engine.hpp"
#include "gcsim/errors.hpp"
#include "gcsim/model.hpp"
#include "gcsim/oracle.hpp"
#include "gcsim/stats.hpp"

namespace gcsim {

namespace {

constexpr const char* kCsvHeader =
    "scenario_id,scheme,param_name,param_value,metric,mean,stderr,ci95_half,replications";

std::string fmt_g12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CommonOpts {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<std::string> scheme;
    std::string output;
    std::string format = "csv";
    std::string trace_path;
};

struct SweepOpts {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

struct ReportRow {
    std::string scenario_id;
    SchemeKind scheme = SchemeKind::Fca;
    std::string param_name = "none";
    double param_value = std::numeric_limits<double>::quiet_NaN();
    Metric metric = Metric::NewCallBlocking;
    MetricSummary summary;
};

std::string render_csv(const std::vector<ReportRow>& rows) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const ReportRow& r : rows) {
        out += r.scenario_id;
        out += ',';
        out += to_string(r.scheme);
        out += ',';
        out += r.param_name;
        out += ',';
        out += fmt_g12(r.param_value);
        out += ',';
        out += metric_name(r.metric);
        out += ',';
        out += fmt_g12(r.summary.mean);
        out += ',';
        out += fmt_g12(r.summary.std_error);
        out += ',';
        out += fmt_g12(r.summary.ci95_half);
        out += ',';
        out += std::to_string(r.summary.replications);
        out += '\n';
    }
    return out;
}

std::string render_json(const std::vector<ReportRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ReportRow& r : rows) {
        arr.push_back({{"scenario_id", r.scenario_id},
                       {"scheme", std::string(to_string(r.scheme))},
                       {"param_name", r.param_name},
                       {"param_value", r.param_value},
                       {"metric", std::string(metric_name(r.metric))},
                       {"mean", r.summary.mean},
                       {"stderr", r.summary.std_error},
                       {"ci95_half", r.summary.ci95_half},
                       {"replications", r.summary.replications}});
    }
    return arr.dump(2) + "\n";
}

void append_rows(std::vector<ReportRow>& rows, const std::string& scenario_id, SchemeKind scheme,
                 const std::string& param_name, double param_value, const BlockingReport& report) {
    for (Metric m : kAllMetrics)
        rows.push_back({scenario_id, scheme, param_name, param_value, m, report.by(m)});
}

int emit(const std::string& content, const std::string& path, std::ostream& out,
         std::ostream& err) {
    if (path.empty()) {
        out << content;
        return 0;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        err << "error: cannot open output file: " << path << "\n";
        return 1;
    }
    file << content;
    file.flush();
    if (!file) {
        err << "error: failed while writing output file: " << path << "\n";
        return 1;
    }
    return 0;
}

int thread_cap_from_env() {
    const char* v = std::getenv("GCSIM_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    unsigned long n = std::strtoul(v, &end, 10);
    if (end == v || *end != '\0') return 0; // unparsable values fall back to auto
    return static_cast<int>(std::min(n, 1024ul));
}

std::string scenario_id_from_path(const std::string& path) {
    std::string stem = std::filesystem::path(path).stem().string();
    return stem.empty() ? "scenario" : stem;
}

void print_errors(const std::vector<ValidationError>& errors, std::ostream& err) {
    for (const ValidationError& e : errors)
        err << "validation error: " << (e.field.empty() ? "(document)" : e.field) << ": " << e.rule
            << "\n";
}

// Reads the config, applies overrides, validates. Returns 0 and fills
// `scenario` on success, otherwise the command's exit code.
int load_scenario(const CommonOpts& opts, std::ostream& err,
                  std::optional<ValidatedScenario>& scenario) {
    std::string text;
    try {
        text = read_text_file(opts.config);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    ScenarioParse parsed = scenario_from_json(text);
    if (!parsed.ok()) {
        print_errors(parsed.errors, err);
        return 2;
    }

    Scenario s = *parsed.scenario;
    if (opts.seed) s.base_seed = *opts.seed;
    if (opts.replications) s.replications = *opts.replications;
    if (opts.scheme) {
        auto kind = scheme_from_string(*opts.scheme);
        if (!kind) {
            err << "validation error: scheme: must be one of: FCA, StaticGC, DynamicGC, "
                   "DGCA_CBS\n";
            return 2;
        }
        s.scheme = *kind;
    }

    ValidationResult validated = validate_scenario(std::move(s));
    if (!validated.ok()) {
        print_errors(validated.errors, err);
        return 2;
    }
    scenario = std::move(validated.scenario);
    return 0;
}

BlockingReport run_and_aggregate(const ValidatedScenario& scenario, std::ostream* trace) {
    return aggregate(run_replications(scenario, thread_cap_from_env(), trace));
}

int cmd_validate(const CommonOpts& opts, std::ostream& out, std::ostream& err) {
    std::optional<ValidatedScenario> scenario;
    if (int rc = load_scenario(opts, err, scenario)) return rc;
    out << scenario_to_json(scenario->value()) << "\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, std::ostream& out, std::ostream& err) {
    std::optional<ValidatedScenario> scenario;
    if (int rc = load_scenario(opts, err, scenario)) return rc;

    std::ofstream trace_file;
    if (!opts.trace_path.empty()) {
        trace_file.open(opts.trace_path, std::ios::binary);
        if (!trace_file) {
            err << "error: cannot open trace file: " << opts.trace_path << "\n";
            return 1;
        }
    }

    BlockingReport report =
        run_and_aggregate(*scenario, trace_file.is_open() ? &trace_file : nullptr);
    std::vector<ReportRow> rows;
    append_rows(rows, scenario_id_from_path(opts.config), scenario->value().scheme, "none",
                std::numeric_limits<double>::quiet_NaN(), report);
    const std::string content = opts.format == "json" ? render_json(rows) : render_csv(rows);
    return emit(content, opts.output, out, err);
}

// Same scenario under all four schemes with identical per-replication seeds
// (common random numbers), one row block per scheme.
int compare_rows(const ValidatedScenario& scenario, const std::string& scenario_id,
                 const std::string& param_name, double param_value, std::ostream& err,
                 std::vector<ReportRow>& rows) {
    for (SchemeKind kind : kAllSchemes) {
        Scenario variant = scenario.value();
        variant.scheme = kind;
        ValidationResult validated = validate_scenario(std::move(variant));
        if (!validated.ok()) {
            print_errors(validated.errors, err);
            return 2;
        }
        append_rows(rows, scenario_id, kind, param_name, param_value,
                    run_and_aggregate(*validated.scenario, nullptr));
    }
    return 0;
}

int cmd_compare(const CommonOpts& opts, std::ostream& out, std::ostream& err) {
    std::optional<ValidatedScenario> scenario;
    if (int rc = load_scenario(opts, err, scenario)) return rc;

    std::vector<ReportRow> rows;
    if (int rc = compare_rows(*scenario, scenario_id_from_path(opts.config), "none",
                              std::numeric_limits<double>::quiet_NaN(), err, rows))
        return rc;
    const std::string content = opts.format == "json" ? render_json(rows) : render_csv(rows);
    return emit(content, opts.output, out, err);
}

int apply_sweep_param(Scenario& s, const std::string& param, double value, std::ostream& err) {
    if (param == "new_call_rate") {
        s.traffic.new_call_rate = value;
    } else if (param == "exogenous_handoff_rate") {
        s.traffic.exogenous_handoff_rate = value;
    } else if (param == "total_channels") {
        double rounded = std::round(value);
        if (std::fabs(value - rounded) > 1e-9 * std::max(1.0, std::fabs(value))) {
            err << "validation error: sweep: total_channels grid point " << fmt_g12(value)
                << " is not an integer\n";
            return 2;
        }
        s.policy.total_channels = static_cast<int>(rounded);
    } else {
        err << "validation error: sweep: parameter must be one of: new_call_rate, "
               "exogenous_handoff_rate, total_channels\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const SweepOpts& sweep, std::ostream& out,
              std::ostream& err) {
    std::optional<ValidatedScenario> scenario;
    if (int rc = load_scenario(opts, err, scenario)) return rc;

    if (sweep.steps < 2) {
        err << "validation error: sweep: steps must be >= 2\n";
        return 2;
    }
    if (!(sweep.from < sweep.to)) {
        err << "validation error: sweep: from must be strictly below to\n";
        return 2;
    }

    std::vector<double> grid;
    for (int i = 0; i < sweep.steps; ++i)
        grid.push_back(sweep.from +
                       (sweep.to - sweep.from) * static_cast<double>(i) /
                           static_cast<double>(sweep.steps - 1));

    // Validate every grid point up front so a bad point fails fast.
    std::vector<ValidatedScenario> points;
    for (double value : grid) {
        Scenario variant = scenario->value();
        if (int rc = apply_sweep_param(variant, sweep.param, value, err)) return rc;
        ValidationResult validated = validate_scenario(std::move(variant));
        if (!validated.ok()) {
            err << "validation errors at sweep point " << sweep.param << " = " << fmt_g12(value)
                << ":\n";
            print_errors(validated.errors, err);
            return 2;
        }
        points.push_back(std::move(*validated.scenario));
    }

    const std::string scenario_id = scenario_id_from_path(opts.config);
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (int rc = compare_rows(points[i], scenario_id, sweep.param, grid[i], err, rows))
            return rc;
    }
    const std::string content = opts.format == "json" ? render_json(rows) : render_csv(rows);
    return emit(content, opts.output, out, err);
}

int cmd_oracle(int channels, int guard, double new_rate, double handoff_rate, double service_rate,
               std::ostream& out, std::ostream& err) {
    try {
        ChainSpec spec{channels, guard, new_rate, handoff_rate, service_rate};
        BlockingPair blocking = blocking_probabilities(cutoff_steady_state(spec), spec);
        out << "P_new " << fmt_g12(blocking.new_call) << "\n"
            << "P_handoff " << fmt_g12(blocking.handoff) << "\n";
        return 0;
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    }
}

void add_common_options(CLI::App* cmd, CommonOpts& opts, bool with_scheme, bool with_trace) {
    cmd->add_option("--config", opts.config, "Scenario JSON file")->required();
    cmd->add_option("--seed", opts.seed, "Override base_seed");
    cmd->add_option("--replications", opts.replications, "Override replication count");
    if (with_scheme) cmd->add_option("--scheme", opts.scheme, "Override the scheme");
    cmd->add_option("--output", opts.output, "Write the report here instead of stdout");
    cmd->add_option("--format", opts.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_trace)
        cmd->add_option("--trace", opts.trace_path, "Event dump for replication 0 (tab-separated)");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"gcsim: cellular call-admission simulator with guard channels"};
    app.require_subcommand(1);

    CommonOpts validate_opts;
    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file and echo it");
    validate->add_option("--config", validate_opts.config, "Scenario JSON file")->required();

    CommonOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "Run one scenario and report blocking metrics");
    add_common_options(run, run_opts, true, true);

    CommonOpts compare_opts;
    CLI::App* compare =
        app.add_subcommand("compare", "Run all four schemes with common random numbers");
    add_common_options(compare, compare_opts, false, false);

    CommonOpts sweep_opts;
    SweepOpts sweep_spec;
    CLI::App* sweep = app.add_subcommand("sweep", "Compare schemes across a parameter grid");
    add_common_options(sweep, sweep_opts, false, false);
    sweep->add_option("--param", sweep_spec.param, "Swept parameter")->required();
    sweep->add_option("--from", sweep_spec.from, "First grid value")->required();
    sweep->add_option("--to", sweep_spec.to, "Last grid value")->required();
    sweep->add_option("--steps", sweep_spec.steps, "Number of grid points")->required();

    int oracle_channels = 0;
    int oracle_guard = 0;
    double oracle_new_rate = 0.0, oracle_handoff_rate = 0.0, oracle_service_rate = 0.0;
    CLI::App* oracle =
        app.add_subcommand("oracle", "Analytic guard-cutoff blocking probabilities");
    oracle->add_option("channels", oracle_channels, "Total channels S")->required();
    oracle->add_option("guard", oracle_guard, "Guard cutoff g")->required();
    oracle->add_option("new_rate", oracle_new_rate, "New-call arrival rate")->required();
    oracle->add_option("handoff_rate", oracle_handoff_rate, "Handoff arrival rate")->required();
    oracle->add_option("service_rate", oracle_service_rate, "Per-call service rate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_opts, out, err);
        if (app.got_subcommand(run)) return cmd_run(run_opts, out, err);
        if (app.got_subcommand(compare)) return cmd_compare(compare_opts, out, err);
        if (app.got_subcommand(sweep)) return cmd_sweep(sweep_opts, sweep_spec, out, err);
        if (app.got_subcommand(oracle))
            return cmd_oracle(oracle_channels, oracle_guard, oracle_new_rate, oracle_handoff_rate,
                              oracle_service_rate, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // LogicError and anything unexpected: an internal consistency failure.
        err << "internal consistency failure: " << e.what()
            << " (rerun with --trace PATH to capture an event dump)\n";
        return 3;
    }
    return 2;
}

} // namespace gcsim
