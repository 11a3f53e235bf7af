// hazcomm: run scenario suites, verify and replay trace logs, generate scenarios.
//
// Exit status: 0 clean, 1 oracle violation, 2 configuration or input error.

#include "hazcomm/hazcomm.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hazcomm;

constexpr int kClean = 0;
constexpr int kViolation = 1;
constexpr int kConfig = 2;

struct Options {
    std::string scenarios;
    std::string suite = "builtin";
    std::vector<std::string> backends;
    std::uint64_t seed = 0;
    double t_max = 20.0;
    double lambda = 1.0;
    std::string report;
    std::string format = "text";
    std::string trace;
    std::string templates;
    std::string rules;
    std::string endpoint;
    std::size_t n = 60;
    double hazard_fraction = 0.75;
    std::size_t steps = 3;
    std::string out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

EngineConfig engine_config(const Options& o) {
    EngineConfig cfg;
    if (!(o.t_max > 0.0)) throw ConfigError("--t-max must be positive");
    if (!(o.lambda > 0.0)) throw ConfigError("--lambda must be positive");
    cfg.t_max = seconds(o.t_max);
    cfg.lambda = o.lambda;
    if (!o.templates.empty()) cfg.templates = TemplateTable::parse(read_file(o.templates));
    return cfg;
}

NamedBackend make_backend(const std::string& spec, const Options& o) {
    if (spec == "scripted") {
        RuleTable table = o.rules.empty() ? RuleTable::builtin() : RuleTable::parse(read_file(o.rules));
        return {spec, std::make_shared<ScriptedBackend>(std::move(table))};
    }
    if (spec == "object-baseline") return {spec, std::make_shared<ObjectBaselineBackend>()};
    if (spec == "location-baseline") return {spec, std::make_shared<LocationBaselineBackend>()};
    if (spec.rfind("remote:", 0) == 0) {
        auto endpoint = Endpoint::parse(spec.substr(7), "/assess");
        return {spec, std::make_shared<RemoteBackend>(std::make_unique<HttpTransport>(endpoint), seconds(o.t_max),
                                                      spec)};
    }
    throw ConfigError("unknown backend '" + spec + "'");
}

std::vector<Scenario> load_suite(const Options& o) {
    if (!o.scenarios.empty()) {
        auto s = load_scenarios(o.scenarios);
        if (s.empty()) throw ConfigError("scenario file '" + o.scenarios + "' is empty");
        return s;
    }
    if (o.suite == "builtin") return builtin_suite();
    if (o.suite == "evaluation") return evaluation_suite();
    auto all = builtin_suite();
    auto eval = evaluation_suite();
    all.insert(all.end(), eval.begin(), eval.end());
    return all;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace '" + path + "'");
    return read_trace(in);
}

SuiteReport execute(const Options& o, const std::vector<std::string>& specs) {
    SuiteConfig cfg;
    cfg.engine = engine_config(o);
    cfg.seed = o.seed;
    std::vector<NamedBackend> backends;
    for (const auto& s : specs) backends.push_back(make_backend(s, o));
    auto report = run_suite(load_suite(o), backends, cfg);

    if (!o.trace.empty()) {
        std::ofstream out(o.trace);
        if (!out) throw ConfigError("cannot write '" + o.trace + "'");
        for (const auto& b : report.backends)
            for (const auto& r : b.runs) write_trace(out, r.trace);
    }
    return report;
}

int cmd_run(const Options& o) {
    const auto specs = o.backends.empty() ? std::vector<std::string>{"scripted"} : o.backends;
    const auto report = execute(o, specs);
    write_output(o.report, o.format == "structured" ? render_structured(report) : render_text(report));
    return report.violations.empty() ? kClean : kViolation;
}

int cmd_compare(const Options& o) {
    auto specs = o.backends;
    if (specs.empty()) specs = {"scripted", "object-baseline"};
    if (specs.size() != 2) throw ConfigError("compare needs exactly two --backend values");
    const auto report = execute(o, specs);
    write_output(o.report, o.format == "structured" ? render_structured(report) : render_comparison(report));
    return report.violations.empty() ? kClean : kViolation;
}

void print_violations(const std::vector<Violation>& violations, const Options& o) {
    if (o.format == "structured") {
        wire::Json arr = wire::Json::array();
        for (const auto& v : violations) {
            arr.push_back({{"step", v.step}, {"obs_id", v.obs_id}, {"rule", v.rule}, {"detail", v.detail}});
        }
        write_output(o.report, wire::Json{{"violations", arr}}.dump(2) + "\n");
        return;
    }
    std::ostringstream os;
    for (const auto& v : violations) {
        os << "step " << v.step << " " << v.obs_id << " [" << v.rule << "] " << v.detail << '\n';
    }
    os << "violations: " << violations.size() << '\n';
    write_output(o.report, os.str());
}

int cmd_verify(const Options& o) {
    if (o.trace.empty()) throw ConfigError("verify needs a trace file");
    const auto trace = read_trace_file(o.trace);
    const auto violations = oracle_verify(trace);
    print_violations(violations, o);
    return violations.empty() ? kClean : kViolation;
}

CommOutput output_from(const TraceRecord& r) {
    CommOutput out;
    out.category = r.category;
    out.message = MessageTuple{r.text, *r.gamma, *r.chi};
    out.recipients = r.recipients;
    out.alarm = r.alarm;
    out.criticality = *r.k;
    out.risk = RiskScore{*r.rho};
    return out;
}

int cmd_replay(const Options& o) {
    if (o.trace.empty()) throw ConfigError("replay needs a trace file");
    const auto trace = read_trace_file(o.trace);
    const auto violations = oracle_verify(trace);
    if (!violations.empty()) {
        print_violations(violations, o);
        return kViolation;
    }
    SinkRegistry sinks = memory_sinks();
    if (!o.endpoint.empty()) {
        const auto ep = Endpoint::parse(o.endpoint, "/alerts");
        for (auto c : all_values<Channel>()) sinks.add(network_sink(c, ep));
    }
    std::size_t outputs = 0, delivered = 0, failed = 0;
    wire::Json rows = wire::Json::array();
    std::ostringstream os;
    for (const auto& r : trace) {
        if (!r.has_output()) continue;
        ++outputs;
        for (const auto& d : dispatch(output_from(r), sinks, r.tick)) {
            (d.success ? delivered : failed) += 1;
            rows.push_back({{"obs_id", r.obs_id},
                            {"tick", d.tick.count()},
                            {"channel", to_string(d.channel)},
                            {"success", d.success},
                            {"detail", d.detail}});
            os << r.obs_id << " " << to_string(d.channel) << " " << (d.success ? "ok" : "FAILED") << " " << d.detail
               << '\n';
        }
    }
    os << "outputs: " << outputs << " delivered: " << delivered << " failed: " << failed << '\n';
    if (o.format == "structured") {
        write_output(o.report, wire::Json{{"outputs", outputs}, {"delivered", delivered}, {"failed", failed},
                                          {"deliveries", rows}}
                                       .dump(2) +
                                   "\n");
    } else {
        write_output(o.report, os.str());
    }
    return kClean;
}

int cmd_gen(const Options& o) {
    ScenarioMix mix;
    mix.hazard_fraction = o.hazard_fraction;
    mix.steps_per_scenario = o.steps;
    RuleTable table = o.rules.empty() ? RuleTable::builtin() : RuleTable::parse(read_file(o.rules));
    std::vector<Scenario> scenarios;
    try {
        scenarios = generate(o.seed, o.n, mix, table);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    std::ostringstream os;
    save_scenarios(os, scenarios);
    write_output(o.out, os.str());
    return kClean;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Seed for generation and fault injection");
    cmd->add_option("--t-max", o.t_max, "Latency budget in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", o.lambda, "Weight of alarm fatigue in the loss")->check(CLI::PositiveNumber);
    cmd->add_option("--report", o.report, "Write the report here instead of stdout");
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "structured"}));
}

void add_suite(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenarios", o.scenarios, "Scenario file (JSON lines)");
    cmd->add_option("--suite", o.suite, "Builtin suite when no file is given")
        ->check(CLI::IsMember({"builtin", "evaluation", "all"}));
    cmd->add_option("--backend", o.backends, "scripted | object-baseline | location-baseline | remote:<host:port>");
    cmd->add_option("--trace", o.trace, "Write the trace log (JSON lines) here");
    cmd->add_option("--templates", o.templates, "Message template file");
    cmd->add_option("--rules", o.rules, "Rule table for the scripted backend");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context- and criticality-aware hazard communication"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Run a scenario suite and report metrics");
    add_common(run, o);
    add_suite(run, o);

    auto* compare = app.add_subcommand("compare", "Run two backends and print metrics side by side");
    add_common(compare, o);
    add_suite(compare, o);

    auto* verify = app.add_subcommand("verify", "Check a trace log against the policy rules");
    add_common(verify, o);
    verify->add_option("trace,--trace", o.trace, "Trace file")->required();

    auto* replay = app.add_subcommand("replay", "Re-dispatch the outputs of a trace log");
    add_common(replay, o);
    replay->add_option("trace,--trace", o.trace, "Trace file")->required();
    replay->add_option("--endpoint", o.endpoint, "POST alerts to host:port[/path] on every channel");

    auto* gen = app.add_subcommand("gen", "Generate random scenarios");
    add_common(gen, o);
    gen->add_option("--n", o.n, "Number of scenarios");
    gen->add_option("--hazard-fraction", o.hazard_fraction, "Share of steps with a hazard");
    gen->add_option("--steps", o.steps, "Steps per scenario");
    gen->add_option("--rules", o.rules, "Rule table used for truth labels");
    gen->add_option("--out,--scenarios", o.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kClean : kConfig;
    }

    try {
        if (*run) return cmd_run(o);
        if (*compare) return cmd_compare(o);
        if (*verify) return cmd_verify(o);
        if (*replay) return cmd_replay(o);
        if (*gen) return cmd_gen(o);
    } catch (const std::exception& e) {
        std::cerr << "hazcomm: " << e.what() << '\n';
        return kConfig;
    }
    return kConfig;
}
