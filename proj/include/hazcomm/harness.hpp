#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/dispatch.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/metrics.hpp"
#include "hazcomm/perception.hpp"
#include "hazcomm/pipeline.hpp"
#include "hazcomm/wire.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hazcomm {

struct Scenario {
    std::string id;
    std::vector<Observation> observations;
    GroundTruth truth;
    std::optional<FaultProfile> backend_profile;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline void validate(const TruthLabel& t) {
    if (t.factors.criticality_level != t.k) {
        throw ValidationError("truth criticality level d=" + std::string(to_string(t.factors.criticality_level)) +
                              " is incoherent with k=" + std::string(to_string(t.k)));
    }
}

inline void validate(const Scenario& s) {
    if (s.id.empty()) throw ValidationError("scenario id must not be empty");
    if (s.observations.size() != s.truth.size()) {
        throw ValidationError("scenario " + s.id + ": " + std::to_string(s.observations.size()) +
                              " observations but " + std::to_string(s.truth.size()) + " truth entries");
    }
    for (const auto& obs : s.observations) validate(obs);
    for (const auto& t : s.truth) {
        if (t) validate(*t);
    }
    if (s.backend_profile) validate(*s.backend_profile);
}

inline TruthLabel truth_from(const HazardAssessment& a) {
    return TruthLabel{a.category, a.factors, a.factors.criticality_level};
}

// ---------------------------------------------------------------------------
// Builtin scenarios
// ---------------------------------------------------------------------------

namespace detail {

inline Observation observe(Ticks at, std::string caption, std::vector<Entity> entities, LocationType loc,
                           CrowdDensity crowd = CrowdDensity::None, bool vulnerable = false) {
    return Observation{at, std::move(caption), std::move(entities), EnvContext{loc, crowd, vulnerable}};
}

inline TruthLabel label(HazardCategory a, Level d, TimeSensitivity tau, Feasibility phi) {
    return TruthLabel{a, ContextFactors{d, tau, phi}, d};
}

inline const TruthLabel kKnifeUnsafe =
    label(HazardCategory::SharpObject, Level::High, TimeSensitivity::Immediate, Feasibility::HelpNeeded);
inline const TruthLabel kKnifeKitchen =
    label(HazardCategory::SharpObject, Level::Low, TimeSensitivity::NearFuture, Feasibility::Robot);
inline const TruthLabel kPersonDown =
    label(HazardCategory::PersonDown, Level::High, TimeSensitivity::Immediate, Feasibility::HelpNeeded);
inline const TruthLabel kToyGun =
    label(HazardCategory::SuspiciousItem, Level::Low, TimeSensitivity::NearFuture, Feasibility::PoC);
inline const TruthLabel kTrash = label(HazardCategory::Waste, Level::Low, TimeSensitivity::NearFuture, Feasibility::Robot);

constexpr Ticks kPatrolPeriod = seconds(15.0);

} // namespace detail

/// S1-S5, the distress scenario, and a cloud-outage control that forces the
/// fallback path. Control steps with nothing in view are interleaved.
inline std::vector<Scenario> builtin_suite() {
    using namespace detail;
    using L = LocationType;
    using C = CrowdDensity;
    const Ticks p = kPatrolPeriod;
    std::vector<Scenario> suite;

    suite.push_back(Scenario{
        "S1-knife-corridor",
        {observe(p * 0, "an empty corridor with closed doors", {}, L::Corridor),
         observe(p * 1, "a man holding a knife walking down a corridor", {{"knife", "held"}, {"person", "walking"}},
                 L::Corridor, C::Sparse),
         observe(p * 2, "an empty corridor", {}, L::Corridor)},
        {std::nullopt, kKnifeUnsafe, std::nullopt},
        std::nullopt});

    suite.push_back(Scenario{
        "S2-knife-kitchen",
        {observe(p * 0, "a person chopping vegetables with a knife on a kitchen counter",
                 {{"knife", "in-use-cooking"}, {"person", "standing"}}, L::Kitchen, C::Sparse),
         observe(p * 1, "a clean kitchen counter", {}, L::Kitchen)},
        {kKnifeKitchen, std::nullopt},
        std::nullopt});

    suite.push_back(Scenario{
        "S3-person-down",
        {observe(p * 0, "a person lying on the floor of a corridor", {{"person", "on-floor posture-abnormal"}},
                 L::Corridor),
         observe(p * 1, "an empty corridor", {}, L::Corridor)},
        {kPersonDown, std::nullopt},
        std::nullopt});

    suite.push_back(Scenario{
        "S4-toy-gun",
        {observe(p * 0, "a plastic toy gun in its box on a bench", {{"toy gun", "toy-packaging"}}, L::PublicArea,
                 C::Sparse)},
        {kToyGun},
        std::nullopt});

    suite.push_back(Scenario{
        "S5-trash",
        {observe(p * 0, "an overflowing trash bin next to a wall", {{"trash", "overflowing"}}, L::Corridor),
         observe(p * 1, "an empty corridor", {}, L::Corridor)},
        {kTrash, std::nullopt},
        std::nullopt});

    suite.push_back(Scenario{
        "S6-distress",
        {observe(p * 0, "a person pacing and shouting in an office", {{"person", "agitated"}}, L::Office, C::Sparse),
         observe(p * 1, "a crowd of people running and screaming in a hall", {{"person", "panic"}}, L::PublicArea,
                 C::Dense),
         observe(p * 2, "a quiet hall", {}, L::PublicArea)},
        {label(HazardCategory::Distress, Level::Medium, TimeSensitivity::Soon, Feasibility::PoC),
         label(HazardCategory::Distress, Level::High, TimeSensitivity::Immediate, Feasibility::HelpNeeded),
         std::nullopt},
        std::nullopt});

    suite.push_back(Scenario{
        "C1-cloud-outage",
        {observe(p * 0, "a man holding a knife walking down a corridor", {{"knife", "held"}}, L::Corridor, C::Sparse),
         observe(p * 1, "an empty corridor", {}, L::Corridor)},
        {kKnifeUnsafe, std::nullopt},
        FaultProfile{seconds(25.0), 0.0, 1}});

    return suite;
}

/// Sixty single-observation runs, twelve per canonical scenario. Besides
/// clear cases it contains the ambiguity variants: occluded posture (the
/// context-aware rules cannot see the fall), toy guns with and without a
/// visible packaging cue.
inline std::vector<Scenario> evaluation_suite() {
    using namespace detail;
    using L = LocationType;
    using C = CrowdDensity;
    std::vector<Scenario> suite;
    auto add = [&](const std::string& group, std::string caption, Entity e, EnvContext env, TruthLabel truth) {
        const std::size_t n = suite.size();
        std::string id = "E-" + group + "-" + (n % 12 < 9 ? "0" : "") + std::to_string(n % 12 + 1);
        suite.push_back(Scenario{std::move(id),
                                 {Observation{Ticks{0}, std::move(caption), {std::move(e)}, env}},
                                 {truth},
                                 std::nullopt});
    };

    for (auto loc : {L::Corridor, L::PublicArea, L::RestrictedArea})
        for (const char* attr : {"held", "on-floor"})
            for (auto crowd : {C::Sparse, C::Dense})
                add("S1", "a knife outside the kitchen", {"knife", attr}, {loc, crowd, false}, kKnifeUnsafe);

    for (const char* attr : {"in-use-cooking", "on-counter", "in-drying-rack"})
        for (auto crowd : {C::None, C::Sparse, C::Dense})
            add("S2", "a knife in the kitchen", {"knife", attr}, {L::Kitchen, crowd, false}, kKnifeKitchen);
    for (auto crowd : {C::None, C::Sparse, C::Dense})
        add("S2", "an adult cooking while a child watches", {"knife", "in-use-cooking"}, {L::Kitchen, crowd, true},
            kKnifeKitchen);

    for (const char* attr : {"on-floor posture-abnormal", "posture-abnormal"})
        for (auto loc : {L::Corridor, L::Office, L::Kitchen, L::PublicArea})
            add("S3", "a person lying on the floor", {"person", attr}, {loc, C::None, false}, kPersonDown);
    for (auto loc : {L::Corridor, L::Office, L::PublicArea, L::RestrictedArea})
        add("S3", "a person partly hidden behind furniture", {"person", "posture-occluded"}, {loc, C::None, false},
            kPersonDown);

    for (auto loc : {L::PublicArea, L::Corridor, L::Office, L::Kitchen})
        for (auto crowd : {C::Sparse, C::Dense})
            add("S4", "a toy gun in retail packaging", {"toy gun", "toy-packaging"}, {loc, crowd, false}, kToyGun);
    for (auto loc : {L::PublicArea, L::Corridor, L::Office, L::RestrictedArea})
        add("S4", "a replica gun displayed on a shelf", {"gun", "on-shelf"}, {loc, C::Sparse, false}, kToyGun);

    for (const char* attr : {"overflowing", "on-floor", "bagged"})
        for (auto loc : {L::Corridor, L::Kitchen, L::Office, L::PublicArea})
            add("S5", "trash waiting for collection", {"trash", attr}, {loc, C::Sparse, false}, kTrash);

    return suite;
}

// ---------------------------------------------------------------------------
// Scenario files: one JSON document per line
// ---------------------------------------------------------------------------

inline wire::Json encode_truth(const std::optional<TruthLabel>& t) {
    if (!t) return nullptr;
    return wire::Json{{"category", to_string(t->category)},
                      {"d", to_string(t->factors.criticality_level)},
                      {"tau", to_string(t->factors.time_sensitivity)},
                      {"phi", to_string(t->factors.feasibility)},
                      {"k", to_string(t->k)}};
}

inline std::optional<TruthLabel> decode_truth(const wire::Json& j) {
    if (j.is_null()) return std::nullopt;
    wire::expect_object(j, {"category", "d", "tau", "phi", "k"}, {"rho"}, "truth");
    TruthLabel t;
    t.category = wire::get_enum<HazardCategory>(j, "category");
    t.factors = ContextFactors{wire::get_enum<Level>(j, "d"), wire::get_enum<TimeSensitivity>(j, "tau"),
                               wire::get_enum<Feasibility>(j, "phi")};
    t.k = wire::get_enum<Criticality>(j, "k");
    if (j.contains("rho")) {
        const RiskScore rho{wire::get_number(j, "rho")};
        if (band_risk(rho) != t.k) throw ValidationError("truth rho is outside the band of k");
    }
    validate(t);
    return t;
}

inline wire::Json encode_scenario(const Scenario& s) {
    using wire::Json;
    Json obs = Json::array();
    for (const auto& o : s.observations) obs.push_back(wire::encode(o));
    Json truth = Json::array();
    for (const auto& t : s.truth) truth.push_back(encode_truth(t));
    Json profile = nullptr;
    if (s.backend_profile) {
        profile = Json{{"added_delay", s.backend_profile->added_delay.count()},
                       {"failure_rate", s.backend_profile->failure_rate},
                       {"seed", s.backend_profile->seed}};
    }
    return Json{{"id", s.id}, {"observations", obs}, {"truth", truth}, {"backend_profile", profile}};
}

inline Scenario decode_scenario(const wire::Json& j) {
    wire::expect_object(j, {"id", "observations", "truth"}, {"backend_profile"}, "scenario");
    Scenario s;
    s.id = wire::get_string(j, "id");
    const auto& obs = j.at("observations");
    const auto& truth = j.at("truth");
    if (!obs.is_array() || !truth.is_array()) throw FormatError("scenario: observations and truth must be arrays");
    for (const auto& o : obs) s.observations.push_back(wire::decode_observation(o));
    for (const auto& t : truth) s.truth.push_back(decode_truth(t));
    if (j.contains("backend_profile") && !j.at("backend_profile").is_null()) {
        const auto& p = j.at("backend_profile");
        wire::expect_object(p, {"added_delay", "failure_rate", "seed"}, {}, "backend_profile");
        const auto& seed = p.at("seed");
        if (!seed.is_number_unsigned()) throw FormatError("backend_profile: seed must be a non-negative integer");
        s.backend_profile =
            FaultProfile{Ticks{wire::get_integer(p, "added_delay")}, wire::get_number(p, "failure_rate"),
                         seed.get<std::uint64_t>()};
    }
    validate(s);
    return s;
}

inline void save_scenarios(std::ostream& os, const std::vector<Scenario>& scenarios) {
    for (const auto& s : scenarios) os << encode_scenario(s).dump() << '\n';
}

inline std::vector<Scenario> parse_scenarios(std::istream& is) {
    std::vector<Scenario> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(decode_scenario(wire::Json::parse(line)));
        } catch (const wire::Json::exception& e) {
            throw ScenarioFormatError(line_no, e.what());
        } catch (const Error& e) {
            throw ScenarioFormatError(line_no, e.what());
        }
    }
    return out;
}

inline std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    return parse_scenarios(in);
}

// ---------------------------------------------------------------------------
// Randomised scenarios
// ---------------------------------------------------------------------------

struct ScenarioMix {
    /// Indexed by HazardCategory.
    std::array<double, 6> category_weights{1, 1, 1, 1, 1, 1};
    /// Indexed by LocationType.
    std::array<double, 5> location_weights{1, 1, 1, 1, 1};
    double hazard_fraction = 0.75;
    double vulnerable_fraction = 0.2;
    std::size_t steps_per_scenario = 3;
};

/// Entities that the builtin rule table assigns to each category in every
/// environment.
inline const std::array<std::vector<Entity>, 6>& entity_pool() {
    static const std::array<std::vector<Entity>, 6> pool{{
        {{"knife", "held"}, {"knife", "on-floor"}, {"knife", "in-use-cooking"}, {"knife", "on-counter"},
         {"utility blade", "on-table"}},
        {{"person", "on-floor posture-abnormal"}, {"person", "posture-abnormal"}, {"person", "posture-occluded"}},
        {{"person", "panic"}, {"person", "agitated"}},
        {{"gun", "held"}, {"toy gun", "toy-packaging"}, {"gun", "on-shelf"}},
        {{"trash", "overflowing"}, {"trash", "spill"}, {"garbage bag", "on-floor"}, {"trash", "chemical-leak"}},
        {{"bag", "unattended"}, {"suitcase", "unattended"}},
    }};
    return pool;
}

namespace detail {

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    template <std::size_t N>
    std::size_t weighted(const std::array<double, N>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        double u = uniform() * total;
        for (std::size_t i = 0; i < N; ++i) {
            if (w[i] <= 0.0) continue;
            if (u < w[i]) return i;
            u -= w[i];
        }
        for (std::size_t i = N; i-- > 0;) {
            if (w[i] > 0.0) return i;
        }
        return 0;
    }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  private:
    std::mt19937_64 rng_;
};

template <std::size_t N>
double check_weights(const std::array<double, N>& w, const char* what) {
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(what) + " weights must be finite and non-negative");
        total += x;
    }
    return total;
}

} // namespace detail

inline void validate(const ScenarioMix& mix) {
    if (!(mix.hazard_fraction >= 0.0 && mix.hazard_fraction <= 1.0))
        throw ValidationError("hazard fraction must lie in [0, 1]");
    if (!(mix.vulnerable_fraction >= 0.0 && mix.vulnerable_fraction <= 1.0))
        throw ValidationError("vulnerable fraction must lie in [0, 1]");
    if (mix.steps_per_scenario == 0) throw ValidationError("scenarios need at least one step");
    const double categories = detail::check_weights(mix.category_weights, "category");
    const double locations = detail::check_weights(mix.location_weights, "location");
    if (locations <= 0.0) throw ValidationError("location weights must not all be zero");
    if (mix.hazard_fraction > 0.0 && categories <= 0.0)
        throw ValidationError("category weights must not all be zero when hazards are requested");
}

/// Deterministic in `seed`. Truth labels come from the rule table, so they
/// are coherent by construction. While scenarios remain, every category with
/// positive weight is used for the first step of one scenario before
/// sampling takes over.
inline std::vector<Scenario> generate(std::uint64_t seed, std::size_t n, const ScenarioMix& mix = {},
                                      const RuleTable& table = RuleTable::builtin()) {
    if (n == 0) throw ValidationError("generate needs n >= 1");
    validate(mix);
    detail::Sampler rng(seed);

    std::vector<std::size_t> forced;
    if (mix.hazard_fraction > 0.0) {
        for (std::size_t c = 0; c < mix.category_weights.size(); ++c) {
            if (mix.category_weights[c] > 0.0) forced.push_back(c);
        }
    }

    std::vector<Scenario> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Scenario s;
        s.id = "G" + std::to_string(seed) + "-" + std::to_string(i + 1);
        for (std::size_t stepno = 0; stepno < mix.steps_per_scenario; ++stepno) {
            EnvContext env;
            env.location_type = static_cast<LocationType>(rng.weighted(mix.location_weights));
            env.crowd_density = static_cast<CrowdDensity>(rng.below(3));
            env.vulnerable_present = rng.uniform() < mix.vulnerable_fraction;

            const bool force = stepno == 0 && i < forced.size();
            const bool hazard = force || rng.uniform() < mix.hazard_fraction;
            Observation obs;
            obs.timestamp = detail::kPatrolPeriod * static_cast<std::int64_t>(stepno);
            obs.env = env;
            if (hazard) {
                const std::size_t c = force ? forced[i] : rng.weighted(mix.category_weights);
                const auto& candidates = entity_pool()[c];
                const Entity& e = candidates[rng.below(candidates.size())];
                obs.salient_entities.push_back(e);
                obs.scene_caption = e.object_label + " (" + e.attribute + ") in " +
                                    std::string(location_phrase(env.location_type));
            } else {
                obs.scene_caption = "nothing notable in " + std::string(location_phrase(env.location_type));
            }
            auto assessed = scripted_assess(table, obs);
            s.truth.push_back(assessed ? std::optional<TruthLabel>(truth_from(*assessed)) : std::nullopt);
            s.observations.push_back(std::move(obs));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

struct NamedBackend {
    std::string name;
    std::shared_ptr<PerceptionBackend> backend;
};

struct SuiteConfig {
    EngineConfig engine;
    Ticks suppression_window{50};
    std::uint64_t seed = 0;
};

struct ScenarioRun {
    std::string scenario_id;
    std::vector<TraceRecord> trace;
    std::vector<DeliveryBatch> deliveries;
    std::vector<std::string> backend_errors;
    std::size_t fallback_steps = 0;
    SubMetrics metrics;
    LossAccount loss;
};

struct BackendSummary {
    std::string backend;
    std::vector<ScenarioRun> runs;
    SubMetrics metrics;
    double epsilon = 0.0;
    LossAccount loss;
    std::size_t steps = 0;
    std::size_t output_steps = 0;
    std::size_t fallback_steps = 0;
    /// Share of outputs whose alarm flag equals (k != Low).
    double alarm_compliance = 1.0;
    double mean_t_total_s = 0.0;
};

struct SuiteViolation {
    std::string backend;
    std::string scenario_id;
    Violation violation;
};

struct SuiteReport {
    std::vector<BackendSummary> backends;
    std::vector<SuiteViolation> violations;

    [[nodiscard]] const BackendSummary* find(const std::string& name) const {
        for (const auto& b : backends) {
            if (b.backend == name) return &b;
        }
        return nullptr;
    }
};

namespace detail {

/// Mean per-step latency compliance.
inline double mean_latency_compliance(std::span<const TraceRecord> trace, Ticks t_max) {
    if (trace.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& r : trace) sum += latency_compliance(r.t_total, t_max);
    return sum / static_cast<double>(trace.size());
}

inline SubMetrics sub_metrics(std::span<const TraceRecord> trace, std::span<const std::optional<TruthLabel>> truth,
                              std::span<const DeliveryBatch> deliveries, Ticks t_max) {
    SubMetrics m;
    m.eps_det = detection_accuracy(trace, truth);
    m.eps_msg = message_alignment(trace, truth);
    m.eps_coord = coordination_success(deliveries, trace);
    m.eps_lat = mean_latency_compliance(trace, t_max);
    return m.clamped();
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser over the pair
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Runs one scenario on a fresh engine with memory sinks.
inline ScenarioRun run_scenario(const Scenario& scenario, PerceptionBackend& backend, const SuiteConfig& config) {
    validate(scenario);
    ScenarioRun run;
    run.scenario_id = scenario.id;
    EngineState state;
    state.config = config.engine;
    SinkRegistry sinks = memory_sinks();

    for (std::size_t i = 0; i < scenario.observations.size(); ++i) {
        auto [next, result] = step(std::move(state), scenario.observations[i], backend,
                                   scenario.id + "#" + std::to_string(i + 1));
        state = std::move(next);
        if (result.backend_error) run.backend_errors.push_back(*result.backend_error);
        run.fallback_steps += result.fallback_used;
        run.trace.push_back(result.record);
        while (auto ev = state.queue.pop()) {
            run.deliveries.push_back(DeliveryBatch{i, dispatch(ev->output, sinks, state.clock)});
        }
    }

    run.metrics = detail::sub_metrics(run.trace, scenario.truth, run.deliveries, config.engine.t_max);
    run.loss = objective_loss(run.trace, scenario.truth,
                              LossConfig{config.engine.lambda, config.engine.t_max, config.suppression_window});
    return run;
}

inline SuiteReport run_suite(const std::vector<Scenario>& scenarios, const std::vector<NamedBackend>& backends,
                             const SuiteConfig& config = {}) {
    if (scenarios.empty()) throw ConfigError("run_suite needs at least one scenario");
    if (backends.empty()) throw ConfigError("run_suite needs at least one backend");
    validate(config.engine.weights);

    SuiteReport report;
    for (const auto& nb : backends) {
        if (!nb.backend) throw ConfigError("backend '" + nb.name + "' is null");
        BackendSummary summary;
        summary.backend = nb.name;

        std::vector<TraceRecord> all_trace;
        GroundTruth all_truth;
        std::vector<DeliveryBatch> all_deliveries;
        double hazard_loss = 0.0, fatigue_loss = 0.0;
        std::size_t compliant = 0;

        for (const auto& scenario : scenarios) {
            std::shared_ptr<PerceptionBackend> backend = nb.backend;
            if (scenario.backend_profile) {
                FaultProfile profile = *scenario.backend_profile;
                profile.seed = detail::mix_seed(profile.seed, config.seed);
                backend = with_fault_injection(backend, profile);
            }
            ScenarioRun run = run_scenario(scenario, *backend, config);

            const std::size_t offset = all_trace.size();
            for (const auto& b : run.deliveries) all_deliveries.push_back(DeliveryBatch{b.step + offset, b.records});
            all_trace.insert(all_trace.end(), run.trace.begin(), run.trace.end());
            all_truth.insert(all_truth.end(), scenario.truth.begin(), scenario.truth.end());
            hazard_loss += run.loss.l_hazard;
            fatigue_loss += run.loss.l_fatigue;
            summary.fallback_steps += run.fallback_steps;

            for (auto& v : oracle_verify(run.trace)) {
                report.violations.push_back(SuiteViolation{nb.name, scenario.id, std::move(v)});
            }
            summary.runs.push_back(std::move(run));
        }

        double latency_sum = 0.0;
        for (const auto& r : all_trace) {
            latency_sum += to_seconds(r.t_total);
            if (r.has_output()) {
                ++summary.output_steps;
                compliant += r.alarm == (*r.k != Criticality::Low);
            }
        }
        summary.steps = all_trace.size();
        summary.mean_t_total_s = latency_sum / static_cast<double>(all_trace.size());
        summary.alarm_compliance =
            summary.output_steps == 0 ? 1.0
                                      : static_cast<double>(compliant) / static_cast<double>(summary.output_steps);
        summary.metrics = detail::sub_metrics(all_trace, all_truth, all_deliveries, config.engine.t_max);
        summary.epsilon = effectiveness(summary.metrics, config.engine.weights);
        summary.loss = make_loss(hazard_loss, fatigue_loss, config.engine.lambda);
        report.backends.push_back(std::move(summary));
    }
    return report;
}

} // namespace hazcomm
