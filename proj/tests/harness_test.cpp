#include "hazcomm/harness.hpp"
#include "hazcomm/report.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace hazcomm;

namespace {

const Scenario& by_id(const std::vector<Scenario>& suite, const std::string& id) {
    for (const auto& s : suite)
        if (s.id == id) return s;
    throw std::runtime_error("no scenario " + id);
}

std::vector<NamedBackend> both() {
    return {{"scripted", std::make_shared<ScriptedBackend>()},
            {"object-baseline", std::make_shared<ObjectBaselineBackend>()}};
}

} // namespace

TEST(BuiltinSuite, TruthLabels) {
    const auto suite = builtin_suite();
    const auto& s1 = by_id(suite, "S1-knife-corridor");
    ASSERT_TRUE(s1.truth[1]);
    EXPECT_EQ(s1.truth[1]->category, HazardCategory::SharpObject);
    EXPECT_EQ(s1.truth[1]->k, Criticality::High);
    EXPECT_EQ(s1.truth[1]->factors, (ContextFactors{Level::High, TimeSensitivity::Immediate, Feasibility::HelpNeeded}));
    EXPECT_FALSE(s1.truth[0]);

    const auto& s2 = by_id(suite, "S2-knife-kitchen");
    EXPECT_EQ(s2.truth[0]->k, Criticality::Low);
    EXPECT_EQ(s2.truth[0]->factors.feasibility, Feasibility::Robot);

    const auto& s5 = by_id(suite, "S5-trash");
    EXPECT_EQ(s5.truth[0]->category, HazardCategory::Waste);
    EXPECT_EQ(s5.truth[0]->k, Criticality::Low);

    for (const auto& s : suite) EXPECT_NO_THROW(validate(s)) << s.id;
}

TEST(EvaluationSuite, ShapeAndUniqueIds) {
    const auto suite = evaluation_suite();
    ASSERT_EQ(suite.size(), 60u);
    std::set<std::string> ids;
    for (const auto& s : suite) {
        ids.insert(s.id);
        EXPECT_EQ(s.observations.size(), 1u);
        EXPECT_NO_THROW(validate(s));
    }
    EXPECT_EQ(ids.size(), 60u);
    EXPECT_TRUE(ids.count("E-S1-01"));
    EXPECT_TRUE(ids.count("E-S5-12"));
}

TEST(ScenarioFile, RoundTrip) {
    auto suite = builtin_suite();
    auto generated = generate(3, 5);
    suite.insert(suite.end(), generated.begin(), generated.end());
    std::stringstream ss;
    save_scenarios(ss, suite);
    EXPECT_EQ(parse_scenarios(ss), suite);
}

TEST(ScenarioFile, OutOfRangeRiskCitesLine) {
    std::stringstream ss;
    save_scenarios(ss, {builtin_suite()[0]});
    ss << R"({"id":"bad","observations":[{"timestamp":0,"caption":"c","entities":[],"env":{"location_type":"Corridor","crowd_density":"None","vulnerable_present":false}}],"truth":[{"category":"Waste","d":"High","tau":"Immediate","phi":"HelpNeeded","k":"High","rho":11}]})"
       << '\n';
    try {
        parse_scenarios(ss);
        FAIL() << "expected a format error";
    } catch (const ScenarioFormatError& e) {
        EXPECT_EQ(e.line(), 2u);
        const std::string what = e.what();
        EXPECT_NE(what.find("line 2"), std::string::npos);
        EXPECT_NE(what.find("[0, 10]"), std::string::npos) << what;
    }
}

TEST(ScenarioFile, IncoherentTruthRejected) {
    std::stringstream ss(
        R"({"id":"bad","observations":[{"timestamp":0,"caption":"c","entities":[],"env":{"location_type":"Corridor","crowd_density":"None","vulnerable_present":false}}],"truth":[{"category":"Waste","d":"Low","tau":"Immediate","phi":"HelpNeeded","k":"High"}]})");
    try {
        parse_scenarios(ss);
        FAIL();
    } catch (const ScenarioFormatError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find("incoherent"), std::string::npos);
    }
}

TEST(ScenarioFile, OtherErrors) {
    std::stringstream junk("\n{not json}\n");
    EXPECT_THROW(parse_scenarios(junk), ScenarioFormatError);
    std::stringstream mismatch(
        R"({"id":"x","observations":[],"truth":[null]})");
    EXPECT_THROW(parse_scenarios(mismatch), ScenarioFormatError);
    std::stringstream unknown(R"({"id":"x","observations":[],"truth":[],"extra":1})");
    EXPECT_THROW(parse_scenarios(unknown), ScenarioFormatError);
    EXPECT_THROW(load_scenarios("/nonexistent/file.jsonl"), ConfigError);
}

TEST(Generate, Deterministic) {
    EXPECT_EQ(generate(42, 30), generate(42, 30));
    EXPECT_NE(generate(42, 30), generate(43, 30));
}

TEST(Generate, CoversAllCategories) {
    std::set<HazardCategory> seen;
    for (const auto& s : generate(1, 60))
        for (const auto& t : s.truth)
            if (t) seen.insert(t->category);
    EXPECT_EQ(seen.size(), 6u);
}

TEST(Generate, TruthAgreesWithScriptedBackend) {
    ScriptedBackend scripted;
    for (const auto& s : generate(9, 40)) {
        for (std::size_t i = 0; i < s.observations.size(); ++i) {
            auto a = scripted.assess(s.observations[i]);
            ASSERT_EQ(a.has_value(), s.truth[i].has_value());
            if (a) {
                EXPECT_EQ(truth_from(*a), *s.truth[i]);
            }
        }
    }
}

TEST(Generate, ZeroHazardFraction) {
    ScenarioMix mix;
    mix.hazard_fraction = 0.0;
    for (const auto& s : generate(5, 20, mix))
        for (const auto& t : s.truth) EXPECT_FALSE(t);
}

TEST(Generate, InvalidMix) {
    ScenarioMix mix;
    mix.hazard_fraction = 1.5;
    EXPECT_THROW(generate(1, 1, mix), ValidationError);
    mix = {};
    mix.location_weights = {0, 0, 0, 0, 0};
    EXPECT_THROW(generate(1, 1, mix), ValidationError);
    mix = {};
    mix.category_weights[2] = -1;
    EXPECT_THROW(generate(1, 1, mix), ValidationError);
    EXPECT_THROW(generate(1, 0), ValidationError);
}

TEST(EntityPool, MapsToOwnCategoryEverywhere) {
    for (std::size_t c = 0; c < entity_pool().size(); ++c)
        for (const auto& e : entity_pool()[c])
            for (auto loc : all_values<LocationType>())
                for (auto crowd : all_values<CrowdDensity>())
                    for (bool v : {false, true}) {
                        Observation o{Ticks{0}, "x", {e}, EnvContext{loc, crowd, v}};
                        auto a = scripted_assess(RuleTable::builtin(), o);
                        ASSERT_TRUE(a) << e.object_label;
                        ASSERT_EQ(static_cast<std::size_t>(a->category), c) << e.object_label << " " << e.attribute;
                    }
}

TEST(RunSuite, BuiltinIsClean) {
    const auto report = run_suite(builtin_suite(), both());
    EXPECT_TRUE(report.violations.empty());
    const auto* scripted = report.find("scripted");
    const auto* baseline = report.find("object-baseline");
    ASSERT_TRUE(scripted && baseline);
    EXPECT_DOUBLE_EQ(scripted->alarm_compliance, 1.0);
    EXPECT_GT(scripted->metrics.eps_det, baseline->metrics.eps_det);
    EXPECT_LT(scripted->loss.total, baseline->loss.total);
}

TEST(RunSuite, OutageScenarioFallsBack) {
    const auto suite = builtin_suite();
    const auto report = run_suite({by_id(suite, "C1-cloud-outage")}, {{"scripted", std::make_shared<ScriptedBackend>()}});
    const auto& run = report.backends[0].runs[0];
    EXPECT_EQ(run.fallback_steps, 2u);
    for (const auto& r : run.trace) {
        EXPECT_TRUE(r.fallback);
        ASSERT_TRUE(r.has_output());
        EXPECT_FALSE(r.category);
        EXPECT_GT(r.t_total, seconds(20));
    }
    EXPECT_TRUE(report.violations.empty());
}

TEST(RunSuite, CoversOutputSpace) {
    auto scenarios = builtin_suite();
    auto eval = evaluation_suite();
    scenarios.insert(scenarios.end(), eval.begin(), eval.end());
    const auto report = run_suite(scenarios, {{"scripted", std::make_shared<ScriptedBackend>()}});
    std::set<int> levels;
    std::set<std::size_t> recipient_sizes;
    std::set<bool> alarms;
    bool fallback = false;
    for (const auto& run : report.backends[0].runs)
        for (const auto& r : run.trace) {
            if (r.k) levels.insert(static_cast<int>(*r.k));
            recipient_sizes.insert(r.recipients.size());
            alarms.insert(r.alarm);
            fallback = fallback || r.fallback;
        }
    EXPECT_EQ(levels.size(), 3u);
    EXPECT_EQ(recipient_sizes.size(), 4u);
    EXPECT_EQ(alarms.size(), 2u);
    EXPECT_TRUE(fallback);
}

TEST(RunSuite, RejectsEmptyInputs) {
    EXPECT_THROW(run_suite({}, both()), ConfigError);
    EXPECT_THROW(run_suite(builtin_suite(), {}), ConfigError);
    EXPECT_THROW(run_suite(builtin_suite(), {{"null", nullptr}}), ConfigError);
}

TEST(Report, Reproducible) {
    SuiteConfig cfg;
    cfg.seed = 17;
    auto scenarios = generate(17, 25);
    for (auto& s : scenarios) s.backend_profile = FaultProfile{Ticks{0}, 0.3, 4};
    const auto a = run_suite(scenarios, both(), cfg);
    const auto b = run_suite(scenarios, both(), cfg);
    EXPECT_EQ(render_structured(a), render_structured(b));
    EXPECT_EQ(render_text(a), render_text(b));
    EXPECT_EQ(render_comparison(a), render_comparison(b));
    EXPECT_GT(a.backends[0].fallback_steps, 0u);
    cfg.seed = 18;
    EXPECT_NE(render_structured(a), render_structured(run_suite(scenarios, both(), cfg)));
}
