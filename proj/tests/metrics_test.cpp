#include "hazcomm/metrics.hpp"
#include "hazcomm/harness.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hazcomm;

namespace {

/// Well-formed record for level k at score rho, built field by field.
TraceRecord record(Ticks tick, HazardCategory a, double rho, Criticality k) {
    TraceRecord r;
    r.tick = tick;
    r.obs_id = "o" + std::to_string(tick.count());
    r.category = a;
    r.rho = rho;
    r.k = k;
    r.gamma = rho;
    r.chi = static_cast<Character>(static_cast<int>(k));
    r.alarm = k != Criticality::Low;
    for (int c = 0; c <= static_cast<int>(k); ++c) r.recipients.insert(static_cast<Channel>(c));
    r.t_total = seconds(12);
    return r;
}

TraceRecord quiet(Ticks tick) {
    TraceRecord r;
    r.tick = tick;
    r.obs_id = "q";
    r.t_total = seconds(12);
    return r;
}

TruthLabel truth(HazardCategory a, Level d) { return TruthLabel{a, factors_for_level(d), d}; }

DeliveryBatch full_delivery(std::size_t step, Criticality k) {
    DeliveryBatch b{step, {}};
    for (int c = 0; c <= static_cast<int>(k); ++c) b.records.push_back({static_cast<Channel>(c), Ticks{0}, true, ""});
    return b;
}

} // namespace

TEST(Effectiveness, Examples) {
    EXPECT_DOUBLE_EQ(effectiveness({1, 1, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(effectiveness({0, 0, 0, 0}), 0.0);
    EXPECT_NEAR(effectiveness({0.8, 0.82, 1.0, 0.4}), 0.755, 1e-12);
    EXPECT_NEAR(effectiveness({1, 0, 0, 0}, {0.7, 0.1, 0.1, 0.1}), 0.7, 1e-12);
}

TEST(Effectiveness, RejectsBadWeights) {
    EXPECT_THROW(effectiveness({1, 1, 1, 1}, {0.5, 0.5, 0.5, 0.5}), ValidationError);
    EXPECT_THROW(effectiveness({1, 1, 1, 1}, {1.2, -0.2, 0, 0}), ValidationError);
    EXPECT_THROW(effectiveness({1, 1, 1, 1}, {std::nan(""), 0, 0, 1}), ValidationError);
}

TEST(Effectiveness, BoundedAndMonotone) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    std::uniform_real_distribution<double> bump(0.0, 0.3);
    for (int i = 0; i < 2000; ++i) {
        SubMetrics s{u(rng), u(rng), u(rng), u(rng)};
        std::array<double, 4> raw{std::abs(u(rng)), std::abs(u(rng)), std::abs(u(rng)), std::abs(u(rng)) + 0.01};
        const double total = raw[0] + raw[1] + raw[2] + raw[3];
        Weights w{raw[0] / total, raw[1] / total, raw[2] / total, 0};
        w[3] = 1.0 - w[0] - w[1] - w[2];
        const double e = effectiveness(s, w);
        ASSERT_GE(e, 0.0);
        ASSERT_LE(e, 1.0 + 1e-12);
        SubMetrics better = s;
        better.eps_det += bump(rng);
        ASSERT_GE(effectiveness(better, w), e - 1e-12);
    }
}

TEST(LatencyCompliance, Examples) {
    EXPECT_DOUBLE_EQ(latency_compliance(seconds(12), seconds(20)), 0.4);
    EXPECT_DOUBLE_EQ(latency_compliance(Ticks{0}, seconds(20)), 1.0);
    EXPECT_DOUBLE_EQ(latency_compliance(seconds(25), seconds(20)), 0.0);
    EXPECT_THROW(latency_compliance(seconds(1), Ticks{0}), ValidationError);
}

TEST(DetectionAccuracy, CountsCategoryAndLevel) {
    std::vector<TraceRecord> trace{record(Ticks{1}, HazardCategory::SharpObject, 9, Criticality::High),
                                   record(Ticks{2}, HazardCategory::SharpObject, 9, Criticality::High),
                                   record(Ticks{3}, HazardCategory::Waste, 2, Criticality::Low), quiet(Ticks{4})};
    GroundTruth t{truth(HazardCategory::SharpObject, Level::High), truth(HazardCategory::SharpObject, Level::Low),
                  truth(HazardCategory::SharpObject, Level::Low), std::nullopt};
    EXPECT_DOUBLE_EQ(detection_accuracy(trace, t), 0.5);
    GroundTruth shorter(t.begin(), t.end() - 1);
    EXPECT_THROW(detection_accuracy(trace, shorter), ValidationError);
    EXPECT_THROW(detection_accuracy(std::vector<TraceRecord>{}, GroundTruth{}), ValidationError);
}

TEST(DetectionAccuracy, FalsePositiveOnQuietStep) {
    std::vector<TraceRecord> trace{record(Ticks{1}, HazardCategory::Waste, 2, Criticality::Low)};
    GroundTruth t{std::nullopt};
    EXPECT_DOUBLE_EQ(detection_accuracy(trace, t), 0.0);
}

TEST(MessageAlignment, FourOfFive) {
    std::vector<TraceRecord> trace;
    GroundTruth t;
    for (int i = 0; i < 4; ++i) {
        trace.push_back(record(Ticks{i}, HazardCategory::PersonDown, 8.5, Criticality::High));
        t.push_back(truth(HazardCategory::PersonDown, Level::High));
    }
    trace.push_back(record(Ticks{9}, HazardCategory::SharpObject, 9, Criticality::High));
    t.push_back(truth(HazardCategory::SharpObject, Level::Low));
    trace.push_back(quiet(Ticks{10}));
    t.push_back(std::nullopt);
    EXPECT_DOUBLE_EQ(message_alignment(trace, t), 0.8);
}

TEST(MessageAlignment, VacuousWithoutHazards) {
    std::vector<TraceRecord> trace{quiet(Ticks{0})};
    EXPECT_DOUBLE_EQ(message_alignment(trace, GroundTruth{std::nullopt}), 1.0);
}

TEST(CoordinationSuccess, NineOfTen) {
    std::vector<TraceRecord> trace;
    std::vector<DeliveryBatch> batches;
    for (std::size_t i = 0; i < 10; ++i) {
        trace.push_back(record(Ticks{static_cast<std::int64_t>(i)}, HazardCategory::Distress, 6, Criticality::Medium));
        batches.push_back(full_delivery(i, Criticality::Medium));
    }
    batches[3].records[1].success = false;
    trace.push_back(quiet(Ticks{20}));
    EXPECT_DOUBLE_EQ(coordination_success(batches, trace), 0.9);
}

TEST(CoordinationSuccess, ExtraOrMissingChannelFails) {
    std::vector<TraceRecord> trace{record(Ticks{0}, HazardCategory::Waste, 2, Criticality::Low),
                                   record(Ticks{1}, HazardCategory::Waste, 9, Criticality::High)};
    std::vector<DeliveryBatch> batches{full_delivery(0, Criticality::Medium), full_delivery(1, Criticality::Medium)};
    EXPECT_DOUBLE_EQ(coordination_success(batches, trace), 0.0);
    std::vector<DeliveryBatch> none;
    EXPECT_DOUBLE_EQ(coordination_success(none, trace), 0.0);
}

TEST(CoordinationSuccess, OrphanBatchRejected) {
    std::vector<TraceRecord> trace{quiet(Ticks{0})};
    std::vector<DeliveryBatch> batches{full_delivery(0, Criticality::Low)};
    EXPECT_THROW(coordination_success(batches, trace), ValidationError);
    std::vector<DeliveryBatch> none;
    EXPECT_DOUBLE_EQ(coordination_success(none, trace), 1.0);
}

TEST(ObjectiveLoss, PerfectRunIsZero) {
    std::vector<TraceRecord> trace{record(seconds(12), HazardCategory::SharpObject, 9, Criticality::High),
                                   quiet(seconds(24))};
    GroundTruth t{truth(HazardCategory::SharpObject, Level::High), std::nullopt};
    const auto loss = objective_loss(trace, t);
    EXPECT_EQ(loss, (LossAccount{0, 0, 1, 0}));
}

TEST(ObjectiveLoss, MissedHighWeighsFour) {
    std::vector<TraceRecord> trace{quiet(seconds(12))};
    GroundTruth t{truth(HazardCategory::PersonDown, Level::High)};
    EXPECT_DOUBLE_EQ(objective_loss(trace, t).l_hazard, 4.0);
    auto late = record(seconds(12), HazardCategory::PersonDown, 9, Criticality::High);
    late.t_total = seconds(21);
    std::vector<TraceRecord> trace2{late};
    EXPECT_DOUBLE_EQ(objective_loss(trace2, t).l_hazard, 4.0);
}

TEST(ObjectiveLoss, AlarmOnLowTruthAndRepeatsAreFatigue) {
    std::vector<TraceRecord> trace{record(seconds(12), HazardCategory::SharpObject, 9, Criticality::High),
                                   record(seconds(15), HazardCategory::SharpObject, 9, Criticality::High),
                                   record(seconds(60), HazardCategory::SharpObject, 9, Criticality::High)};
    GroundTruth t(3, truth(HazardCategory::SharpObject, Level::Low));
    LossConfig cfg;
    cfg.lambda = 2.0;
    const auto loss = objective_loss(trace, t, cfg);
    // three unneeded alarms, one repeat inside the window, three misses at weight 1
    EXPECT_DOUBLE_EQ(loss.l_fatigue, 4.0);
    EXPECT_DOUBLE_EQ(loss.l_hazard, 3.0);
    EXPECT_DOUBLE_EQ(loss.total, 3.0 + 2.0 * 4.0);
    cfg.lambda = 0;
    EXPECT_THROW(objective_loss(trace, t, cfg), ValidationError);
}

TEST(ObjectiveLoss, ObjectBaselineOnKitchenKnifeAccruesFatigue) {
    const auto suite = builtin_suite();
    const Scenario& s2 = suite[1];
    ASSERT_EQ(s2.id, "S2-knife-kitchen");
    ObjectBaselineBackend baseline;
    const auto run = run_scenario(s2, baseline, SuiteConfig{});
    EXPECT_GE(run.loss.l_fatigue, 1.0);
    ScriptedBackend scripted;
    EXPECT_DOUBLE_EQ(run_scenario(s2, scripted, SuiteConfig{}).loss.total, 0.0);
}

TEST(Oracle, CleanTraceHasNoViolations) {
    std::vector<TraceRecord> trace;
    for (int h = 0; h <= 1000; h += 7) {
        const double rho = h / 100.0;
        const Criticality k = rho < 5 ? Criticality::Low : (rho < 8 ? Criticality::Medium : Criticality::High);
        trace.push_back(record(Ticks{h}, HazardCategory::Waste, rho, k));
        trace.push_back(quiet(Ticks{h}));
    }
    EXPECT_TRUE(oracle_verify(trace).empty());
}

TEST(Oracle, PlantedAlarmFault) {
    std::vector<TraceRecord> trace{record(Ticks{0}, HazardCategory::Waste, 2, Criticality::Low),
                                   record(Ticks{1}, HazardCategory::Waste, 9, Criticality::High)};
    trace[0].alarm = true;
    const auto v = oracle_verify(trace);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "alarm-constraint");
    EXPECT_EQ(v[0].step, 0u);
}

TEST(Oracle, PlantedRecipientFault) {
    std::vector<TraceRecord> trace{record(Ticks{0}, HazardCategory::Waste, 9, Criticality::High)};
    trace[0].recipients = RecipientSet{};
    trace[0].recipients.insert(Channel::Nearby);
    trace[0].recipients.insert(Channel::Remote);
    const auto v = oracle_verify(trace);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "recipient-routing");
}

TEST(Oracle, OtherRules) {
    auto band = record(Ticks{0}, HazardCategory::Waste, 7.99, Criticality::High);
    band.chi = Character::Alert;
    band.gamma = 7.99;
    auto v = oracle_verify(std::vector<TraceRecord>{band});
    // level disagrees with rho; tone, character, recipients follow rho's band while k says High
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].rule, "risk-banding");

    auto tone = record(Ticks{0}, HazardCategory::Waste, 6, Criticality::Medium);
    tone.gamma = 9;
    v = oracle_verify(std::vector<TraceRecord>{tone});
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].rule, "tone-coupling");
    EXPECT_EQ(v[1].rule, "tone-band");

    auto range = record(Ticks{0}, HazardCategory::Waste, 11, Criticality::High);
    v = oracle_verify(std::vector<TraceRecord>{range});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "risk-range");

    auto factors = record(Ticks{0}, HazardCategory::Waste, 2, Criticality::Low);
    factors.factors = factors_for_level(Level::High);
    v = oracle_verify(std::vector<TraceRecord>{factors});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "factor-coherence");

    auto quiet_alarm = quiet(Ticks{0});
    quiet_alarm.alarm = true;
    quiet_alarm.recipients.insert(Channel::Nearby);
    v = oracle_verify(std::vector<TraceRecord>{quiet_alarm});
    EXPECT_EQ(v.size(), 2u);
}

TEST(Oracle, MalformedRecordThrows) {
    auto r = record(Ticks{0}, HazardCategory::Waste, 2, Criticality::Low);
    r.gamma.reset();
    EXPECT_THROW(oracle_verify(std::vector<TraceRecord>{r}), TraceFormatError);
    auto q = quiet(Ticks{0});
    q.rho = 3;
    EXPECT_THROW(oracle_verify(std::vector<TraceRecord>{q}), TraceFormatError);
}

TEST(OracleFuzz, SingleFieldMutationsAreCaught) {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> hundredths(0, 1000);
    std::uniform_int_distribution<int> field(0, 4);
    for (int i = 0; i < 5000; ++i) {
        const double rho = hundredths(rng) / 100.0;
        const Criticality k = rho < 5 ? Criticality::Low : (rho < 8 ? Criticality::Medium : Criticality::High);
        auto r = record(Ticks{i}, HazardCategory::Distress, rho, k);
        ASSERT_TRUE(oracle_verify(std::vector<TraceRecord>{r}).empty());
        const int other = (static_cast<int>(k) + 1 + static_cast<int>(rng() % 2)) % 3;
        switch (field(rng)) {
        case 0: r.k = static_cast<Criticality>(other); break;
        case 1: r.chi = static_cast<Character>(other); break;
        case 2: r.alarm = !r.alarm; break;
        case 3: r.recipients = RecipientSet{}; break;
        case 4: r.gamma = *r.gamma + 0.25; break;
        }
        ASSERT_FALSE(oracle_verify(std::vector<TraceRecord>{r}).empty()) << i;
    }
}
