#include "hazcomm/core_model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace hazcomm;

TEST(BandRisk, BandsAndEndpoints) {
    EXPECT_EQ(band_risk(RiskScore{3}), Criticality::Low);
    EXPECT_EQ(band_risk(RiskScore{0}), Criticality::Low);
    EXPECT_EQ(band_risk(RiskScore{10}), Criticality::High);
    EXPECT_EQ(band_risk(RiskScore{5}), Criticality::Medium);
}

TEST(BandRisk, HalfOpenGapValues) {
    EXPECT_EQ(band_risk(RiskScore{4.5}), Criticality::Low);
    EXPECT_EQ(band_risk(RiskScore{7.5}), Criticality::Medium);
    EXPECT_EQ(band_risk(RiskScore{7.999}), Criticality::Medium);
    EXPECT_EQ(band_risk(RiskScore{8.0}), Criticality::High);
}

TEST(BandRisk, OutOfRangeRejected) {
    EXPECT_THROW(RiskScore{-0.01}, ValidationError);
    EXPECT_THROW(RiskScore{10.01}, ValidationError);
    EXPECT_THROW(RiskScore{std::nan("")}, ValidationError);
}

TEST(BandRisk, SweepMatchesIndependentOracle) {
    for (int i = 0; i <= 1000; ++i) {
        const double rho = i / 100.0;
        const auto k = band_risk(RiskScore{rho});
        ASSERT_EQ(k, oracle::band_by_hundredths(rho)) << rho;
        ASSERT_EQ(alarm_for(k), rho >= 5.0) << rho;
        ASSERT_TRUE(tone_in_band(tone_for(RiskScore{rho}), k)) << rho;
    }
}

TEST(ToneFor, CoupledToRisk) {
    EXPECT_DOUBLE_EQ(tone_for(RiskScore{9}), 9.0);
    EXPECT_DOUBLE_EQ(tone_for(RiskScore{0}), 0.0);
    EXPECT_DOUBLE_EQ(tone_for(RiskScore{5}), 5.0);
    EXPECT_TRUE(tone_in_band(5.0, band_risk(RiskScore{5})));
    EXPECT_EQ(band_risk(RiskScore{5}), Criticality::Medium);
}

TEST(CharacterFor, Mapping) {
    EXPECT_EQ(character_for(Criticality::Low), Character::Inquiry);
    EXPECT_EQ(character_for(Criticality::Medium), Character::Alert);
    EXPECT_EQ(character_for(Criticality::High), Character::Urgent);
}

TEST(CharacterFor, Bijection) {
    std::set<Character> seen;
    for (auto k : all_values<Criticality>()) seen.insert(character_for(k));
    EXPECT_EQ(seen.size(), 3u);
}

TEST(AlarmFor, OnlyNonLow) {
    EXPECT_FALSE(alarm_for(Criticality::Low));
    EXPECT_TRUE(alarm_for(Criticality::Medium));
    EXPECT_TRUE(alarm_for(Criticality::High));
}

TEST(RecipientsFor, Table) {
    EXPECT_EQ(recipients_for(Criticality::Low), (RecipientSet{Channel::Nearby}));
    EXPECT_EQ(recipients_for(Criticality::Medium), (RecipientSet{Channel::Nearby, Channel::Remote}));
    EXPECT_EQ(recipients_for(Criticality::High),
              (RecipientSet{Channel::Nearby, Channel::Remote, Channel::Coordination}));
}

TEST(RecipientsFor, Monotone) {
    for (auto a : all_values<Criticality>()) {
        for (auto b : all_values<Criticality>()) {
            if (a <= b) {
                EXPECT_TRUE(recipients_for(a).subset_of(recipients_for(b)));
            }
        }
        EXPECT_FALSE(recipients_for(a).empty());
    }
}

TEST(ComposeMessage, UrgentKnifeInCorridor) {
    const auto text = compose_message(HazardCategory::SharpObject, Criticality::High, {LocationType::Corridor});
    EXPECT_NE(text.find("Urgent"), std::string::npos);
    EXPECT_NE(text.find("Alarm activated"), std::string::npos);
    EXPECT_NE(text.find("the corridor"), std::string::npos);
    EXPECT_NE(text.find("leave the area"), std::string::npos);
}

TEST(ComposeMessage, KitchenKnifeAcknowledgment) {
    const auto text = compose_message(HazardCategory::SharpObject, Criticality::Low, {LocationType::Kitchen});
    EXPECT_NE(text.find("the kitchen"), std::string::npos);
    EXPECT_NE(text.find("store it safely"), std::string::npos);
    EXPECT_EQ(text.find("Alarm"), std::string::npos);
}

TEST(ComposeMessage, TrashIsMaintenance) {
    const auto text = compose_message(HazardCategory::Waste, Criticality::Low, {LocationType::Corridor});
    EXPECT_NE(text.find("Maintenance"), std::string::npos);
    EXPECT_NE(text.find("no action needed"), std::string::npos);
}

TEST(ComposeMessage, MissingTemplateNamesPair) {
    auto table = TemplateTable::parse("Waste|Low|trash in {location}\n");
    try {
        compose_message(table, HazardCategory::SharpObject, Criticality::High, {});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("SharpObject, High"), std::string::npos);
    }
}

TEST(TemplateTable, BuiltinIsComplete) {
    EXPECT_EQ(TemplateTable::builtin().size(), 18u);
    for (auto a : all_values<HazardCategory>())
        for (auto k : all_values<Criticality>()) EXPECT_NE(TemplateTable::builtin().find(a, k), nullptr);
}

TEST(TemplateTable, ShippedDataFileMatchesBuiltin) {
    std::ifstream in(HAZCOMM_DATA_DIR "/templates.txt");
    ASSERT_TRUE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), std::string(kBuiltinTemplates));
}

TEST(TemplateTable, RejectsMalformedLines) {
    EXPECT_THROW(TemplateTable::parse("Waste|Low\n"), ConfigError);
    EXPECT_THROW(TemplateTable::parse("Rubble|Low|x {location}\n"), ConfigError);
    EXPECT_THROW(TemplateTable::parse("Waste|Low|no placeholder\n"), ConfigError);
    EXPECT_THROW(TemplateTable::parse("Waste|Low|   \n"), ConfigError);
}

TEST(AssembleOutput, CanonicalScenarios) {
    auto s1 = assemble_output(HazardCategory::SharpObject, RiskScore{9}, {LocationType::Corridor});
    EXPECT_EQ(s1.criticality, Criticality::High);
    EXPECT_EQ(s1.message.character, Character::Urgent);
    EXPECT_TRUE(s1.alarm);
    EXPECT_EQ(s1.recipients.size(), 3u);

    auto s2 = assemble_output(HazardCategory::SharpObject, RiskScore{2}, {LocationType::Kitchen});
    EXPECT_EQ(s2.message.character, Character::Inquiry);
    EXPECT_FALSE(s2.alarm);
    EXPECT_EQ(s2.recipients, (RecipientSet{Channel::Nearby}));

    auto s3 = assemble_output(HazardCategory::PersonDown, RiskScore{8}, {LocationType::Corridor});
    EXPECT_EQ(s3.message.character, Character::Urgent);
    EXPECT_TRUE(s3.alarm);
    EXPECT_EQ(s3.recipients, recipients_for(Criticality::High));
}

TEST(AssembleOutput, InvariantsAndPurityOverSweep) {
    for (auto a : all_values<HazardCategory>()) {
        for (int i = 0; i <= 100; ++i) {
            const RiskScore rho{i / 10.0};
            const EnvContext env{static_cast<LocationType>(i % 5)};
            const auto out = assemble_output(a, rho, env);
            ASSERT_EQ(out, assemble_output(a, rho, env));
            ASSERT_EQ(out.alarm, out.criticality != Criticality::Low);
            ASSERT_EQ(out.recipients, recipients_for(out.criticality));
            ASSERT_EQ(out.message.character, character_for(out.criticality));
            ASSERT_TRUE(tone_in_band(out.message.tone, out.criticality));
            ASSERT_FALSE(out.message.text.empty());
        }
    }
}

TEST(EnumText, RoundTripAndUnknown) {
    for (auto c : all_values<HazardCategory>()) EXPECT_EQ(parse<HazardCategory>(to_string(c)), c);
    EXPECT_EQ(parse<Level>("high"), Level::High);
    EXPECT_THROW(parse<Level>("Critical"), ValidationError);
}
