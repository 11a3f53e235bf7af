#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/errors.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hazcomm {

struct Entity {
    std::string object_label;
    std::string attribute;

    friend bool operator==(const Entity&, const Entity&) = default;
};

/// Symbolic observation: the caption stands in for the scene description,
/// the entity list for salient detections.
struct Observation {
    Ticks timestamp{0};
    std::string scene_caption;
    std::vector<Entity> salient_entities;
    EnvContext env;

    friend bool operator==(const Observation&, const Observation&) = default;
};

inline void validate(const Observation& obs) {
    if (obs.scene_caption.empty()) throw ValidationError("observation caption must not be empty");
}

struct HazardAssessment {
    HazardCategory category = HazardCategory::UnattendedItem;
    ContextFactors factors;
    RiskScore risk{0.0};
    std::string rationale;

    friend bool operator==(const HazardAssessment&, const HazardAssessment&) = default;
};

/// Rejects assessments whose risk band disagrees with the declared
/// criticality level, or that carry no rationale.
inline void validate(const HazardAssessment& a) {
    if (a.rationale.empty()) throw ValidationError("assessment rationale must not be empty");
    if (band_risk(a.risk) != a.factors.criticality_level) {
        std::ostringstream os;
        os << "risk " << a.risk.value() << " falls in band " << to_string(band_risk(a.risk))
           << " but criticality level is " << to_string(a.factors.criticality_level);
        throw ValidationError(os.str());
    }
}

/// Canonical factor triple for a level, used by backends that only decide
/// the level.
inline ContextFactors factors_for_level(Level d) {
    switch (d) {
    case Level::Low: return {Level::Low, TimeSensitivity::NearFuture, Feasibility::Robot};
    case Level::Medium: return {Level::Medium, TimeSensitivity::Soon, Feasibility::PoC};
    case Level::High: return {Level::High, TimeSensitivity::Immediate, Feasibility::HelpNeeded};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Backend contract
// ---------------------------------------------------------------------------

/// Maps one observation to an optional assessment. An empty result means
/// "no hazard"; failures are thrown as BackendError subclasses.
class PerceptionBackend {
  public:
    virtual ~PerceptionBackend() = default;

    std::optional<HazardAssessment> assess(const Observation& obs, Clock& clock) {
        validate(obs);
        auto result = do_assess(obs, clock);
        if (result) validate(*result);
        return result;
    }

    std::optional<HazardAssessment> assess(const Observation& obs) {
        VirtualClock clock;
        return assess(obs, clock);
    }

    [[nodiscard]] virtual std::string name() const = 0;

  private:
    virtual std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) = 0;
};

namespace detail {

/// Case-insensitive glob with `*` and `?`.
inline bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    auto eq = [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    };
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || eq(pattern[p], text[t]))) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Rule table (scripted, context-aware backend)
// ---------------------------------------------------------------------------

struct RuleMatch {
    std::string object_pattern = "*";
    std::string attribute_pattern = "*";
    std::optional<LocationType> location;
    std::optional<CrowdDensity> crowd;
    std::optional<bool> vulnerable;

    [[nodiscard]] bool matches(const Entity& e, const EnvContext& env) const {
        return detail::glob_match(object_pattern, e.object_label) &&
               detail::glob_match(attribute_pattern, e.attribute) &&
               (!location || *location == env.location_type) && (!crowd || *crowd == env.crowd_density) &&
               (!vulnerable || *vulnerable == env.vulnerable_present);
    }

    [[nodiscard]] bool is_wildcard() const {
        return object_pattern == "*" && attribute_pattern == "*" && !location && !crowd && !vulnerable;
    }
};

struct RuleEmission {
    HazardCategory category = HazardCategory::UnattendedItem;
    ContextFactors factors;
    RiskScore risk{0.0};
};

struct Rule {
    RuleMatch match;
    /// Empty for rules that mark an entity as benign (`=> none`).
    std::optional<RuleEmission> emit;
    std::size_t source_line = 0;
};

inline constexpr std::string_view kBuiltinRules = R"(# object|attribute|location|crowd|vulnerable => category,d,tau,phi,rho
# First match wins per entity; the entity whose rule ranks first decides.
chair|*|*|*|* => none
table|*|*|*|* => none
bag|carried|*|*|* => none

knife|in-use-cooking|Kitchen|*|* => SharpObject,Low,NearFuture,Robot,2
knife|*|Kitchen|*|true => SharpObject,Medium,Soon,PoC,6
knife|*|Kitchen|*|* => SharpObject,Low,NearFuture,Robot,3
knife|*|*|*|* => SharpObject,High,Immediate,HelpNeeded,9
*blade*|*|Kitchen|*|* => SharpObject,Low,NearFuture,Robot,3
*blade*|*|*|*|* => SharpObject,High,Immediate,HelpNeeded,8.5

person|*posture-abnormal*|*|*|* => PersonDown,High,Immediate,HelpNeeded,8
person|*on-floor*|*|*|* => PersonDown,High,Immediate,HelpNeeded,8
person|*posture-occluded*|*|*|* => PersonDown,Medium,Soon,PoC,6
person|*panic*|*|Dense|* => Distress,High,Immediate,HelpNeeded,9
person|*panic*|*|*|* => Distress,High,Immediate,HelpNeeded,8
person|*agitated*|*|*|* => Distress,Medium,Soon,PoC,6
person|*|*|*|* => none

*gun*|*toy*|*|*|* => SuspiciousItem,Low,NearFuture,PoC,3
toy*|*|*|*|* => SuspiciousItem,Low,NearFuture,PoC,2
*gun*|*|*|*|* => SuspiciousItem,High,Immediate,HelpNeeded,9

trash*|*chemical*|*|*|* => Waste,High,Immediate,HelpNeeded,8
garbage*|*chemical*|*|*|* => Waste,High,Immediate,HelpNeeded,8
trash*|*spill*|*|Dense|* => Waste,Medium,Soon,PoC,5
trash*|*|*|*|* => Waste,Low,NearFuture,Robot,2
garbage*|*|*|*|* => Waste,Low,NearFuture,Robot,2

bag|unattended|RestrictedArea|*|* => UnattendedItem,High,Immediate,HelpNeeded,8
bag|unattended|*|Dense|* => UnattendedItem,Medium,Soon,PoC,6
bag|*|*|*|* => UnattendedItem,Medium,Soon,PoC,5

*|*|*|*|* => UnattendedItem,Medium,Soon,PoC,5
)";

class RuleTable {
  public:
    /// Parses line records
    /// `<object>|<attribute>|<location|*>|<crowd|*>|<vulnerable|*> => <category>,<d>,<tau>,<phi>,<rho>`
    /// or `... => none`. The last rule must be an all-wildcard hazard rule.
    static RuleTable parse(std::string_view text) {
        RuleTable table;
        std::istringstream in{std::string(text)};
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            auto line = detail::trim(raw);
            if (line.empty() || line.front() == '#') continue;
            table.rules_.push_back(parse_rule(line, line_no));
        }
        table.check();
        return table;
    }

    static const RuleTable& builtin() {
        static const RuleTable table = parse(kBuiltinRules);
        return table;
    }

    [[nodiscard]] const std::vector<Rule>& rules() const { return rules_; }

  private:
    [[noreturn]] static void fail(std::size_t line, const std::string& what) {
        throw ConfigError("rule table line " + std::to_string(line) + ": " + what);
    }

    static Rule parse_rule(std::string_view line, std::size_t line_no) {
        auto arrow = line.find("=>");
        if (arrow == std::string_view::npos) fail(line_no, "missing '=>'");
        auto lhs = detail::split(detail::trim(line.substr(0, arrow)), '|');
        auto rhs = detail::trim(line.substr(arrow + 2));
        if (lhs.size() != 5) fail(line_no, "expected 5 match fields");

        Rule rule;
        rule.source_line = line_no;
        rule.match.object_pattern = std::string(detail::trim(lhs[0]));
        rule.match.attribute_pattern = std::string(detail::trim(lhs[1]));
        if (rule.match.object_pattern.empty() || rule.match.attribute_pattern.empty())
            fail(line_no, "empty pattern");

        auto field = [&](std::string_view f) { return detail::trim(f); };
        if (auto f = field(lhs[2]); f != "*") {
            auto v = try_parse<LocationType>(f);
            if (!v) fail(line_no, "unknown location '" + std::string(f) + "'");
            rule.match.location = v;
        }
        if (auto f = field(lhs[3]); f != "*") {
            auto v = try_parse<CrowdDensity>(f);
            if (!v) fail(line_no, "unknown crowd density '" + std::string(f) + "'");
            rule.match.crowd = v;
        }
        if (auto f = field(lhs[4]); f != "*") {
            if (detail::iequals(f, "true") || detail::iequals(f, "yes")) {
                rule.match.vulnerable = true;
            } else if (detail::iequals(f, "false") || detail::iequals(f, "no")) {
                rule.match.vulnerable = false;
            } else {
                fail(line_no, "vulnerable must be true, false or *");
            }
        }

        if (detail::iequals(rhs, "none")) return rule;

        auto parts = detail::split(rhs, ',');
        if (parts.size() != 5) fail(line_no, "expected <category>,<d>,<tau>,<phi>,<rho>");
        auto category = try_parse<HazardCategory>(field(parts[0]));
        auto d = try_parse<Level>(field(parts[1]));
        auto tau = try_parse<TimeSensitivity>(field(parts[2]));
        auto phi = try_parse<Feasibility>(field(parts[3]));
        if (!category || !d || !tau || !phi) fail(line_no, "unknown enumeration value in emission");

        double rho_value = 0.0;
        try {
            std::size_t used = 0;
            std::string rho_text(field(parts[4]));
            rho_value = std::stod(rho_text, &used);
            if (used != rho_text.size()) fail(line_no, "bad risk value");
        } catch (const std::logic_error&) {
            fail(line_no, "bad risk value");
        }
        std::optional<RiskScore> rho;
        try {
            rho.emplace(rho_value);
        } catch (const ValidationError& e) {
            fail(line_no, e.what());
        }
        if (band_risk(*rho) != *d) {
            fail(line_no, "risk " + std::string(field(parts[4])) + " is outside the band of level " +
                              std::string(to_string(*d)));
        }
        rule.emit = RuleEmission{*category, ContextFactors{*d, *tau, *phi}, *rho};
        return rule;
    }

    void check() const {
        if (rules_.empty()) throw ConfigError("rule table is empty");
        const Rule& last = rules_.back();
        if (!last.match.is_wildcard() || !last.emit) {
            fail(last.source_line, "table must end with an all-wildcard hazard rule");
        }
    }

    std::vector<Rule> rules_;
};

/// First-match evaluation. Each entity takes its first matching rule;
/// entities matched by a `none` rule are ignored; the hazard-bearing entity
/// whose rule appears earliest decides.
inline std::optional<HazardAssessment> scripted_assess(const RuleTable& table, const Observation& obs) {
    const auto& rules = table.rules();
    std::optional<std::size_t> best_rule;
    const Entity* best_entity = nullptr;
    for (const auto& e : obs.salient_entities) {
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (!rules[i].match.matches(e, obs.env)) continue;
            if (rules[i].emit && (!best_rule || i < *best_rule)) {
                best_rule = i;
                best_entity = &e;
            }
            break;
        }
    }
    if (!best_rule) return std::nullopt;

    const Rule& rule = rules[*best_rule];
    std::ostringstream why;
    why << "rule@" << rule.source_line << ": " << best_entity->object_label << " (" << best_entity->attribute
        << ") in " << to_string(obs.env.location_type) << ", crowd " << to_string(obs.env.crowd_density)
        << (obs.env.vulnerable_present ? ", vulnerable present" : "");
    return HazardAssessment{rule.emit->category, rule.emit->factors, rule.emit->risk, why.str()};
}

class ScriptedBackend final : public PerceptionBackend {
  public:
    explicit ScriptedBackend(RuleTable table = RuleTable::builtin(), Ticks latency = seconds(9.5))
        : table_(std::move(table)), latency_(latency) {}

    [[nodiscard]] std::string name() const override { return "scripted"; }
    [[nodiscard]] const RuleTable& table() const { return table_; }

  private:
    std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) override {
        clock.sleep_for(latency_);
        return scripted_assess(table_, obs);
    }

    RuleTable table_;
    Ticks latency_;
};

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

struct ObjectIdentity {
    std::string_view pattern;
    std::optional<HazardCategory> category; // empty: benign object
    Level level;
};

/// Fixed object-identity catalogue shared by both baselines.
inline constexpr std::array<ObjectIdentity, 11> kObjectCatalog{{
    {"chair", std::nullopt, Level::Low},
    {"table", std::nullopt, Level::Low},
    {"knife", HazardCategory::SharpObject, Level::High},
    {"*blade*", HazardCategory::SharpObject, Level::High},
    {"person", HazardCategory::PersonDown, Level::High},
    {"*gun*", HazardCategory::SuspiciousItem, Level::High},
    {"toy*", HazardCategory::SuspiciousItem, Level::Low},
    {"trash*", HazardCategory::Waste, Level::Low},
    {"garbage*", HazardCategory::Waste, Level::Low},
    {"bag", HazardCategory::UnattendedItem, Level::Medium},
    {"*", HazardCategory::UnattendedItem, Level::Medium},
}};

namespace detail {
inline const ObjectIdentity& identify(const Entity& e) {
    for (const auto& id : kObjectCatalog) {
        if (glob_match(id.pattern, e.object_label)) return id;
    }
    return kObjectCatalog.back();
}

/// Highest-level hazard-bearing entity; first one wins ties.
inline std::optional<std::pair<const Entity*, const ObjectIdentity*>> strongest_object(const Observation& obs) {
    std::optional<std::pair<const Entity*, const ObjectIdentity*>> best;
    for (const auto& e : obs.salient_entities) {
        const auto& id = identify(e);
        if (!id.category) continue;
        if (!best || id.level > best->second->level) best = std::pair{&e, &id};
    }
    return best;
}
} // namespace detail

/// Criticality by object identity alone; the environment is ignored.
inline std::optional<HazardAssessment> baseline_object_assess(const Observation& obs) {
    auto hit = detail::strongest_object(obs);
    if (!hit) return std::nullopt;
    const auto& [entity, id] = *hit;
    return HazardAssessment{*id->category, factors_for_level(id->level), nominal_risk(id->level),
                            "object identity: " + entity->object_label};
}

inline Level location_level(LocationType loc) {
    switch (loc) {
    case LocationType::Kitchen: return Level::Low;
    case LocationType::Office: return Level::Medium;
    case LocationType::Corridor:
    case LocationType::PublicArea:
    case LocationType::RestrictedArea: return Level::High;
    }
    return Level::High;
}

/// Criticality by location lookup alone; category still comes from object
/// identity.
inline std::optional<HazardAssessment> baseline_location_assess(const Observation& obs) {
    auto hit = detail::strongest_object(obs);
    if (!hit) return std::nullopt;
    const Level level = location_level(obs.env.location_type);
    return HazardAssessment{*hit->second->category, factors_for_level(level), nominal_risk(level),
                            "location mapping: " + std::string(to_string(obs.env.location_type))};
}

class ObjectBaselineBackend final : public PerceptionBackend {
  public:
    explicit ObjectBaselineBackend(Ticks latency = seconds(9.5)) : latency_(latency) {}
    [[nodiscard]] std::string name() const override { return "object-baseline"; }

  private:
    std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) override {
        clock.sleep_for(latency_);
        return baseline_object_assess(obs);
    }
    Ticks latency_;
};

class LocationBaselineBackend final : public PerceptionBackend {
  public:
    explicit LocationBaselineBackend(Ticks latency = seconds(9.5)) : latency_(latency) {}
    [[nodiscard]] std::string name() const override { return "location-baseline"; }

  private:
    std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) override {
        clock.sleep_for(latency_);
        return baseline_location_assess(obs);
    }
    Ticks latency_;
};

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

struct FaultProfile {
    Ticks added_delay{0};
    double failure_rate = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const FaultProfile&, const FaultProfile&) = default;
};

inline void validate(const FaultProfile& p) {
    if (p.added_delay < Ticks{0}) throw ValidationError("fault profile delay must be non-negative");
    if (!(p.failure_rate >= 0.0 && p.failure_rate <= 1.0))
        throw ValidationError("fault profile failure rate must lie in [0, 1]");
}

/// Delays every call by `added_delay`, then fails it with probability
/// `failure_rate`. The failure sequence is a pure function of the seed.
class FaultInjectingBackend final : public PerceptionBackend {
  public:
    FaultInjectingBackend(std::shared_ptr<PerceptionBackend> inner, FaultProfile profile)
        : inner_(std::move(inner)), profile_(profile), rng_(profile.seed) {
        if (!inner_) throw ConfigError("fault injection needs an inner backend");
        validate(profile_);
    }

    [[nodiscard]] std::string name() const override { return inner_->name(); }
    [[nodiscard]] const FaultProfile& profile() const { return profile_; }

  private:
    std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) override {
        clock.sleep_for(profile_.added_delay);
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        if (u < profile_.failure_rate) throw InjectedFailure("injected backend failure");
        return inner_->assess(obs, clock);
    }

    std::shared_ptr<PerceptionBackend> inner_;
    FaultProfile profile_;
    std::mt19937_64 rng_;
};

inline std::shared_ptr<PerceptionBackend> with_fault_injection(std::shared_ptr<PerceptionBackend> inner,
                                                               FaultProfile profile) {
    return std::make_shared<FaultInjectingBackend>(std::move(inner), profile);
}

} // namespace hazcomm
