#pragma once

// JSON encodings shared by the remote backend, network sinks, trace logs and
// scenario files. Decoders are strict: missing fields and unknown fields are
// both rejected.

#include "hazcomm/core_model.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/perception.hpp"

#include "json.hpp"

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace hazcomm::wire {

using Json = nlohmann::json;

inline void expect_object(const Json& j, std::initializer_list<std::string_view> required,
                          std::initializer_list<std::string_view> optional, std::string_view what) {
    if (!j.is_object()) throw FormatError(std::string(what) + ": expected an object");
    for (auto key : required) {
        if (!j.contains(std::string(key)))
            throw FormatError(std::string(what) + ": missing field '" + std::string(key) + "'");
    }
    for (const auto& [key, _] : j.items()) {
        auto known = [&](std::initializer_list<std::string_view> keys) {
            return std::find(keys.begin(), keys.end(), key) != keys.end();
        };
        if (!known(required) && !known(optional))
            throw FormatError(std::string(what) + ": unknown field '" + key + "'");
    }
}

inline const Json& field(const Json& j, std::string_view key) { return j.at(std::string(key)); }

inline std::string get_string(const Json& j, std::string_view key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw FormatError("field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

inline double get_number(const Json& j, std::string_view key) {
    const Json& v = field(j, key);
    if (!v.is_number()) throw FormatError("field '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

inline std::int64_t get_integer(const Json& j, std::string_view key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) throw FormatError("field '" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
}

inline bool get_bool(const Json& j, std::string_view key) {
    const Json& v = field(j, key);
    if (!v.is_boolean()) throw FormatError("field '" + std::string(key) + "' must be a boolean");
    return v.get<bool>();
}

template <typename E>
E get_enum(const Json& j, std::string_view key) {
    auto text = get_string(j, key);
    if (auto v = try_parse<E>(text)) return *v;
    throw FormatError("field '" + std::string(key) + "': unknown " + std::string(EnumNames<E>::kind) + " '" + text +
                      "'");
}

template <typename E>
std::optional<E> get_optional_enum(const Json& j, std::string_view key) {
    if (!j.contains(std::string(key)) || field(j, key).is_null()) return std::nullopt;
    return get_enum<E>(j, key);
}

template <typename E>
Json enum_or_null(const std::optional<E>& v) {
    return v ? Json(std::string(to_string(*v))) : Json(nullptr);
}

// ---------------------------------------------------------------------------
// Environment / observation
// ---------------------------------------------------------------------------

inline Json encode(const EnvContext& env) {
    return Json{{"location_type", to_string(env.location_type)},
                {"crowd_density", to_string(env.crowd_density)},
                {"vulnerable_present", env.vulnerable_present}};
}

inline EnvContext decode_env(const Json& j) {
    expect_object(j, {"location_type"}, {"crowd_density", "vulnerable_present"}, "env");
    EnvContext env;
    env.location_type = get_enum<LocationType>(j, "location_type");
    if (j.contains("crowd_density")) env.crowd_density = get_enum<CrowdDensity>(j, "crowd_density");
    if (j.contains("vulnerable_present")) env.vulnerable_present = get_bool(j, "vulnerable_present");
    return env;
}

inline Json encode(const Observation& obs) {
    Json entities = Json::array();
    for (const auto& e : obs.salient_entities) {
        entities.push_back(Json{{"object_label", e.object_label}, {"attribute", e.attribute}});
    }
    return Json{{"timestamp", obs.timestamp.count()},
                {"caption", obs.scene_caption},
                {"entities", std::move(entities)},
                {"env", encode(obs.env)}};
}

inline Observation decode_observation(const Json& j) {
    expect_object(j, {"timestamp", "caption", "entities", "env"}, {}, "observation");
    Observation obs;
    obs.timestamp = Ticks{get_integer(j, "timestamp")};
    obs.scene_caption = get_string(j, "caption");
    const Json& entities = field(j, "entities");
    if (!entities.is_array()) throw FormatError("observation: 'entities' must be an array");
    for (const auto& e : entities) {
        expect_object(e, {"object_label", "attribute"}, {}, "entity");
        obs.salient_entities.push_back(Entity{get_string(e, "object_label"), get_string(e, "attribute")});
    }
    obs.env = decode_env(field(j, "env"));
    validate(obs);
    return obs;
}

// ---------------------------------------------------------------------------
// Assessment response
// ---------------------------------------------------------------------------

inline Json encode_response(const std::optional<HazardAssessment>& a) {
    if (!a) return Json{{"no_hazard", true}};
    return Json{{"category", to_string(a->category)},
                {"d", to_string(a->factors.criticality_level)},
                {"tau", to_string(a->factors.time_sensitivity)},
                {"phi", to_string(a->factors.feasibility)},
                {"rho", a->risk.value()},
                {"rationale", a->rationale}};
}

/// Throws FormatError for schema problems and ValidationError when the record
/// parses but breaks an assessment invariant (range, band coherence).
inline std::optional<HazardAssessment> decode_response(const Json& j) {
    if (j.is_object() && j.contains("no_hazard")) {
        expect_object(j, {"no_hazard"}, {}, "response");
        if (!get_bool(j, "no_hazard")) throw FormatError("response: 'no_hazard' must be true when present");
        return std::nullopt;
    }
    expect_object(j, {"category", "d", "tau", "phi", "rho", "rationale"}, {}, "response");
    HazardAssessment a;
    a.category = get_enum<HazardCategory>(j, "category");
    a.factors = ContextFactors{get_enum<Level>(j, "d"), get_enum<TimeSensitivity>(j, "tau"),
                               get_enum<Feasibility>(j, "phi")};
    a.risk = RiskScore{get_number(j, "rho")};
    a.rationale = get_string(j, "rationale");
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// Outgoing alert (network sinks)
// ---------------------------------------------------------------------------

inline Json encode_recipients(const RecipientSet& r) {
    Json out = Json::array();
    for (auto c : r.channels()) out.push_back(std::string(to_string(c)));
    return out;
}

inline RecipientSet decode_recipients(const Json& j) {
    if (!j.is_array()) throw FormatError("recipients must be an array");
    RecipientSet r;
    for (const auto& c : j) {
        if (!c.is_string()) throw FormatError("recipient must be a string");
        auto ch = try_parse<Channel>(c.get<std::string>());
        if (!ch) throw FormatError("unknown recipient channel '" + c.get<std::string>() + "'");
        r.insert(*ch);
    }
    return r;
}

inline Json encode_alert(const CommOutput& out, Ticks tick) {
    return Json{{"tick", tick.count()},
                {"category", enum_or_null(out.category)},
                {"k", to_string(out.criticality)},
                {"rho", out.risk.value()},
                {"gamma", out.message.tone},
                {"chi", to_string(out.message.character)},
                {"text", out.message.text},
                {"recipients", encode_recipients(out.recipients)},
                {"alarm", out.alarm}};
}

struct DecodedAlert {
    Ticks tick;
    CommOutput output;
};

inline DecodedAlert decode_alert(const Json& j) {
    expect_object(j, {"tick", "category", "k", "rho", "gamma", "chi", "text", "recipients", "alarm"}, {}, "alert");
    CommOutput out;
    out.category = get_optional_enum<HazardCategory>(j, "category");
    out.criticality = get_enum<Criticality>(j, "k");
    out.risk = RiskScore{get_number(j, "rho")};
    out.message = MessageTuple{get_string(j, "text"), get_number(j, "gamma"), get_enum<Character>(j, "chi")};
    out.recipients = decode_recipients(field(j, "recipients"));
    out.alarm = get_bool(j, "alarm");
    return DecodedAlert{Ticks{get_integer(j, "tick")}, std::move(out)};
}

} // namespace hazcomm::wire
