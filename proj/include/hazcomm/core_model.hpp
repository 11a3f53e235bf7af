#pragma once

#include "hazcomm/errors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hazcomm {

// ---------------------------------------------------------------------------
// Enumerations and their text names
// ---------------------------------------------------------------------------

enum class HazardCategory : std::uint8_t { SharpObject, PersonDown, Distress, SuspiciousItem, Waste, UnattendedItem };
enum class Level : std::uint8_t { Low, Medium, High };
enum class TimeSensitivity : std::uint8_t { Immediate, Soon, NearFuture };
enum class Feasibility : std::uint8_t { Robot, PoC, HelpNeeded };
enum class LocationType : std::uint8_t { Kitchen, Corridor, PublicArea, RestrictedArea, Office };
enum class CrowdDensity : std::uint8_t { None, Sparse, Dense };
enum class Character : std::uint8_t { Inquiry, Alert, Urgent };
enum class Channel : std::uint8_t { Nearby, Remote, Coordination };

/// Overall criticality k. Shares the three-level scale with the criticality
/// factor d, and is totally ordered Low < Medium < High.
using Criticality = Level;

template <typename E>
struct EnumNames;

template <>
struct EnumNames<HazardCategory> {
    static constexpr std::array<std::string_view, 6> names{"SharpObject", "PersonDown",    "Distress",
                                                           "SuspiciousItem", "Waste", "UnattendedItem"};
    static constexpr std::string_view kind = "hazard category";
};
template <>
struct EnumNames<Level> {
    static constexpr std::array<std::string_view, 3> names{"Low", "Medium", "High"};
    static constexpr std::string_view kind = "criticality";
};
template <>
struct EnumNames<TimeSensitivity> {
    static constexpr std::array<std::string_view, 3> names{"Immediate", "Soon", "NearFuture"};
    static constexpr std::string_view kind = "time sensitivity";
};
template <>
struct EnumNames<Feasibility> {
    static constexpr std::array<std::string_view, 3> names{"Robot", "PoC", "HelpNeeded"};
    static constexpr std::string_view kind = "feasibility";
};
template <>
struct EnumNames<LocationType> {
    static constexpr std::array<std::string_view, 5> names{"Kitchen", "Corridor", "PublicArea", "RestrictedArea",
                                                           "Office"};
    static constexpr std::string_view kind = "location type";
};
template <>
struct EnumNames<CrowdDensity> {
    static constexpr std::array<std::string_view, 3> names{"None", "Sparse", "Dense"};
    static constexpr std::string_view kind = "crowd density";
};
template <>
struct EnumNames<Character> {
    static constexpr std::array<std::string_view, 3> names{"inquiry", "alert", "urgent"};
    static constexpr std::string_view kind = "character";
};
template <>
struct EnumNames<Channel> {
    static constexpr std::array<std::string_view, 3> names{"nearby", "remote", "coordination"};
    static constexpr std::string_view kind = "channel";
};

template <typename E>
constexpr std::string_view to_string(E e) {
    return EnumNames<E>::names[static_cast<std::size_t>(e)];
}

template <typename E>
constexpr std::array<E, EnumNames<E>::names.size()> all_values() {
    std::array<E, EnumNames<E>::names.size()> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
    return out;
}

namespace detail {
inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}
} // namespace detail

/// Case-insensitive lookup; nullopt for unknown names.
template <typename E>
std::optional<E> try_parse(std::string_view text) {
    const auto& names = EnumNames<E>::names;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (detail::iequals(names[i], text)) return static_cast<E>(i);
    }
    return std::nullopt;
}

template <typename E>
E parse(std::string_view text) {
    if (auto v = try_parse<E>(text)) return *v;
    throw ValidationError("unknown " + std::string(EnumNames<E>::kind) + " '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

struct ContextFactors {
    Level criticality_level = Level::Low;
    TimeSensitivity time_sensitivity = TimeSensitivity::NearFuture;
    Feasibility feasibility = Feasibility::Robot;

    friend bool operator==(const ContextFactors&, const ContextFactors&) = default;
};

struct EnvContext {
    LocationType location_type = LocationType::Corridor;
    CrowdDensity crowd_density = CrowdDensity::None;
    bool vulnerable_present = false;

    friend bool operator==(const EnvContext&, const EnvContext&) = default;
};

/// Continuous risk score in [0, 10].
class RiskScore {
  public:
    static constexpr double kMin = 0.0;
    static constexpr double kMax = 10.0;

    explicit RiskScore(double value) : value_(value) {
        if (!(value >= kMin && value <= kMax)) {
            std::ostringstream os;
            os << "risk score " << value << " outside [0, 10]";
            throw ValidationError(os.str());
        }
    }

    [[nodiscard]] double value() const noexcept { return value_; }

    friend bool operator==(const RiskScore&, const RiskScore&) = default;
    friend auto operator<=>(const RiskScore&, const RiskScore&) = default;

  private:
    double value_;
};

/// Set over {nearby, remote, coordination}; iteration order is fixed.
class RecipientSet {
  public:
    RecipientSet() = default;
    RecipientSet(std::initializer_list<Channel> channels) {
        for (auto c : channels) insert(c);
    }

    void insert(Channel c) { bits_ |= bit(c); }
    [[nodiscard]] bool contains(Channel c) const { return (bits_ & bit(c)) != 0; }
    [[nodiscard]] bool empty() const { return bits_ == 0; }
    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(contains(Channel::Nearby)) + contains(Channel::Remote) +
               contains(Channel::Coordination);
    }
    [[nodiscard]] bool subset_of(const RecipientSet& other) const { return (bits_ & ~other.bits_) == 0; }

    /// Members in delivery order nearby -> remote -> coordination.
    [[nodiscard]] std::vector<Channel> channels() const {
        std::vector<Channel> out;
        for (auto c : all_values<Channel>()) {
            if (contains(c)) out.push_back(c);
        }
        return out;
    }

    friend bool operator==(const RecipientSet&, const RecipientSet&) = default;

  private:
    static std::uint8_t bit(Channel c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
    std::uint8_t bits_ = 0;
};

struct MessageTuple {
    std::string text;
    double tone = 0.0;
    Character character = Character::Inquiry;

    friend bool operator==(const MessageTuple&, const MessageTuple&) = default;
};

struct CommOutput {
    /// Absent for fallback outputs, where no fresh assessment exists.
    std::optional<HazardCategory> category;
    MessageTuple message;
    RecipientSet recipients;
    bool alarm = false;
    Criticality criticality = Criticality::Low;
    RiskScore risk{0.0};

    friend bool operator==(const CommOutput&, const CommOutput&) = default;
};

// ---------------------------------------------------------------------------
// Policy functions
// ---------------------------------------------------------------------------

/// Lower edges of the Medium and High bands. Bands are half-open:
/// [0,5) Low, [5,8) Medium, [8,10] High.
inline constexpr double kMediumFloor = 5.0;
inline constexpr double kHighFloor = 8.0;

inline Criticality band_risk(RiskScore rho) {
    const double v = rho.value();
    if (v >= kHighFloor) return Criticality::High;
    if (v >= kMediumFloor) return Criticality::Medium;
    return Criticality::Low;
}

inline double tone_for(RiskScore rho) { return rho.value(); }

/// Whether a tone value falls inside the band assigned to `k`.
inline bool tone_in_band(double tone, Criticality k) {
    switch (k) {
    case Criticality::Low: return tone >= 0.0 && tone < kMediumFloor;
    case Criticality::Medium: return tone >= kMediumFloor && tone < kHighFloor;
    case Criticality::High: return tone >= kHighFloor && tone <= RiskScore::kMax;
    }
    return false;
}

inline Character character_for(Criticality k) {
    switch (k) {
    case Criticality::Low: return Character::Inquiry;
    case Criticality::Medium: return Character::Alert;
    case Criticality::High: return Character::Urgent;
    }
    return Character::Urgent;
}

inline bool alarm_for(Criticality k) { return k != Criticality::Low; }

inline RecipientSet recipients_for(Criticality k) {
    switch (k) {
    case Criticality::Low: return {Channel::Nearby};
    case Criticality::Medium: return {Channel::Nearby, Channel::Remote};
    case Criticality::High: return {Channel::Nearby, Channel::Remote, Channel::Coordination};
    }
    return {};
}

/// Representative risk inside each band, used where a score has to be
/// synthesised from a level alone (baselines, fallback).
inline RiskScore nominal_risk(Criticality k) {
    switch (k) {
    case Criticality::Low: return RiskScore{2.0};
    case Criticality::Medium: return RiskScore{6.0};
    case Criticality::High: return RiskScore{9.0};
    }
    return RiskScore{9.0};
}

inline std::string_view location_phrase(LocationType loc) {
    switch (loc) {
    case LocationType::Kitchen: return "the kitchen";
    case LocationType::Corridor: return "the corridor";
    case LocationType::PublicArea: return "the public area";
    case LocationType::RestrictedArea: return "the restricted area";
    case LocationType::Office: return "the office";
    }
    return "the area";
}

// ---------------------------------------------------------------------------
// Message templates
// ---------------------------------------------------------------------------

inline constexpr std::string_view kLocationPlaceholder = "{location}";

inline constexpr std::string_view kBuiltinTemplates = R"(# hazard|criticality|template
SharpObject|Low|I see a knife in {location}. It looks like it is in normal use; please remember to store it safely when you are done.
SharpObject|Medium|Attention: a sharp object has been left in {location}. Please secure it or move it out of reach. Alarm active.
SharpObject|High|Urgent: a knife has been detected in {location}. Keep your distance and leave the area now. Alarm activated and authorities notified.
PersonDown|Low|I noticed someone resting on the floor in {location}. Are you okay? Let me know if you need assistance.
PersonDown|Medium|Attention: a person appears to be down in {location}. Please check on them. Alarm active and staff notified.
PersonDown|High|Urgent: a person is down in {location}. Nearby individuals, check breathing and stay with them; emergency responders have been notified with this location. Alarm activated.
Distress|Low|Is everything alright in {location}? I can call for help if anyone needs it.
Distress|Medium|Attention: signs of distress detected in {location}. Please stay calm; a staff member is on the way. Alarm active.
Distress|High|Urgent: people in distress in {location}. Move calmly toward the nearest exit and follow staff instructions; responders have been alerted with a situation summary. Alarm activated.
SuspiciousItem|Low|I see an item that looks like a toy or replica in {location}. Could the owner please collect it?
SuspiciousItem|Medium|Attention: a suspicious item has been detected in {location}. Do not touch it; security has been informed. Alarm active.
SuspiciousItem|High|Urgent: a possible weapon has been detected in {location}. Leave the area immediately and do not approach; authorities have been notified. Alarm activated.
Waste|Low|Maintenance note: trash or spilled waste detected in {location}. Cleaning has been requested; no action needed from you.
Waste|Medium|Attention: a waste spill in {location} may be a slip hazard. Please walk around it; maintenance has been notified. Alarm active.
Waste|High|Urgent: hazardous waste detected in {location}. Keep clear of the spill and leave the area; responders have been notified. Alarm activated.
UnattendedItem|Low|Is this item in {location} yours? Please keep your belongings with you.
UnattendedItem|Medium|Attention: an unattended item has been detected in {location}. Please do not touch it; security has been informed. Alarm active.
UnattendedItem|High|Urgent: an unattended item in {location} requires evacuation. Move away from it now; authorities have been notified. Alarm activated.
)";

/// Message text per (hazard, criticality). Text records are
/// `<hazard>|<criticality>|<template>`; `#` starts a comment line.
class TemplateTable {
  public:
    TemplateTable() = default;

    static TemplateTable parse(std::string_view text) {
        TemplateTable table;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text)};
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            auto line = detail::trim(raw);
            if (line.empty() || line.front() == '#') continue;
            auto first = line.find('|');
            auto second = first == std::string_view::npos ? first : line.find('|', first + 1);
            if (second == std::string_view::npos) {
                throw ConfigError("template table line " + std::to_string(line_no) +
                                  ": expected <hazard>|<criticality>|<template>");
            }
            auto hazard = try_parse<HazardCategory>(detail::trim(line.substr(0, first)));
            auto level = try_parse<Criticality>(detail::trim(line.substr(first + 1, second - first - 1)));
            auto body = detail::trim(line.substr(second + 1));
            if (!hazard || !level) {
                throw ConfigError("template table line " + std::to_string(line_no) + ": unknown hazard or criticality");
            }
            if (body.empty()) {
                throw ConfigError("template table line " + std::to_string(line_no) + ": empty template");
            }
            if (body.find(kLocationPlaceholder) == std::string_view::npos) {
                throw ConfigError("template table line " + std::to_string(line_no) + ": template lacks " +
                                  std::string(kLocationPlaceholder));
            }
            table.set(*hazard, *level, std::string(body));
        }
        return table;
    }

    static const TemplateTable& builtin() {
        static const TemplateTable table = parse(kBuiltinTemplates);
        return table;
    }

    void set(HazardCategory a, Criticality k, std::string text) { entries_[{a, k}] = std::move(text); }

    [[nodiscard]] const std::string* find(HazardCategory a, Criticality k) const {
        auto it = entries_.find({a, k});
        return it == entries_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::size_t size() const { return entries_.size(); }

  private:
    std::map<std::pair<HazardCategory, Criticality>, std::string> entries_;
};

inline std::string compose_message(const TemplateTable& table, HazardCategory a, Criticality k,
                                   const EnvContext& env) {
    const std::string* tmpl = table.find(a, k);
    if (tmpl == nullptr) {
        throw ConfigError("no message template for (" + std::string(to_string(a)) + ", " +
                          std::string(to_string(k)) + ")");
    }
    std::string out;
    out.reserve(tmpl->size() + 16);
    std::string_view rest = *tmpl;
    for (;;) {
        auto pos = rest.find(kLocationPlaceholder);
        out.append(rest.substr(0, pos));
        if (pos == std::string_view::npos) break;
        out.append(location_phrase(env.location_type));
        rest.remove_prefix(pos + kLocationPlaceholder.size());
    }
    return out;
}

inline std::string compose_message(HazardCategory a, Criticality k, const EnvContext& env) {
    return compose_message(TemplateTable::builtin(), a, k, env);
}

/// Full communication output for one assessed hazard.
inline CommOutput assemble_output(HazardCategory a, RiskScore rho, const EnvContext& env,
                                  const TemplateTable& templates = TemplateTable::builtin()) {
    const Criticality k = band_risk(rho);
    CommOutput out;
    out.category = a;
    out.message = MessageTuple{compose_message(templates, a, k, env), tone_for(rho), character_for(k)};
    out.recipients = recipients_for(k);
    out.alarm = alarm_for(k);
    out.criticality = k;
    out.risk = rho;
    return out;
}

} // namespace hazcomm
