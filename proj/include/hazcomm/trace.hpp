#pragma once

#include "hazcomm/errors.hpp"
#include "hazcomm/pipeline.hpp"
#include "hazcomm/wire.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace hazcomm {

inline wire::Json encode_trace_record(const TraceRecord& r) {
    using wire::Json;
    auto number_or_null = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j;
    j["tick"] = r.tick.count();
    j["obs_id"] = r.obs_id;
    j["category"] = wire::enum_or_null(r.category);
    j["d"] = r.factors ? Json(std::string(to_string(r.factors->criticality_level))) : Json(nullptr);
    j["tau"] = r.factors ? Json(std::string(to_string(r.factors->time_sensitivity))) : Json(nullptr);
    j["phi"] = r.factors ? Json(std::string(to_string(r.factors->feasibility))) : Json(nullptr);
    j["rho"] = number_or_null(r.rho);
    j["k"] = wire::enum_or_null(r.k);
    j["gamma"] = number_or_null(r.gamma);
    j["chi"] = wire::enum_or_null(r.chi);
    j["alarm"] = r.alarm;
    j["recipients"] = wire::encode_recipients(r.recipients);
    j["t_total"] = r.t_total.count();
    j["fallback"] = r.fallback;
    j["text"] = r.text;
    return j;
}

inline TraceRecord decode_trace_record(const wire::Json& j) {
    wire::expect_object(j,
                        {"tick", "obs_id", "category", "d", "tau", "phi", "rho", "k", "gamma", "chi", "alarm",
                         "recipients", "t_total", "fallback"},
                        {"text"}, "trace record");
    auto optional_number = [&](const char* key) -> std::optional<double> {
        if (j.at(key).is_null()) return std::nullopt;
        return wire::get_number(j, key);
    };
    TraceRecord r;
    r.tick = Ticks{wire::get_integer(j, "tick")};
    r.obs_id = wire::get_string(j, "obs_id");
    r.category = wire::get_optional_enum<HazardCategory>(j, "category");
    auto d = wire::get_optional_enum<Level>(j, "d");
    auto tau = wire::get_optional_enum<TimeSensitivity>(j, "tau");
    auto phi = wire::get_optional_enum<Feasibility>(j, "phi");
    if (d && tau && phi) {
        r.factors = ContextFactors{*d, *tau, *phi};
    } else if (d || tau || phi) {
        throw FormatError("trace record: partial factor triple");
    }
    r.rho = optional_number("rho");
    r.k = wire::get_optional_enum<Criticality>(j, "k");
    r.gamma = optional_number("gamma");
    r.chi = wire::get_optional_enum<Character>(j, "chi");
    r.alarm = wire::get_bool(j, "alarm");
    r.recipients = wire::decode_recipients(j.at("recipients"));
    r.t_total = Ticks{wire::get_integer(j, "t_total")};
    r.fallback = wire::get_bool(j, "fallback");
    if (j.contains("text")) r.text = wire::get_string(j, "text");
    return r;
}

/// Appends one JSON document per line.
inline void write_trace(std::ostream& os, const std::vector<TraceRecord>& records) {
    for (const auto& r : records) os << encode_trace_record(r).dump() << '\n';
}

inline std::vector<TraceRecord> read_trace(std::istream& is) {
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(decode_trace_record(wire::Json::parse(line)));
        } catch (const wire::Json::exception& e) {
            throw TraceFormatError("trace line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw TraceFormatError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace hazcomm
