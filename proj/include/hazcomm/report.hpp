#pragma once

#include "hazcomm/harness.hpp"
#include "hazcomm/wire.hpp"

#include <cstdio>
#include <sstream>
#include <string>

namespace hazcomm {

namespace detail {
inline std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline wire::Json encode_metrics(const SubMetrics& m) {
    return wire::Json{{"eps_det", m.eps_det}, {"eps_msg", m.eps_msg}, {"eps_coord", m.eps_coord}, {"eps_lat", m.eps_lat}};
}

inline wire::Json encode_loss(const LossAccount& l) {
    return wire::Json{{"l_hazard", l.l_hazard}, {"l_fatigue", l.l_fatigue}, {"lambda", l.lambda}, {"total", l.total}};
}
} // namespace detail

inline wire::Json encode_report(const SuiteReport& report) {
    using wire::Json;
    Json backends = Json::array();
    for (const auto& b : report.backends) {
        Json scenarios = Json::array();
        for (const auto& r : b.runs) {
            scenarios.push_back(Json{{"id", r.scenario_id},
                                     {"steps", r.trace.size()},
                                     {"fallback_steps", r.fallback_steps},
                                     {"metrics", detail::encode_metrics(r.metrics)},
                                     {"loss", detail::encode_loss(r.loss)}});
        }
        backends.push_back(Json{{"backend", b.backend},
                                {"steps", b.steps},
                                {"output_steps", b.output_steps},
                                {"fallback_steps", b.fallback_steps},
                                {"alarm_compliance", b.alarm_compliance},
                                {"mean_t_total_s", b.mean_t_total_s},
                                {"metrics", detail::encode_metrics(b.metrics)},
                                {"epsilon", b.epsilon},
                                {"loss", detail::encode_loss(b.loss)},
                                {"scenarios", std::move(scenarios)}});
    }
    Json violations = Json::array();
    for (const auto& v : report.violations) {
        violations.push_back(Json{{"backend", v.backend},
                                  {"scenario", v.scenario_id},
                                  {"step", v.violation.step},
                                  {"obs_id", v.violation.obs_id},
                                  {"rule", v.violation.rule},
                                  {"detail", v.violation.detail}});
    }
    return Json{{"backends", std::move(backends)}, {"violations", std::move(violations)}};
}

inline std::string render_structured(const SuiteReport& report) { return encode_report(report).dump(2) + "\n"; }

/// Side-by-side metric table, one column per backend.
inline std::string render_comparison(const SuiteReport& report) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s", "metric");
    os << line;
    for (const auto& b : report.backends) {
        std::snprintf(line, sizeof line, " %18s", b.backend.c_str());
        os << line;
    }
    os << '\n';
    auto row = [&](const char* name, auto get) {
        std::snprintf(line, sizeof line, "%-18s", name);
        os << line;
        for (const auto& b : report.backends) {
            std::snprintf(line, sizeof line, " %18s", detail::fixed(get(b)).c_str());
            os << line;
        }
        os << '\n';
    };
    row("eps_det", [](const BackendSummary& b) { return b.metrics.eps_det; });
    row("eps_msg", [](const BackendSummary& b) { return b.metrics.eps_msg; });
    row("eps_coord", [](const BackendSummary& b) { return b.metrics.eps_coord; });
    row("eps_lat", [](const BackendSummary& b) { return b.metrics.eps_lat; });
    row("epsilon", [](const BackendSummary& b) { return b.epsilon; });
    row("l_hazard", [](const BackendSummary& b) { return b.loss.l_hazard; });
    row("l_fatigue", [](const BackendSummary& b) { return b.loss.l_fatigue; });
    row("loss_total", [](const BackendSummary& b) { return b.loss.total; });
    row("alarm_compliance", [](const BackendSummary& b) { return b.alarm_compliance; });
    row("mean_t_total_s", [](const BackendSummary& b) { return b.mean_t_total_s; });
    row("fallback_steps", [](const BackendSummary& b) { return static_cast<double>(b.fallback_steps); });
    return os.str();
}

inline std::string render_text(const SuiteReport& report) {
    std::ostringstream os;
    for (const auto& b : report.backends) {
        os << "backend " << b.backend << ": " << b.steps << " steps, " << b.output_steps << " outputs, "
           << b.fallback_steps << " fallback\n";
        os << "  eps_det=" << detail::fixed(b.metrics.eps_det) << " eps_msg=" << detail::fixed(b.metrics.eps_msg)
           << " eps_coord=" << detail::fixed(b.metrics.eps_coord) << " eps_lat=" << detail::fixed(b.metrics.eps_lat)
           << " epsilon=" << detail::fixed(b.epsilon) << '\n';
        os << "  loss: hazard=" << detail::fixed(b.loss.l_hazard) << " fatigue=" << detail::fixed(b.loss.l_fatigue)
           << " lambda=" << detail::fixed(b.loss.lambda) << " total=" << detail::fixed(b.loss.total) << '\n';
        os << "  alarm_compliance=" << detail::fixed(b.alarm_compliance)
           << " mean_t_total=" << detail::fixed(b.mean_t_total_s, 1) << "s\n";
        for (const auto& r : b.runs) {
            os << "    " << r.scenario_id << ": det=" << detail::fixed(r.metrics.eps_det)
               << " msg=" << detail::fixed(r.metrics.eps_msg) << " coord=" << detail::fixed(r.metrics.eps_coord)
               << " lat=" << detail::fixed(r.metrics.eps_lat) << " loss=" << detail::fixed(r.loss.total)
               << (r.fallback_steps ? " fallback=" + std::to_string(r.fallback_steps) : std::string()) << '\n';
        }
    }
    os << "violations: " << report.violations.size() << '\n';
    for (const auto& v : report.violations) {
        os << "  " << v.backend << " " << v.violation.obs_id << " [" << v.violation.rule << "] " << v.violation.detail
           << '\n';
    }
    return os.str();
}

} // namespace hazcomm
