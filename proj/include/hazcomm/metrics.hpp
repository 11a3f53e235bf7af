#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/dispatch.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace hazcomm {

/// Expected labels for one observation.
struct TruthLabel {
    HazardCategory category = HazardCategory::UnattendedItem;
    ContextFactors factors;
    Criticality k = Criticality::Low;

    friend bool operator==(const TruthLabel&, const TruthLabel&) = default;
};

using GroundTruth = std::vector<std::optional<TruthLabel>>;

struct SubMetrics {
    double eps_det = 0.0;
    double eps_msg = 0.0;
    double eps_coord = 0.0;
    double eps_lat = 0.0;

    [[nodiscard]] SubMetrics clamped() const {
        auto c = [](double v) { return std::clamp(v, 0.0, 1.0); };
        return {c(eps_det), c(eps_msg), c(eps_coord), c(eps_lat)};
    }

    friend bool operator==(const SubMetrics&, const SubMetrics&) = default;
};

using Weights = std::array<double, 4>;
inline constexpr Weights kEqualWeights{0.25, 0.25, 0.25, 0.25};

inline void validate(const Weights& w) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw ValidationError("effectiveness weights must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("effectiveness weights must sum to 1");
}

inline double effectiveness(const SubMetrics& s, const Weights& w = kEqualWeights) {
    validate(w);
    const SubMetrics c = s.clamped();
    return w[0] * c.eps_det + w[1] * c.eps_msg + w[2] * c.eps_coord + w[3] * c.eps_lat;
}

/// 1 - t_total / t_max, floored at 0 when the budget is overrun.
inline double latency_compliance(Ticks t_total, Ticks t_max) {
    if (t_max <= Ticks{0}) throw ValidationError("latency budget must be positive");
    const double raw = 1.0 - static_cast<double>(t_total.count()) / static_cast<double>(t_max.count());
    return std::max(0.0, raw);
}

namespace detail {
inline void require_aligned(std::size_t trace, std::size_t truth) {
    if (trace != truth) {
        throw ValidationError("trace has " + std::to_string(trace) + " steps but ground truth has " +
                              std::to_string(truth));
    }
}
} // namespace detail

/// Fraction of steps where category and criticality both match; a
/// no-hazard truth matches only a step without output.
inline double detection_accuracy(std::span<const TraceRecord> trace, std::span<const std::optional<TruthLabel>> truth) {
    detail::require_aligned(trace.size(), truth.size());
    if (trace.empty()) throw ValidationError("detection accuracy is undefined on an empty trace");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& r = trace[i];
        const auto& t = truth[i];
        if (!t) {
            hits += !r.has_output();
        } else {
            hits += r.has_output() && r.category == t->category && r.k == t->k;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trace.size());
}

/// Over hazard steps of the truth: tone in the truth level's band and
/// character equal to the truth level's character. Vacuously 1 without
/// hazard steps.
inline double message_alignment(std::span<const TraceRecord> trace, std::span<const std::optional<TruthLabel>> truth) {
    detail::require_aligned(trace.size(), truth.size());
    std::size_t hazards = 0, aligned = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!truth[i]) continue;
        ++hazards;
        const auto& r = trace[i];
        if (r.gamma && r.chi && tone_in_band(*r.gamma, truth[i]->k) && *r.chi == character_for(truth[i]->k)) ++aligned;
    }
    return hazards == 0 ? 1.0 : static_cast<double>(aligned) / static_cast<double>(hazards);
}

/// Delivery records of one trace step.
struct DeliveryBatch {
    std::size_t step = 0;
    std::vector<DeliveryRecord> records;
};

/// Fraction of output steps whose successful deliveries cover exactly
/// recipients_for(k). Vacuously 1 without output steps.
inline double coordination_success(std::span<const DeliveryBatch> batches, std::span<const TraceRecord> trace) {
    std::map<std::size_t, std::vector<const DeliveryRecord*>> by_step;
    for (const auto& b : batches) {
        if (b.step >= trace.size() || !trace[b.step].has_output()) {
            throw ValidationError("delivery records for step " + std::to_string(b.step) +
                                  " do not belong to an output step");
        }
        for (const auto& r : b.records) by_step[b.step].push_back(&r);
    }
    std::size_t outputs = 0, ok = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!trace[i].has_output()) continue;
        ++outputs;
        RecipientSet delivered;
        bool all_success = true;
        std::size_t count = 0;
        for (const auto* r : by_step[i]) {
            delivered.insert(r->channel);
            all_success = all_success && r->success;
            ++count;
        }
        const RecipientSet expected = recipients_for(*trace[i].k);
        if (delivered == expected && count == expected.size() && all_success) ++ok;
    }
    return outputs == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(outputs);
}

struct LossAccount {
    double l_hazard = 0.0;
    double l_fatigue = 0.0;
    double lambda = 1.0;
    double total = 0.0;

    friend bool operator==(const LossAccount&, const LossAccount&) = default;
};

/// Proxy loss settings. Severity weights are indexed by truth level.
struct LossConfig {
    double lambda = 1.0;
    Ticks t_max = seconds(20.0);
    Ticks suppression_window{50};
    std::array<double, 3> severity{1.0, 2.0, 4.0};
};

inline LossAccount make_loss(double l_hazard, double l_fatigue, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    return LossAccount{l_hazard, l_fatigue, lambda, l_hazard + lambda * l_fatigue};
}

/// l_hazard: severity-weighted hazard steps without a correct-level output
/// inside the latency budget. l_fatigue: alarms on truth-Low steps plus
/// identical (category, k) outputs repeated within the suppression window.
inline LossAccount objective_loss(std::span<const TraceRecord> trace, std::span<const std::optional<TruthLabel>> truth,
                                  const LossConfig& cfg = {}) {
    detail::require_aligned(trace.size(), truth.size());
    double hazard = 0.0, fatigue = 0.0;
    std::map<std::tuple<int, int>, Ticks> last_seen;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& r = trace[i];
        const auto& t = truth[i];
        if (t) {
            const bool mitigated = r.has_output() && *r.k == t->k && r.t_total <= cfg.t_max;
            if (!mitigated) hazard += cfg.severity[static_cast<std::size_t>(t->k)];
            if (t->k == Criticality::Low && r.alarm) fatigue += 1.0;
        }
        if (r.has_output()) {
            const auto key = std::tuple{r.category ? static_cast<int>(*r.category) : -1, static_cast<int>(*r.k)};
            auto it = last_seen.find(key);
            if (it != last_seen.end() && r.tick - it->second <= cfg.suppression_window) fatigue += 1.0;
            last_seen[key] = r.tick;
        }
    }
    return make_loss(hazard, fatigue, cfg.lambda);
}

// ---------------------------------------------------------------------------
// Independent trace oracle
// ---------------------------------------------------------------------------

struct Violation {
    std::size_t step = 0;
    std::string obs_id;
    std::string rule;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Re-derives every policy field of each record from its risk score alone,
/// without going through the core policy functions, and reports mismatches.
inline std::vector<Violation> oracle_verify(std::span<const TraceRecord> trace) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRecord& r = trace[i];
        auto flag = [&](const char* rule, const std::string& detail) {
            out.push_back(Violation{i, r.obs_id, rule, detail});
        };

        if (!r.k) {
            if (r.rho || r.gamma || r.chi) throw TraceFormatError("step " + std::to_string(i) + ": output fields without k");
            if (r.alarm) flag("alarm-constraint", "alarm raised on a step without output");
            if (!r.recipients.empty()) flag("recipient-routing", "recipients on a step without output");
            continue;
        }
        if (!r.rho || !r.gamma || !r.chi) {
            throw TraceFormatError("step " + std::to_string(i) + ": output record lacks rho, gamma or chi");
        }

        const double rho = *r.rho;
        if (!(rho >= 0.0 && rho <= 10.0)) {
            std::ostringstream os;
            os << "rho " << rho << " outside [0, 10]";
            flag("risk-range", os.str());
            continue;
        }
        // Level index: 0 below five, 1 from five up to eight, 2 from eight.
        const int level = rho < 5.0 ? 0 : (rho < 8.0 ? 1 : 2);
        const int k = static_cast<int>(*r.k);

        if (k != level) flag("risk-banding", "k " + std::string(to_string(*r.k)) + " disagrees with rho");
        if (*r.gamma != rho) flag("tone-coupling", "gamma differs from rho");
        const double g = *r.gamma;
        const int tone_level = g < 0.0 || g > 10.0 ? -1 : (g < 5.0 ? 0 : (g < 8.0 ? 1 : 2));
        if (tone_level != k) flag("tone-band", "gamma outside the band of k");
        if (static_cast<int>(*r.chi) != k) flag("character", "chi " + std::string(to_string(*r.chi)) + " does not match k");
        if (r.alarm != (k >= 1)) flag("alarm-constraint", r.alarm ? "alarm on a Low step" : "no alarm on a non-Low step");

        bool routed = r.recipients.size() == static_cast<std::size_t>(k + 1);
        for (int c = 0; c < 3; ++c) routed = routed && (r.recipients.contains(static_cast<Channel>(c)) == (c <= k));
        if (!routed) flag("recipient-routing", "recipients do not match k");

        if (r.factors && static_cast<int>(r.factors->criticality_level) != k) {
            flag("factor-coherence", "criticality level d disagrees with k");
        }
    }
    return out;
}

} // namespace hazcomm
