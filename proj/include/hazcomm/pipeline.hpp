#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/perception.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hazcomm {

/// Per-stage latency of one step.
struct StageTimers {
    Ticks camera{0};
    Ticks heatmap{0};
    Ticks llm{0};
    Ticks comm{0};

    friend bool operator==(const StageTimers&, const StageTimers&) = default;
};

constexpr Ticks compute_latency(const StageTimers& t) { return t.camera + t.heatmap + t.llm + t.comm; }

struct EngineConfig {
    Ticks t_max = seconds(20.0);
    Ticks t_camera = seconds(1.0);
    Ticks t_heatmap = seconds(1.5);
    Ticks t_comm = Ticks{0};
    std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
    double lambda = 1.0;
    TemplateTable templates = TemplateTable::builtin();
};

// ---------------------------------------------------------------------------
// Priority queue of pending communications
// ---------------------------------------------------------------------------

struct PendingEvent {
    CommOutput output;
    std::uint64_t arrival = 0;
};

/// Dispatch order: criticality desc, then risk desc, then arrival asc.
inline bool dispatches_before(const PendingEvent& a, const PendingEvent& b) {
    if (a.output.criticality != b.output.criticality) return a.output.criticality > b.output.criticality;
    if (a.output.risk != b.output.risk) return a.output.risk > b.output.risk;
    return a.arrival < b.arrival;
}

class PendingQueue {
  public:
    /// Returns the arrival number assigned to the event.
    std::uint64_t push(CommOutput output) {
        const std::uint64_t arrival = next_arrival_++;
        PendingEvent ev{std::move(output), arrival};
        auto pos = std::upper_bound(items_.begin(), items_.end(), ev, dispatches_before);
        items_.insert(pos, std::move(ev));
        return arrival;
    }

    std::optional<PendingEvent> pop() {
        if (items_.empty()) return std::nullopt;
        PendingEvent head = std::move(items_.front());
        items_.pop_front();
        return head;
    }

    [[nodiscard]] const PendingEvent* peek() const { return items_.empty() ? nullptr : &items_.front(); }
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] bool empty() const { return items_.empty(); }
    [[nodiscard]] const std::deque<PendingEvent>& items() const { return items_; }

  private:
    std::deque<PendingEvent> items_;
    std::uint64_t next_arrival_ = 0;
};

// ---------------------------------------------------------------------------
// Engine state and per-step records
// ---------------------------------------------------------------------------

struct EngineState {
    bool alarm_latched = false;
    std::optional<Criticality> last_known_k;
    PendingQueue queue;
    Ticks clock{0};
    EngineConfig config;
};

/// One line of the trace log. Level-derived fields are empty on steps that
/// produced no output; factor fields are also empty on fallback steps.
struct TraceRecord {
    Ticks tick{0};
    std::string obs_id;
    std::optional<HazardCategory> category;
    std::optional<ContextFactors> factors;
    std::optional<double> rho;
    std::optional<Criticality> k;
    std::optional<double> gamma;
    std::optional<Character> chi;
    bool alarm = false;
    RecipientSet recipients;
    Ticks t_total{0};
    bool fallback = false;
    std::string text;

    [[nodiscard]] bool has_output() const { return k.has_value(); }

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct StepResult {
    std::optional<CommOutput> output;
    StageTimers timers;
    bool fallback_used = false;
    /// Set when the backend threw; the message is kept for the report.
    std::optional<std::string> backend_error;
    /// A hazard was assessed, so navigation should route around it.
    bool navigation_update = false;
    TraceRecord record;
};

inline constexpr std::array<std::string_view, 3> kFallbackMessages{
    "Notice: a possible issue was detected nearby. Please take a look when convenient.",
    "Attention: a possible hazard was detected nearby. Please stay alert and follow staff instructions. Alarm active.",
    "Urgent: a hazard was detected nearby. Move away from the area now and wait for responders. Alarm activated.",
};

/// Pre-formulated alert built from the last known criticality, Medium when
/// nothing has been classified yet.
inline CommOutput apply_fallback(const EngineState& state) {
    const Criticality k = state.last_known_k.value_or(Criticality::Medium);
    const RiskScore rho = nominal_risk(k);
    CommOutput out;
    out.category = std::nullopt;
    out.message = MessageTuple{std::string(kFallbackMessages[static_cast<std::size_t>(k)]), tone_for(rho),
                               character_for(k)};
    out.recipients = recipients_for(k);
    out.alarm = alarm_for(k);
    out.criticality = k;
    out.risk = rho;
    return out;
}

inline EngineState enqueue(EngineState state, CommOutput event) {
    state.queue.push(std::move(event));
    return state;
}

inline std::optional<std::pair<EngineState, CommOutput>> dequeue(EngineState state) {
    auto head = state.queue.pop();
    if (!head) return std::nullopt;
    return std::pair{std::move(state), std::move(head->output)};
}

inline TraceRecord make_record(Ticks tick, std::string obs_id, const std::optional<CommOutput>& out,
                               const std::optional<HazardAssessment>& assessment, Ticks total, bool fallback) {
    TraceRecord r;
    r.tick = tick;
    r.obs_id = std::move(obs_id);
    r.t_total = total;
    r.fallback = fallback;
    if (out) {
        r.category = out->category;
        if (assessment && !fallback) r.factors = assessment->factors;
        r.rho = out->risk.value();
        r.k = out->criticality;
        r.gamma = out->message.tone;
        r.chi = out->message.character;
        r.alarm = out->alarm;
        r.recipients = out->recipients;
        r.text = out->message.text;
    }
    return r;
}

/// One iteration of the communication loop, timed on `clock`. The backend
/// runs between the heatmap and comm stages; overruns of `t_max` and backend
/// errors both produce the fallback output.
inline std::pair<EngineState, StepResult> step(EngineState state, const Observation& obs, PerceptionBackend& backend,
                                               Clock& clock, std::string obs_id = {}) {
    const EngineConfig& cfg = state.config;
    StepResult result;

    clock.sleep_for(cfg.t_camera);
    result.timers.camera = cfg.t_camera;
    clock.sleep_for(cfg.t_heatmap);
    result.timers.heatmap = cfg.t_heatmap;

    std::optional<HazardAssessment> assessment;
    const Ticks backend_start = clock.now();
    try {
        assessment = backend.assess(obs, clock);
    } catch (const Error& e) {
        result.backend_error = e.what();
    }
    result.timers.llm = clock.now() - backend_start;

    clock.sleep_for(cfg.t_comm);
    result.timers.comm = cfg.t_comm;

    const Ticks total = compute_latency(result.timers);
    if (result.backend_error || total > cfg.t_max) {
        result.fallback_used = true;
        result.output = apply_fallback(state);
    } else if (assessment) {
        result.output = assemble_output(assessment->category, assessment->risk, obs.env, cfg.templates);
        state.last_known_k = result.output->criticality;
        result.navigation_update = true;
    }

    if (result.output) {
        state.alarm_latched = result.output->alarm;
        state.queue.push(*result.output);
    } else {
        state.alarm_latched = false;
    }
    state.clock = clock.now();
    result.record = make_record(state.clock, std::move(obs_id), result.output, assessment, total, result.fallback_used);
    return {std::move(state), std::move(result)};
}

/// Virtual-time step: the clock starts at `state.clock`.
inline std::pair<EngineState, StepResult> step(EngineState state, const Observation& obs, PerceptionBackend& backend,
                                               std::string obs_id = {}) {
    VirtualClock clock{state.clock};
    return step(std::move(state), obs, backend, clock, std::move(obs_id));
}

// ---------------------------------------------------------------------------
// Dispatch timing under a single sender
// ---------------------------------------------------------------------------

enum class SchedulePolicy { Priority, Fifo };

struct TimedEvent {
    Ticks arrival{0};
    CommOutput output;
};

/// Start time of each event's dispatch when one sender handles events one
/// at a time, `service` ticks each. `events` must be sorted by arrival.
inline std::vector<Ticks> simulate_dispatch(std::span<const TimedEvent> events, Ticks service, SchedulePolicy policy) {
    std::vector<Ticks> start(events.size(), Ticks{0});
    PendingQueue priority;
    std::deque<std::size_t> fifo;
    std::vector<std::size_t> index_of_arrival; // PendingQueue arrival number -> event index

    std::size_t next = 0;
    std::size_t done = 0;
    Ticks now{0};
    while (done < events.size()) {
        while (next < events.size() && events[next].arrival <= now) {
            if (policy == SchedulePolicy::Priority) {
                priority.push(events[next].output);
                index_of_arrival.push_back(next);
            } else {
                fifo.push_back(next);
            }
            ++next;
        }
        const bool idle = policy == SchedulePolicy::Priority ? priority.empty() : fifo.empty();
        if (idle) {
            now = events[next].arrival;
            continue;
        }
        std::size_t chosen = 0;
        if (policy == SchedulePolicy::Priority) {
            chosen = index_of_arrival[static_cast<std::size_t>(priority.pop()->arrival)];
        } else {
            chosen = fifo.front();
            fifo.pop_front();
        }
        start[chosen] = now;
        now += service;
        ++done;
    }
    return start;
}

} // namespace hazcomm
