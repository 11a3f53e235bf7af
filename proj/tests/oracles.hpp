#pragma once

// Test-only reference computations. Nothing here calls into the policy
// functions it is used to check.

#include "hazcomm/core_model.hpp"
#include "hazcomm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hazcomm::oracle {

/// Band by integer hundredths: [0,500) Low, [500,800) Medium, rest High.
inline Criticality band_by_hundredths(double rho) {
    const long c = std::lround(rho * 100.0);
    if (c < 500) return Criticality::Low;
    if (c < 800) return Criticality::Medium;
    return Criticality::High;
}

struct Event {
    int level;   // 0 Low, 1 Medium, 2 High
    double rho;
    int arrival;
};

/// Dispatch order by a full sort on (level desc, rho desc, arrival asc).
inline std::vector<int> sorted_arrivals(std::vector<Event> events) {
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.level != b.level) return a.level > b.level;
        if (a.rho != b.rho) return a.rho > b.rho;
        return a.arrival < b.arrival;
    });
    std::vector<int> out;
    for (const auto& e : events) out.push_back(e.arrival);
    return out;
}

} // namespace hazcomm::oracle
