#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace hazcomm {

/// Simulation time unit: one tick is 0.1 s.
using Ticks = std::chrono::duration<std::int64_t, std::deci>;

constexpr Ticks seconds(double s) {
    return Ticks{static_cast<std::int64_t>(s * 10.0 + (s >= 0 ? 0.5 : -0.5))};
}

constexpr double to_seconds(Ticks t) { return static_cast<double>(t.count()) / 10.0; }

class Clock {
  public:
    virtual ~Clock() = default;

    [[nodiscard]] virtual Ticks now() const = 0;

    /// Wait for `d`. Virtual clocks jump forward, the wall clock blocks.
    virtual void sleep_for(Ticks d) = 0;

    /// Account for `d` that already elapsed outside the clock's control
    /// (e.g. a blocking network call). Only virtual clocks move.
    virtual void record_elapsed(Ticks d) = 0;
};

class VirtualClock final : public Clock {
  public:
    explicit VirtualClock(Ticks start = Ticks{0}) : now_(start) {}

    [[nodiscard]] Ticks now() const override { return now_; }
    void sleep_for(Ticks d) override { now_ += d; }
    void record_elapsed(Ticks d) override { now_ += d; }

  private:
    Ticks now_;
};

/// Adapter for live use; ticks are counted from construction.
class WallClock final : public Clock {
  public:
    WallClock() : origin_(std::chrono::steady_clock::now()) {}

    [[nodiscard]] Ticks now() const override {
        return std::chrono::duration_cast<Ticks>(std::chrono::steady_clock::now() - origin_);
    }
    void sleep_for(Ticks d) override { std::this_thread::sleep_for(d); }
    void record_elapsed(Ticks) override {}

  private:
    std::chrono::steady_clock::time_point origin_;
};

} // namespace hazcomm
