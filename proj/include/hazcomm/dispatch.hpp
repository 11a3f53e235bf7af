#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/core_model.hpp"
#include "hazcomm/errors.hpp"

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hazcomm {

struct DeliveryRecord {
    Channel channel = Channel::Nearby;
    Ticks tick{0};
    bool success = false;
    std::string detail;

    friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

class ChannelSink {
  public:
    virtual ~ChannelSink() = default;
    [[nodiscard]] virtual Channel channel() const = 0;
    virtual DeliveryRecord deliver(const CommOutput& output, Ticks tick) = 0;
};

/// At most one sink per channel.
class SinkRegistry {
  public:
    void add(std::shared_ptr<ChannelSink> sink) {
        if (!sink) throw ConfigError("null sink");
        sinks_[index(sink->channel())] = std::move(sink);
    }

    [[nodiscard]] ChannelSink* find(Channel c) const { return sinks_[index(c)].get(); }

  private:
    static std::size_t index(Channel c) { return static_cast<std::size_t>(c); }
    std::array<std::shared_ptr<ChannelSink>, 3> sinks_;
};

/// One delivery attempt per recipient channel, nearby -> remote ->
/// coordination. A throwing sink yields a failed record; the other channels
/// are still attempted.
inline std::vector<DeliveryRecord> dispatch(const CommOutput& output, const SinkRegistry& sinks, Ticks tick) {
    const auto channels = output.recipients.channels();
    for (auto c : channels) {
        if (sinks.find(c) == nullptr) {
            throw ConfigError("no sink registered for channel '" + std::string(to_string(c)) + "'");
        }
    }
    std::vector<DeliveryRecord> records;
    records.reserve(channels.size());
    for (auto c : channels) {
        try {
            DeliveryRecord r = sinks.find(c)->deliver(output, tick);
            r.channel = c;
            r.tick = tick;
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            records.push_back(DeliveryRecord{c, tick, false, e.what()});
        }
    }
    return records;
}

class MemorySink final : public ChannelSink {
  public:
    struct Entry {
        CommOutput output;
        Ticks tick;
    };

    explicit MemorySink(Channel channel) : channel_(channel) {}

    [[nodiscard]] Channel channel() const override { return channel_; }

    DeliveryRecord deliver(const CommOutput& output, Ticks tick) override {
        log_.push_back(Entry{output, tick});
        return DeliveryRecord{channel_, tick, true, "stored"};
    }

    [[nodiscard]] const std::vector<Entry>& log() const { return log_; }

  private:
    Channel channel_;
    std::vector<Entry> log_;
};

inline std::shared_ptr<MemorySink> memory_sink(Channel channel) { return std::make_shared<MemorySink>(channel); }

/// Registry with a memory sink on every channel.
inline SinkRegistry memory_sinks() {
    SinkRegistry reg;
    for (auto c : all_values<Channel>()) reg.add(memory_sink(c));
    return reg;
}

} // namespace hazcomm
