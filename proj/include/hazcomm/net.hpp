#pragma once

// HTTP-backed transports: the remote backend client and network sinks.

#include "hazcomm/clock.hpp"
#include "hazcomm/dispatch.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/remote.hpp"
#include "hazcomm/wire.hpp"

#include "httplib.h"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace hazcomm {

class HttpTransport final : public Transport {
  public:
    explicit HttpTransport(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

    std::string post(const std::string& body, Ticks timeout, Clock& clock) override {
        using namespace std::chrono;
        httplib::Client client(endpoint_.host, endpoint_.port);
        const auto limit = duration_cast<microseconds>(timeout);
        client.set_connection_timeout(limit);
        client.set_read_timeout(limit);
        client.set_write_timeout(limit);

        const auto start = steady_clock::now();
        auto res = client.Post(endpoint_.path, body, "application/json");
        const auto elapsed = steady_clock::now() - start;
        clock.record_elapsed(duration_cast<Ticks>(elapsed));

        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout ||
                (err == httplib::Error::Read && elapsed >= limit)) {
                throw TimeoutError("remote backend " + endpoint_.to_string() + " timed out");
            }
            throw TransportError("remote backend " + endpoint_.to_string() + ": " + httplib::to_string(err));
        }
        if (res->status != 200) {
            throw TransportError("remote backend " + endpoint_.to_string() + " returned HTTP " +
                                 std::to_string(res->status));
        }
        return res->body;
    }

  private:
    Endpoint endpoint_;
};

inline std::optional<HazardAssessment> remote_assess(const Endpoint& endpoint, const Observation& obs,
                                                     Ticks timeout, Clock& clock) {
    RemoteBackend backend(std::make_unique<HttpTransport>(endpoint), timeout);
    return backend.assess(obs, clock);
}

/// Posts the alert document to an HTTP endpoint; any transport problem
/// becomes a failed record.
class NetworkSink final : public ChannelSink {
  public:
    NetworkSink(Channel channel, Endpoint endpoint, std::chrono::milliseconds deadline = std::chrono::seconds(2))
        : channel_(channel), endpoint_(std::move(endpoint)), deadline_(deadline) {}

    [[nodiscard]] Channel channel() const override { return channel_; }

    DeliveryRecord deliver(const CommOutput& output, Ticks tick) override {
        httplib::Client client(endpoint_.host, endpoint_.port);
        client.set_connection_timeout(deadline_);
        client.set_read_timeout(deadline_);
        client.set_write_timeout(deadline_);
        auto res = client.Post(endpoint_.path, wire::encode_alert(output, tick).dump(), "application/json");
        if (!res) return DeliveryRecord{channel_, tick, false, httplib::to_string(res.error())};
        if (res->status < 200 || res->status >= 300) {
            return DeliveryRecord{channel_, tick, false, "HTTP " + std::to_string(res->status)};
        }
        return DeliveryRecord{channel_, tick, true, "HTTP " + std::to_string(res->status)};
    }

  private:
    Channel channel_;
    Endpoint endpoint_;
    std::chrono::milliseconds deadline_;
};

inline std::shared_ptr<NetworkSink> network_sink(Channel channel, Endpoint endpoint) {
    return std::make_shared<NetworkSink>(channel, std::move(endpoint));
}

} // namespace hazcomm
