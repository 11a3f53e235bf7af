#pragma once

#include "hazcomm/clock.hpp"
#include "hazcomm/errors.hpp"
#include "hazcomm/perception.hpp"
#include "hazcomm/wire.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace hazcomm {

/// host:port with an optional path, e.g. `127.0.0.1:8080/assess`.
struct Endpoint {
    std::string host;
    int port = 80;
    std::string path = "/";

    static Endpoint parse(std::string_view text, std::string_view default_path = "/") {
        if (text.substr(0, 7) == "http://") text.remove_prefix(7);
        Endpoint ep;
        auto slash = text.find('/');
        ep.path = slash == std::string_view::npos ? std::string(default_path) : std::string(text.substr(slash));
        auto hostport = text.substr(0, slash);
        auto colon = hostport.rfind(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw ConfigError("endpoint '" + std::string(text) + "' must be host:port[/path]");
        }
        ep.host = std::string(hostport.substr(0, colon));
        try {
            std::size_t used = 0;
            std::string port_text(hostport.substr(colon + 1));
            ep.port = std::stoi(port_text, &used);
            if (used != port_text.size() || ep.port <= 0 || ep.port > 65535) throw std::invalid_argument("port");
        } catch (const std::logic_error&) {
            throw ConfigError("endpoint '" + std::string(text) + "' has an invalid port");
        }
        return ep;
    }

    [[nodiscard]] std::string to_string() const { return host + ":" + std::to_string(port) + path; }
};

/// One blocking request/response exchange with a deadline.
class Transport {
  public:
    virtual ~Transport() = default;

    /// Returns the response body, or throws TimeoutError / TransportError.
    virtual std::string post(const std::string& body, Ticks timeout, Clock& clock) = 0;
};

/// In-process transport on the caller's clock: the handler's reply arrives
/// after `latency`, or the call times out after exactly `timeout`.
class SimulatedTransport final : public Transport {
  public:
    using Handler = std::function<std::string(const std::string&)>;

    SimulatedTransport(Handler handler, Ticks latency) : handler_(std::move(handler)), latency_(latency) {}

    std::string post(const std::string& body, Ticks timeout, Clock& clock) override {
        if (latency_ > timeout) {
            clock.sleep_for(timeout);
            throw TimeoutError("simulated remote timed out after " + std::to_string(timeout.count()) + " ticks");
        }
        clock.sleep_for(latency_);
        return handler_(body);
    }

  private:
    Handler handler_;
    Ticks latency_;
};

/// Backend that forwards the observation to a remote assessor.
class RemoteBackend final : public PerceptionBackend {
  public:
    RemoteBackend(std::unique_ptr<Transport> transport, Ticks timeout, std::string label = "remote")
        : transport_(std::move(transport)), timeout_(timeout), label_(std::move(label)) {
        if (!transport_) throw ConfigError("remote backend needs a transport");
        if (timeout_ <= Ticks{0}) throw ConfigError("remote backend timeout must be positive");
    }

    [[nodiscard]] std::string name() const override { return label_; }

  private:
    std::optional<HazardAssessment> do_assess(const Observation& obs, Clock& clock) override {
        const std::string reply = transport_->post(wire::encode(obs).dump(), timeout_, clock);
        wire::Json j;
        try {
            j = wire::Json::parse(reply);
        } catch (const wire::Json::parse_error& e) {
            throw MalformedResponseError(std::string("remote response is not valid JSON: ") + e.what());
        }
        try {
            return wire::decode_response(j);
        } catch (const FormatError& e) {
            throw MalformedResponseError(std::string("remote response: ") + e.what());
        }
    }

    std::unique_ptr<Transport> transport_;
    Ticks timeout_;
    std::string label_;
};

/// Request handler for serving any backend over HTTP with the remote wire
/// format. Useful for stubs and for running an assessor out of process.
inline std::string serve_assessment(PerceptionBackend& backend, const std::string& request_body) {
    const auto obs = wire::decode_observation(wire::Json::parse(request_body));
    return wire::encode_response(backend.assess(obs)).dump();
}

} // namespace hazcomm
