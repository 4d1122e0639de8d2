#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgeicn/bloom.hpp"
#include "edgeicn/controller.hpp"

namespace edgeicn {

using Bytes = std::vector<std::uint8_t>;
using ScopeId = std::string;

enum class CoapMethod { Get, Post, Put, Delete };

/// CoAP request headers carried inside a Subscription payload.
struct CoapHeaders {
    CoapMethod method = CoapMethod::Get;
    std::string uri_host;
    std::string uri_path;
    std::uint16_t message_id = 0;
    bool confirmable = true;
    bool observe = false;
};

/// A subscriber named in a (possibly aggregated) Response.
struct Recipient {
    std::string node;
    std::uint16_t message_id = 0;  // CoAP message id, 0 for plain ICN
    friend bool operator==(const Recipient&, const Recipient&) = default;
};

struct IcnMessage {
    enum class Kind { Advertisement, Subscription, Response };

    Kind kind = Kind::Advertisement;
    ScopeId scope;
    std::string item;
    std::string sender;       // node or virtual node id
    std::string destination;  // id the packet was addressed to
    Bytes payload;
    /// Subscription: path back to the subscriber (all-zeros when unknown).
    ForwardingId reverse;
    std::optional<CoapHeaders> coap;
    /// Response: who it answers; "ok", "not-found", "timeout" or a CoAP code.
    std::vector<Recipient> recipients;
    std::string status;
};

/// What a packet is for, for overhead attribution.
enum class Phase : std::uint8_t {
    Bootstrap,  // learning the all.nodes tree before the first advertisement
    Advertise,  // scope advertisements
    Resolve,    // controller or rendezvous lookups
    Transfer,   // subscriptions and responses
};
inline constexpr std::size_t kPhaseCount = 4;

struct ResolutionRequest {
    std::string target;
    std::vector<std::string> context_labels;  // non-empty for context hosts
    NodeIndex requester = 0;
};

struct ResolutionReply {
    std::string target;
    std::optional<Resolution> resolution;
    std::string error;
};

/// Messages exchanged with the rendezvous point in the POINT comparator.
struct RvAdvertise {
    ScopeId scope;
    std::string provider;
};
struct RvRequest {
    ScopeId scope;
    NodeIndex requester = 0;
};
struct RvReply {
    ScopeId scope;
    std::string provider;
    std::optional<Resolution> resolution;
    std::string error;
};

using ControlBody = std::variant<ResolutionRequest, ResolutionReply, RvAdvertise, RvRequest, RvReply>;

}  // namespace edgeicn
