#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/edge_node.hpp"

namespace edgeicn {

struct CoapRequest {
    CoapMethod method = CoapMethod::Get;
    std::string uri_host;
    std::string uri_path;
    std::uint16_t message_id = 0;
    bool confirmable = true;
    bool observe = false;
};

/// What the gateway hands back to the legacy client.
struct CoapResponse {
    std::string code;  // "2.05", "4.04", "5.02", "5.04"
    std::uint16_t message_id = 0;
    Bytes payload;
    std::string responder;  // answering edge node, empty for local errors
    Tick at = 0;
};

/// Dotted host whose first label is "all", e.g. all.west.building6.
struct ContextHost {
    std::vector<std::string> labels;

    static std::optional<ContextHost> parse(std::string_view host);
    /// Group names, i.e. every label after the leading "all".
    std::vector<std::string> groups() const { return {labels.begin() + 1, labels.end()}; }
};

/// The URI host names the scope; hosts compare case-insensitively.
ScopeId map_host_to_scope(std::string_view uri_host);

enum class CoapOutcome { Subscribed, Aggregated, GroupRequest, LegacyFallback };
std::string to_string(CoapOutcome o);

struct GatewayStats {
    std::uint64_t requests = 0;
    std::uint64_t icn_requests = 0;  // CoAP requests that arrived over ICN
    std::uint64_t acks = 0;
    std::uint64_t legacy_fallbacks = 0;
    std::uint64_t group_requests = 0;
    std::uint64_t ignored = 0;
};

/// CoAP proxy living on an edge node: legacy clients on one side, ICN on the
/// other, plus the CoAP servers attached to this node.
class CoapGateway {
public:
    explicit CoapGateway(EdgeNode& node) : node_(node) {}

    /// Later versions of the same (host, path) are updates seen by observers.
    void add_resource(const std::string& uri_host, const std::string& uri_path, Bytes data, Tick available_at = 0);
    bool serves_scope(const ScopeId& scope) const;
    std::vector<std::pair<std::string, std::string>> resources() const;

    /// One advertisement per distinct host. Returns the advertised scopes.
    std::vector<ScopeId> advertise_resources();

    CoapOutcome on_coap_request(const CoapRequest& req);
    void on_icn_coap_subscription(const IcnMessage& msg);
    void on_icn_coap_response(const IcnMessage& msg);
    void on_resource_available(const std::string& uri_host, const std::string& uri_path);

    const std::vector<CoapResponse>& client_responses() const { return client_responses_; }
    const GatewayStats& stats() const { return stats_; }

private:
    using ResourceKey = std::pair<std::string, std::string>;
    struct Version {
        Bytes data;
        Tick available_at = 0;
    };
    struct ClientPending {
        std::string host, path;
        std::vector<std::uint16_t> message_ids;
        bool group = false;
        bool observe = false;
        bool answered = false;
    };
    struct Waiter {
        Recipient who;
        ForwardingId reverse;  // all-zeros when the requester must be resolved
        bool observe = false;
    };
    struct ServerWaiters {
        std::vector<Waiter> waiters;
        IcnMessage basis;
        std::uint64_t generation = 0;
    };

    const Version* current(const ResourceKey& key) const;
    std::optional<ResourceKey> match_resource(const CoapHeaders& h) const;
    static void add_waiter(ServerWaiters& w, const IcnMessage& msg);
    void answer(ServerWaiters& w, const std::string& code, const Bytes& payload);

    EdgeNode& node_;
    std::map<ResourceKey, std::vector<Version>> resources_;
    std::map<std::uint16_t, ClientPending> client_pending_;  // by primary message id
    std::map<ResourceKey, std::uint16_t> client_by_key_;
    std::map<ResourceKey, ServerWaiters> server_pending_;
    std::map<ResourceKey, ServerWaiters> observers_;
    std::vector<CoapResponse> client_responses_;
    GatewayStats stats_;
    std::uint64_t next_generation_ = 1;
};

}  // namespace edgeicn
