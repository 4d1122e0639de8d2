#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/messages.hpp"

namespace edgeicn {

using Tick = std::uint64_t;
using HandleId = std::uint64_t;

/// 5 simulated seconds at one tick per millisecond.
inline constexpr Tick kDefaultTimeout = 5000;

enum class Mode { EdgeIcn, Point };
Mode parse_mode(std::string_view s);
std::string to_string(Mode m);

enum class SelectionPolicy { First, RoundRobin };
SelectionPolicy parse_selection_policy(std::string_view s);

struct ScopeNotAdvertised : Error {
    explicit ScopeNotAdvertised(const ScopeId& s) : Error("scope not advertised: " + s) {}
};

/// Scope -> providers in first-advertised order; inserts are idempotent.
class LookupTable {
public:
    bool insert(const ScopeId& scope, const std::string& provider);
    const std::vector<std::string>* find(const ScopeId& scope) const;
    bool contains(const ScopeId& scope) const { return find(scope) != nullptr; }
    const std::map<ScopeId, std::vector<std::string>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<ScopeId, std::vector<std::string>> entries_;
};

class FidCache {
public:
    const Resolution* find(const std::string& target) const;
    void insert(const std::string& target, Resolution r) { entries_.insert_or_assign(target, std::move(r)); }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Resolution> entries_;
};

struct SubscriptionHandle {
    enum class State { Pending, Completed, Failed };

    HandleId id = 0;
    ScopeId scope;
    std::string item;
    std::string target;
    State state = State::Pending;
    Bytes data;
    std::string reason;
    std::string responder;
    Tick issued = 0;
    Tick finished = 0;
};

/// What an edge node needs from the network it is attached to.
class NodeNetwork {
public:
    virtual ~NodeNetwork() = default;
    virtual Tick now() const = 0;
    /// Sent with the RESOLUTION ether type; the first switch punts it.
    virtual void send_control(NodeIndex from, ControlBody body, Phase phase) = 0;
    virtual void send_bloom(NodeIndex from, const ForwardingId& fid, IcnMessage msg, Phase phase) = 0;
    virtual void set_timer(NodeIndex node, Tick at, std::uint64_t timer_id) = 0;
    virtual bool is_virtual(std::string_view name) const = 0;
};

struct NodeStats {
    std::uint64_t advertisements_sent = 0;
    std::uint64_t advertisements_received = 0;
    std::uint64_t subscriptions_sent = 0;
    std::uint64_t responses_sent = 0;
    std::uint64_t resolution_packets = 0;
    std::uint64_t drops = 0;  // subscriptions for unknown scopes and the like
    std::uint64_t ignored = 0;
    std::uint64_t upstream_requests = 0;
    std::uint64_t failed_subscriptions = 0;
    std::map<std::string, std::uint64_t> resolutions_by_target;
};

class CoapGateway;

class EdgeNode {
public:
    struct Config {
        NodeIndex index = 0;
        std::string name;
        std::vector<std::string> aliases;
        Mode mode = Mode::EdgeIcn;
        Tick timeout = kDefaultTimeout;
    };

    EdgeNode(Config cfg, NodeNetwork& net);
    ~EdgeNode();
    EdgeNode(const EdgeNode&) = delete;
    EdgeNode& operator=(const EdgeNode&) = delete;

    const std::string& name() const { return cfg_.name; }
    NodeIndex index() const { return cfg_.index; }
    Mode mode() const { return cfg_.mode; }
    Tick timeout() const { return cfg_.timeout; }
    Tick now() const { return net_.now(); }
    NodeNetwork& network() { return net_; }
    /// Own name plus aliases.
    bool has_id(std::string_view id) const;

    void put_content(const ScopeId& scope, const std::string& item, Bytes data, Tick available_at = 0);
    bool owns_scope(const ScopeId& scope) const;

    void advertise(const ScopeId& scope, std::optional<std::string> sender = std::nullopt,
                   const std::string& target = std::string(kAllNodes));
    void on_advertisement(const IcnMessage& msg);

    /// Throws ScopeNotAdvertised when the scope is not in the lookup table.
    std::string select_target(const ScopeId& scope, SelectionPolicy policy);

    /// A subscription for a (scope, item) already pending here joins it instead
    /// of sending another request.
    HandleId subscribe(const ScopeId& scope, const std::string& item, SelectionPolicy policy = SelectionPolicy::First,
                       std::optional<CoapHeaders> coap = std::nullopt);
    void on_subscription(const IcnMessage& msg);
    void on_response(const IcnMessage& msg);

    /// Entry point for a delivered ICN message already known to be addressed here.
    void receive(const IcnMessage& msg);
    void on_control(const ControlBody& body);
    void on_timer(std::uint64_t timer_id);
    void on_content_available(const ScopeId& scope, const std::string& item);

    /// Sends `msg` to a (virtual) node id, resolving through the FidCache; the
    /// controller is contacted only on a miss.
    void send_to(const std::string& target, IcnMessage msg, Phase phase,
                 std::vector<std::string> context_labels = {});
    /// Responds to `routed` over one merged reverse ForwardingId and to each of
    /// `unrouted` through its own resolution.
    void reply(const IcnMessage& basis, const ForwardingId& merged, const std::vector<Recipient>& routed,
               const std::vector<Recipient>& unrouted, Bytes payload, const std::string& status);

    std::uint64_t add_timer(Tick at, std::function<void()> fn);

    const LookupTable& lookup() const { return lookup_; }
    const FidCache& fid_cache() const { return cache_; }
    const NodeStats& stats() const { return stats_; }
    NodeStats& stats() { return stats_; }
    const SubscriptionHandle& handle(HandleId id) const { return handles_.at(id); }
    const std::map<HandleId, SubscriptionHandle>& handles() const { return handles_; }
    CoapGateway& gateway() { return *gateway_; }
    const CoapGateway& gateway() const { return *gateway_; }

private:
    struct QueuedSend {
        IcnMessage msg;
        Phase phase;
    };
    struct Aggregate {
        ForwardingId merged;
        std::vector<Recipient> routed;
        std::vector<Recipient> unrouted;
        IcnMessage basis;
        std::uint64_t generation = 0;
    };
    using ItemKey = std::pair<ScopeId, std::string>;

    void transmit(const Resolution& res, IcnMessage msg, Phase phase);
    void on_resolution_reply(const ResolutionReply& reply);
    void on_rv_reply(const RvReply& reply);
    void send_subscription(HandleId handle, const ScopeId& scope, const std::string& item, const std::string& target,
                           std::optional<CoapHeaders> coap);
    void complete(const ItemKey& key, const IcnMessage& response);
    void fail_pending(const ItemKey& key, const std::string& reason);
    void aggregate(const ItemKey& key, const IcnMessage& sub);
    void flush_aggregate(const ItemKey& key, const std::string& status);
    void count_resolution(const std::string& target);

    Config cfg_;
    NodeNetwork& net_;
    LookupTable lookup_;
    FidCache cache_;
    NodeStats stats_;
    std::map<std::string, std::vector<QueuedSend>> awaiting_resolution_;
    std::map<ScopeId, RvReply> rv_cache_;
    std::map<ScopeId, std::vector<QueuedSend>> awaiting_rv_;
    std::map<ScopeId, std::size_t> round_robin_;
    struct Content {
        Bytes data;
        Tick available_at = 0;
    };
    std::map<ItemKey, Content> content_;
    std::map<HandleId, SubscriptionHandle> handles_;
    std::map<ItemKey, std::vector<HandleId>> pending_handles_;
    std::map<ItemKey, Aggregate> aggregates_;
    std::uint64_t next_generation_ = 1;
    HandleId next_handle_ = 1;
    std::uint64_t next_timer_ = 1;
    std::map<std::uint64_t, std::function<void()>> timers_;
    std::unique_ptr<CoapGateway> gateway_;
};

}  // namespace edgeicn
