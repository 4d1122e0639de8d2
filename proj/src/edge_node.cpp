#include "edgeicn/edge_node.hpp"

#include <algorithm>

#include "edgeicn/coap.hpp"

namespace edgeicn {

Mode parse_mode(std::string_view s) {
    if (s == "edge-icn") return Mode::EdgeIcn;
    if (s == "point") return Mode::Point;
    throw Error("unknown mode '" + std::string(s) + "' (expected edge-icn or point)");
}

std::string to_string(Mode m) { return m == Mode::EdgeIcn ? "edge-icn" : "point"; }

SelectionPolicy parse_selection_policy(std::string_view s) {
    if (s == "first") return SelectionPolicy::First;
    if (s == "round-robin") return SelectionPolicy::RoundRobin;
    throw Error("unknown selection policy '" + std::string(s) + "'");
}

bool LookupTable::insert(const ScopeId& scope, const std::string& provider) {
    auto& providers = entries_[scope];
    if (std::find(providers.begin(), providers.end(), provider) != providers.end()) return false;
    providers.push_back(provider);
    return true;
}

const std::vector<std::string>* LookupTable::find(const ScopeId& scope) const {
    auto it = entries_.find(scope);
    return it == entries_.end() ? nullptr : &it->second;
}

const Resolution* FidCache::find(const std::string& target) const {
    auto it = entries_.find(target);
    return it == entries_.end() ? nullptr : &it->second;
}

EdgeNode::EdgeNode(Config cfg, NodeNetwork& net)
    : cfg_(std::move(cfg)), net_(net), gateway_(std::make_unique<CoapGateway>(*this)) {}

EdgeNode::~EdgeNode() = default;

bool EdgeNode::has_id(std::string_view id) const {
    return id == cfg_.name || std::find(cfg_.aliases.begin(), cfg_.aliases.end(), id) != cfg_.aliases.end();
}

void EdgeNode::put_content(const ScopeId& scope, const std::string& item, Bytes data, Tick available_at) {
    content_[{scope, item}] = {std::move(data), available_at};
}

bool EdgeNode::owns_scope(const ScopeId& scope) const {
    auto it = content_.lower_bound({scope, std::string()});
    if (it != content_.end() && it->first.first == scope) return true;
    return gateway_->serves_scope(scope);
}

void EdgeNode::advertise(const ScopeId& scope, std::optional<std::string> sender, const std::string& target) {
    ++stats_.advertisements_sent;
    std::string from = sender.value_or(cfg_.name);
    if (cfg_.mode == Mode::Point) {
        net_.send_control(cfg_.index, RvAdvertise{scope, from}, Phase::Advertise);
        return;
    }
    IcnMessage msg;
    msg.kind = IcnMessage::Kind::Advertisement;
    msg.scope = scope;
    msg.sender = std::move(from);
    msg.destination = target;
    send_to(target, std::move(msg), Phase::Advertise);
}

void EdgeNode::on_advertisement(const IcnMessage& msg) {
    if (has_id(msg.sender)) {
        ++stats_.ignored;
        return;
    }
    ++stats_.advertisements_received;
    lookup_.insert(msg.scope, msg.sender);
}

std::string EdgeNode::select_target(const ScopeId& scope, SelectionPolicy policy) {
    const auto* candidates = lookup_.find(scope);
    if (!candidates) throw ScopeNotAdvertised(scope);
    if (policy == SelectionPolicy::RoundRobin) {
        auto& turn = round_robin_[scope];
        return (*candidates)[turn++ % candidates->size()];
    }
    return candidates->front();
}

HandleId EdgeNode::subscribe(const ScopeId& scope, const std::string& item, SelectionPolicy policy,
                             std::optional<CoapHeaders> coap) {
    const ItemKey key{scope, item};
    auto& waiting = pending_handles_[key];
    const bool join = !waiting.empty() && !coap;

    std::string target;
    if (!join && cfg_.mode == Mode::EdgeIcn) {
        try {
            target = select_target(scope, policy);
        } catch (const ScopeNotAdvertised&) {
            if (waiting.empty()) pending_handles_.erase(key);
            throw;
        }
    }

    SubscriptionHandle h;
    h.id = next_handle_++;
    h.scope = scope;
    h.item = item;
    h.target = target;
    h.issued = now();
    const HandleId id = h.id;
    handles_.emplace(id, std::move(h));
    waiting.push_back(id);

    add_timer(now() + cfg_.timeout, [this, id, key] {
        auto& hh = handles_.at(id);
        if (hh.state != SubscriptionHandle::State::Pending) return;
        hh.state = SubscriptionHandle::State::Failed;
        hh.reason = "timeout";
        hh.finished = now();
        ++stats_.failed_subscriptions;
        if (auto it = pending_handles_.find(key); it != pending_handles_.end()) {
            std::erase(it->second, id);
            if (it->second.empty()) pending_handles_.erase(it);
        }
    });

    if (!join) send_subscription(id, scope, item, target, std::move(coap));
    return id;
}

void EdgeNode::send_subscription(HandleId, const ScopeId& scope, const std::string& item, const std::string& target,
                                 std::optional<CoapHeaders> coap) {
    ++stats_.subscriptions_sent;
    IcnMessage msg;
    msg.kind = IcnMessage::Kind::Subscription;
    msg.scope = scope;
    msg.item = item;
    msg.sender = cfg_.name;
    msg.destination = target;
    msg.coap = std::move(coap);

    if (cfg_.mode == Mode::EdgeIcn) {
        send_to(target, std::move(msg), Phase::Transfer);
        return;
    }
    // POINT: the rendezvous point resolves scopes, once per (subscriber, scope).
    if (auto it = rv_cache_.find(scope); it != rv_cache_.end()) {
        msg.destination = it->second.provider;
        msg.reverse = it->second.resolution->reverse;
        transmit(*it->second.resolution, std::move(msg), Phase::Transfer);
        return;
    }
    auto& queue = awaiting_rv_[scope];
    const bool first = queue.empty();
    queue.push_back({std::move(msg), Phase::Transfer});
    if (first) {
        count_resolution(scope);
        net_.send_control(cfg_.index, RvRequest{scope, cfg_.index}, Phase::Resolve);
    }
}

void EdgeNode::count_resolution(const std::string& target) {
    ++stats_.resolution_packets;
    ++stats_.resolutions_by_target[target];
}

void EdgeNode::send_to(const std::string& target, IcnMessage msg, Phase phase, std::vector<std::string> context_labels) {
    if (const auto* res = cache_.find(target)) {
        transmit(*res, std::move(msg), phase);
        return;
    }
    const Phase resolution_phase = msg.kind == IcnMessage::Kind::Advertisement ? Phase::Bootstrap : Phase::Resolve;
    auto& queue = awaiting_resolution_[target];
    const bool first = queue.empty();
    queue.push_back({std::move(msg), phase});
    if (first) {
        count_resolution(target);
        net_.send_control(cfg_.index, ResolutionRequest{target, std::move(context_labels), cfg_.index},
                          resolution_phase);
    }
}

void EdgeNode::transmit(const Resolution& res, IcnMessage msg, Phase phase) {
    if (msg.kind == IcnMessage::Kind::Subscription && msg.reverse.empty()) msg.reverse = res.reverse;
    if (res.forward.empty()) return;  // nobody else to reach
    net_.send_bloom(cfg_.index, res.forward, std::move(msg), phase);
}

void EdgeNode::on_control(const ControlBody& body) {
    if (const auto* r = std::get_if<ResolutionReply>(&body))
        on_resolution_reply(*r);
    else if (const auto* rv = std::get_if<RvReply>(&body))
        on_rv_reply(*rv);
}

void EdgeNode::on_resolution_reply(const ResolutionReply& reply) {
    auto it = awaiting_resolution_.find(reply.target);
    if (it == awaiting_resolution_.end()) return;
    auto queue = std::move(it->second);
    awaiting_resolution_.erase(it);
    if (!reply.resolution) {
        for (const auto& q : queue)
            if (q.msg.kind == IcnMessage::Kind::Subscription)
                fail_pending({q.msg.scope, q.msg.item}, "resolution failure: " + reply.error);
        return;
    }
    cache_.insert(reply.target, *reply.resolution);
    for (auto& q : queue) transmit(*reply.resolution, std::move(q.msg), q.phase);
}

void EdgeNode::on_rv_reply(const RvReply& reply) {
    auto it = awaiting_rv_.find(reply.scope);
    if (it == awaiting_rv_.end()) return;
    auto queue = std::move(it->second);
    awaiting_rv_.erase(it);
    if (!reply.resolution) {
        for (const auto& q : queue) fail_pending({q.msg.scope, q.msg.item}, reply.error);
        return;
    }
    rv_cache_[reply.scope] = reply;
    for (auto& q : queue) {
        q.msg.destination = reply.provider;
        q.msg.reverse = reply.resolution->reverse;
        transmit(*reply.resolution, std::move(q.msg), q.phase);
    }
}

void EdgeNode::receive(const IcnMessage& msg) {
    switch (msg.kind) {
        case IcnMessage::Kind::Advertisement:
            on_advertisement(msg);
            break;
        case IcnMessage::Kind::Subscription:
            on_subscription(msg);
            break;
        case IcnMessage::Kind::Response:
            on_response(msg);
            break;
    }
}

void EdgeNode::on_subscription(const IcnMessage& msg) {
    if (msg.coap) {
        gateway_->on_icn_coap_subscription(msg);
        return;
    }
    const ItemKey key{msg.scope, msg.item};
    const Recipient who{msg.sender, 0};
    if (auto it = content_.find(key); it != content_.end()) {
        if (it->second.available_at <= now()) {
            if (msg.reverse.empty())
                reply(msg, {}, {}, {who}, it->second.data, "ok");
            else
                reply(msg, msg.reverse, {who}, {}, it->second.data, "ok");
        } else {
            aggregate(key, msg);
        }
        return;
    }
    if (owns_scope(msg.scope)) {
        // Group pulls are answered only by members holding the item.
        if (net_.is_virtual(msg.destination)) {
            ++stats_.ignored;
        } else if (msg.reverse.empty()) {
            reply(msg, {}, {}, {who}, {}, "not-found");
        } else {
            reply(msg, msg.reverse, {who}, {}, {}, "not-found");
        }
        return;
    }
    ++stats_.drops;
}

void EdgeNode::aggregate(const ItemKey& key, const IcnMessage& sub) {
    auto [it, fresh] = aggregates_.try_emplace(key);
    auto& agg = it->second;
    if (fresh) {
        agg.basis = sub;
        agg.generation = next_generation_++;
        ++stats_.upstream_requests;
        const auto gen = agg.generation;
        add_timer(now() + cfg_.timeout, [this, key, gen] {
            auto f = aggregates_.find(key);
            if (f != aggregates_.end() && f->second.generation == gen) flush_aggregate(key, "timeout");
        });
    }
    const Recipient who{sub.sender, 0};
    auto present = [&](const std::vector<Recipient>& v) { return std::find(v.begin(), v.end(), who) != v.end(); };
    if (present(agg.routed) || present(agg.unrouted)) return;
    if (sub.reverse.empty()) {
        agg.unrouted.push_back(who);
    } else {
        agg.merged |= sub.reverse;
        agg.routed.push_back(who);
    }
}

void EdgeNode::flush_aggregate(const ItemKey& key, const std::string& status) {
    auto it = aggregates_.find(key);
    if (it == aggregates_.end()) return;
    Aggregate agg = std::move(it->second);
    aggregates_.erase(it);
    Bytes payload;
    if (status == "ok") payload = content_.at(key).data;
    reply(agg.basis, agg.merged, agg.routed, agg.unrouted, std::move(payload), status);
}

void EdgeNode::on_content_available(const ScopeId& scope, const std::string& item) {
    flush_aggregate({scope, item}, "ok");
}

void EdgeNode::reply(const IcnMessage& basis, const ForwardingId& merged, const std::vector<Recipient>& routed,
                     const std::vector<Recipient>& unrouted, Bytes payload, const std::string& status) {
    IcnMessage r;
    r.kind = IcnMessage::Kind::Response;
    r.scope = basis.scope;
    r.item = basis.item;
    r.sender = cfg_.name;
    r.coap = basis.coap;
    r.payload = std::move(payload);
    r.status = status;
    if (!routed.empty()) {
        IcnMessage multi = r;
        multi.recipients = routed;
        ++stats_.responses_sent;
        if (!merged.empty()) net_.send_bloom(cfg_.index, merged, std::move(multi), Phase::Transfer);
    }
    for (const auto& who : unrouted) {
        IcnMessage single = r;
        single.recipients = {who};
        single.destination = who.node;
        ++stats_.responses_sent;
        send_to(who.node, std::move(single), Phase::Transfer);
    }
}

void EdgeNode::on_response(const IcnMessage& msg) {
    if (msg.coap) gateway_->on_icn_coap_response(msg);
    complete({msg.scope, msg.item}, msg);
}

void EdgeNode::complete(const ItemKey& key, const IcnMessage& response) {
    auto it = pending_handles_.find(key);
    if (it == pending_handles_.end()) return;
    const bool ok = response.status == "ok" || response.status.starts_with("2.");
    for (auto id : it->second) {
        auto& h = handles_.at(id);
        if (h.state != SubscriptionHandle::State::Pending) continue;
        h.finished = now();
        h.responder = response.sender;
        if (ok) {
            h.state = SubscriptionHandle::State::Completed;
            h.data = response.payload;
        } else {
            h.state = SubscriptionHandle::State::Failed;
            h.reason = response.status;
            ++stats_.failed_subscriptions;
        }
    }
    pending_handles_.erase(it);
}

void EdgeNode::fail_pending(const ItemKey& key, const std::string& reason) {
    auto it = pending_handles_.find(key);
    if (it == pending_handles_.end()) return;
    for (auto id : it->second) {
        auto& h = handles_.at(id);
        if (h.state != SubscriptionHandle::State::Pending) continue;
        h.state = SubscriptionHandle::State::Failed;
        h.reason = reason;
        h.finished = now();
        ++stats_.failed_subscriptions;
    }
    pending_handles_.erase(it);
}

std::uint64_t EdgeNode::add_timer(Tick at, std::function<void()> fn) {
    const auto id = next_timer_++;
    timers_.emplace(id, std::move(fn));
    net_.set_timer(cfg_.index, at, id);
    return id;
}

void EdgeNode::on_timer(std::uint64_t timer_id) {
    auto it = timers_.find(timer_id);
    if (it == timers_.end()) return;
    auto fn = std::move(it->second);
    timers_.erase(it);
    fn();
}

}  // namespace edgeicn
