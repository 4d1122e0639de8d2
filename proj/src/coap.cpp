#include "edgeicn/coap.hpp"

#include <algorithm>
#include <cctype>

namespace edgeicn {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::optional<ContextHost> ContextHost::parse(std::string_view host) {
    const std::string h = lowercase(host);
    ContextHost ctx;
    std::size_t start = 0;
    while (true) {
        auto dot = h.find('.', start);
        auto label = h.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (label.empty()) return std::nullopt;
        ctx.labels.push_back(std::move(label));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (ctx.labels.size() < 2 || ctx.labels.front() != "all") return std::nullopt;
    return ctx;
}

ScopeId map_host_to_scope(std::string_view uri_host) {
    if (uri_host.empty()) throw Error("CoAP request without Uri-Host");
    return lowercase(uri_host);
}

std::string to_string(CoapOutcome o) {
    switch (o) {
        case CoapOutcome::Subscribed:
            return "subscribed";
        case CoapOutcome::Aggregated:
            return "aggregated";
        case CoapOutcome::GroupRequest:
            return "group-request";
        case CoapOutcome::LegacyFallback:
            return "legacy-fallback";
    }
    return "?";
}

void CoapGateway::add_resource(const std::string& uri_host, const std::string& uri_path, Bytes data,
                               Tick available_at) {
    auto& versions = resources_[{map_host_to_scope(uri_host), uri_path}];
    versions.push_back({std::move(data), available_at});
    std::stable_sort(versions.begin(), versions.end(),
                     [](const Version& a, const Version& b) { return a.available_at < b.available_at; });
}

bool CoapGateway::serves_scope(const ScopeId& scope) const {
    auto it = resources_.lower_bound({scope, std::string()});
    return it != resources_.end() && it->first.first == scope;
}

std::vector<std::pair<std::string, std::string>> CoapGateway::resources() const {
    std::vector<ResourceKey> out;
    for (const auto& [key, _] : resources_) out.push_back(key);
    return out;
}

std::vector<ScopeId> CoapGateway::advertise_resources() {
    std::vector<ScopeId> hosts;
    for (const auto& [key, _] : resources_)
        if (hosts.empty() || hosts.back() != key.first) hosts.push_back(key.first);
    for (const auto& h : hosts) node_.advertise(h);
    return hosts;
}

const CoapGateway::Version* CoapGateway::current(const ResourceKey& key) const {
    auto it = resources_.find(key);
    if (it == resources_.end()) return nullptr;
    const Version* best = nullptr;
    for (const auto& v : it->second)
        if (v.available_at <= node_.now()) best = &v;
    return best;
}

std::optional<CoapGateway::ResourceKey> CoapGateway::match_resource(const CoapHeaders& h) const {
    const std::string host = lowercase(h.uri_host);
    if (node_.network().is_virtual(host) || ContextHost::parse(host)) {
        // Group requests name a group, not a host; any local resource with the path answers.
        for (const auto& [key, _] : resources_)
            if (key.second == h.uri_path) return key;
        return std::nullopt;
    }
    ResourceKey key{host, h.uri_path};
    if (resources_.contains(key)) return key;
    return std::nullopt;
}

CoapOutcome CoapGateway::on_coap_request(const CoapRequest& req) {
    ++stats_.requests;
    const ScopeId host = map_host_to_scope(req.uri_host);
    CoapHeaders h{req.method, host, req.uri_path, req.message_id, req.confirmable, req.observe};
    const Tick deadline = node_.now() + 2 * node_.timeout();

    const auto ctx = ContextHost::parse(host);
    if (node_.network().is_virtual(host) || ctx) {
        ++stats_.group_requests;
        client_pending_[req.message_id] = {host, req.uri_path, {req.message_id}, true, req.observe, false};
        const auto mid = req.message_id;
        node_.add_timer(deadline, [this, mid] {
            auto it = client_pending_.find(mid);
            if (it != client_pending_.end() && !it->second.observe) client_pending_.erase(it);
        });
        IcnMessage msg;
        msg.kind = IcnMessage::Kind::Subscription;
        msg.scope = host;
        msg.item = req.uri_path;
        msg.sender = node_.name();
        msg.destination = host;
        msg.coap = h;
        ++node_.stats().subscriptions_sent;
        std::vector<std::string> labels;
        if (!node_.network().is_virtual(host)) labels = ctx->groups();
        node_.send_to(host, std::move(msg), Phase::Transfer, std::move(labels));
        return CoapOutcome::GroupRequest;
    }

    if (!node_.lookup().contains(host)) {
        ++stats_.legacy_fallbacks;
        client_responses_.push_back({"5.02", req.message_id, {}, {}, node_.now()});
        return CoapOutcome::LegacyFallback;
    }

    const ResourceKey key{host, req.uri_path};
    if (!req.observe) {
        if (auto it = client_by_key_.find(key); it != client_by_key_.end()) {
            client_pending_.at(it->second).message_ids.push_back(req.message_id);
            return CoapOutcome::Aggregated;
        }
        client_by_key_[key] = req.message_id;
    }
    client_pending_[req.message_id] = {host, req.uri_path, {req.message_id}, false, req.observe, false};
    const auto mid = req.message_id;
    node_.add_timer(deadline, [this, mid, key] {
        auto it = client_pending_.find(mid);
        if (it == client_pending_.end() || it->second.observe) return;
        for (auto id : it->second.message_ids) client_responses_.push_back({"5.04", id, {}, {}, node_.now()});
        if (auto k = client_by_key_.find(key); k != client_by_key_.end() && k->second == mid) client_by_key_.erase(k);
        client_pending_.erase(it);
    });
    node_.subscribe(host, req.uri_path, SelectionPolicy::First, h);
    return CoapOutcome::Subscribed;
}

void CoapGateway::on_icn_coap_response(const IcnMessage& msg) {
    for (const auto& r : msg.recipients) {
        if (!node_.has_id(r.node)) continue;
        auto it = client_pending_.find(r.message_id);
        if (it == client_pending_.end()) continue;
        auto& p = it->second;
        for (auto id : p.message_ids) client_responses_.push_back({msg.status, id, msg.payload, msg.sender, node_.now()});
        p.answered = true;
        if (p.group || p.observe) continue;
        if (auto k = client_by_key_.find({p.host, p.path}); k != client_by_key_.end() && k->second == it->first)
            client_by_key_.erase(k);
        client_pending_.erase(it);
    }
}

void CoapGateway::add_waiter(ServerWaiters& w, const IcnMessage& msg) {
    Waiter waiter{{msg.sender, msg.coap->message_id}, msg.reverse, msg.coap->observe};
    for (const auto& existing : w.waiters)
        if (existing.who == waiter.who) return;
    w.waiters.push_back(std::move(waiter));
}

void CoapGateway::answer(ServerWaiters& w, const std::string& code, const Bytes& payload) {
    ForwardingId merged;
    std::vector<Recipient> routed, unrouted;
    for (const auto& waiter : w.waiters) {
        if (waiter.reverse.empty()) {
            unrouted.push_back(waiter.who);
        } else {
            merged |= waiter.reverse;
            routed.push_back(waiter.who);
        }
    }
    node_.reply(w.basis, merged, routed, unrouted, payload, code);
}

void CoapGateway::on_icn_coap_subscription(const IcnMessage& msg) {
    ++stats_.icn_requests;
    const CoapHeaders& h = *msg.coap;
    const auto key = match_resource(h);
    const bool group = node_.network().is_virtual(msg.destination) || ContextHost::parse(msg.destination);
    if (!key) {
        if (group)
            ++stats_.ignored;
        else
            ++node_.stats().drops;
        return;
    }

    if (h.observe) {
        auto& obs = observers_[*key];
        if (obs.waiters.empty()) obs.basis = msg;
        add_waiter(obs, msg);
    }

    if (const Version* v = current(*key)) {
        ServerWaiters w;
        w.basis = msg;
        add_waiter(w, msg);
        answer(w, "2.05", v->data);
        return;
    }

    // Not available yet: acknowledge now, answer separately later.
    ++stats_.acks;
    auto [it, fresh] = server_pending_.try_emplace(*key);
    if (fresh) {
        it->second.basis = msg;
        it->second.generation = next_generation_++;
        ++node_.stats().upstream_requests;
        const auto gen = it->second.generation;
        const auto k = *key;
        node_.add_timer(node_.now() + node_.timeout(), [this, k, gen] {
            auto f = server_pending_.find(k);
            if (f == server_pending_.end() || f->second.generation != gen) return;
            ServerWaiters w = std::move(f->second);
            server_pending_.erase(f);
            answer(w, "4.04", {});
        });
    }
    add_waiter(it->second, msg);
}

void CoapGateway::on_resource_available(const std::string& uri_host, const std::string& uri_path) {
    const ResourceKey key{map_host_to_scope(uri_host), uri_path};
    const Version* v = current(key);
    if (!v) return;

    ServerWaiters combined;
    if (auto it = server_pending_.find(key); it != server_pending_.end()) {
        combined = std::move(it->second);
        server_pending_.erase(it);
    }
    if (auto obs = observers_.find(key); obs != observers_.end()) {
        if (combined.waiters.empty()) combined.basis = obs->second.basis;
        for (const auto& w : obs->second.waiters) {
            if (std::none_of(combined.waiters.begin(), combined.waiters.end(),
                             [&](const Waiter& c) { return c.who == w.who; }))
                combined.waiters.push_back(w);
        }
    }
    if (combined.waiters.empty()) return;
    answer(combined, "2.05", v->data);
}

}  // namespace edgeicn
