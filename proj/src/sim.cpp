#include "edgeicn/sim.hpp"

#include <algorithm>
#include <limits>

#include "edgeicn/coap.hpp"

namespace edgeicn {

struct Simulation::Packet {
    std::uint64_t id = 0;
    ForwardingId fid;
    IcnMessage msg;
    Phase phase = Phase::Transfer;
    bool probe = false;
};

struct Simulation::ControlTransit {
    ControlBody body;
    Phase phase = Phase::Resolve;
    std::vector<LinkIndex> route;
    bool upward = true;  // towards the control service
    NodeIndex origin = 0;
};

Rational measure_l_units(const Counters& c, std::uint64_t l) {
    if (l == 0) throw Error("l must be at least 1");
    const auto steps = c.hops_by_phase[static_cast<std::size_t>(Phase::Advertise)] +
                       c.hops_by_phase[static_cast<std::size_t>(Phase::Resolve)];
    if (steps > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) ||
        l > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw Error("hop count out of range");
    return Rational(static_cast<std::int64_t>(steps), static_cast<std::int64_t>(l));
}

void RendezvousPoint::store(const ScopeId& scope, const std::string& provider) {
    auto& v = scopes_[scope];
    if (std::find(v.begin(), v.end(), provider) == v.end()) v.push_back(provider);
}

std::optional<std::string> RendezvousPoint::provider(const ScopeId& scope) const {
    auto it = scopes_.find(scope);
    if (it == scopes_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
}

Simulation::Simulation(std::shared_ptr<const Topology> topo, Options opts)
    : topo_(std::move(topo)), opts_(opts), controller_(topo_), switches_(install_all(*topo_)) {
    if (!topo_->switches().empty()) service_ = topo_->controller_switch().value_or(topo_->center());
    for (NodeIndex i = 0; i < topo_->nodes().size(); ++i) {
        const auto& info = topo_->nodes()[i];
        nodes_.push_back(std::make_unique<EdgeNode>(
            EdgeNode::Config{i, info.name, info.aliases, opts_.mode, opts_.timeout}, static_cast<NodeNetwork&>(*this)));
    }
}

namespace {

std::shared_ptr<const Topology> topology_for(const ScenarioConfig& cfg, std::optional<std::uint64_t> seed) {
    BloomParams bloom = cfg.bloom;
    if (seed) bloom.seed = *seed;
    return std::make_shared<const Topology>(build_topology(cfg.topology, bloom));
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg, Mode mode, std::optional<std::uint64_t> seed, bool record_trace)
    : Simulation(topology_for(cfg, seed), Options{mode, cfg.hop_limit, cfg.timeout, record_trace}) {
    try {
        for (const auto& g : cfg.topology.groups) controller_.register_virtual(g.name, g.members);
    } catch (const Error& e) {
        throw ParseError(cfg.topology.groups.front().line, e.what());
    }
    for (const auto& g : cfg.context_groups) {
        try {
            controller_.register_virtual(g.label, g.members);
        } catch (const Error& e) {
            throw ParseError(g.line, e.what());
        }
    }
    for (const auto& c : cfg.contents) {
        auto n = topo_->node_index(c.node);
        nodes_[n]->put_content(c.scope, c.item, c.data, c.available_at);
        if (c.available_at > 0) schedule(c.available_at, AvailabilityEvent{n, false, c.scope, c.item});
    }
    for (const auto& r : cfg.coap_resources) {
        auto n = topo_->node_index(r.node);
        nodes_[n]->gateway().add_resource(r.host, r.path, r.data, r.available_at);
        if (r.available_at > 0) schedule(r.available_at, AvailabilityEvent{n, true, r.host, r.path});
    }
    actions_ = cfg.actions;
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        const auto& a = actions_[i];
        const bool coap = a.kind == ScenarioAction::Kind::CoapAdvertise || a.kind == ScenarioAction::Kind::CoapGet;
        if (coap && mode == Mode::Point) throw ParseError(a.line, "CoAP stanzas are only supported in edge-icn mode");
        if (a.at)
            schedule(*a.at, ActionEvent{i, false});
        else
            sequential_.push_back(i);
    }
}

Simulation::~Simulation() = default;

EdgeNode& Simulation::node(std::string_view name) { return *nodes_.at(topo_->node_index(name)); }

void Simulation::add(std::uint64_t& counter, std::uint64_t v) {
    counter = v > std::numeric_limits<std::uint64_t>::max() - counter ? std::numeric_limits<std::uint64_t>::max()
                                                                      : counter + v;
}

Simulation::EventKey Simulation::schedule(Tick at, EventBody body) {
    EventKey key{at, next_seq_++};
    if (std::holds_alternative<CopyEvent>(body) || std::holds_alternative<ControlEvent>(body)) ++in_flight_;
    queue_.emplace(key, std::move(body));
    return key;
}

void Simulation::run() {
    while (true) {
        if (in_flight_ == 0 && !sequential_queued_ && next_sequential_ < sequential_.size()) {
            schedule(now_, ActionEvent{sequential_[next_sequential_++], true});
            sequential_queued_ = true;
        }
        if (queue_.empty()) break;
        auto it = queue_.begin();
        now_ = it->first.first;
        EventBody body = std::move(it->second);
        queue_.erase(it);
        dispatch(body);
    }
}

void Simulation::dispatch(EventBody& body) {
    if (auto* c = std::get_if<CopyEvent>(&body)) {
        --in_flight_;
        coalesce_.erase({c->packet->id, c->link, now_});
        on_copy(*c);
    } else if (auto* ctl = std::get_if<ControlEvent>(&body)) {
        --in_flight_;
        on_control_hop(*ctl);
    } else if (auto* a = std::get_if<ActionEvent>(&body)) {
        if (a->sequential) sequential_queued_ = false;
        run_action(actions_[a->action]);
    } else if (auto* t = std::get_if<TimerEvent>(&body)) {
        nodes_[t->node]->on_timer(t->id);
    } else if (auto* av = std::get_if<AvailabilityEvent>(&body)) {
        if (av->coap)
            nodes_[av->node]->gateway().on_resource_available(av->a, av->b);
        else
            nodes_[av->node]->on_content_available(av->a, av->b);
    }
}

void Simulation::record(SwitchIndex sw, EtherType et, const Bits256& fid, const std::string& action) {
    if (opts_.record_trace) trace_.push_back(trace_line(now_, topo_->switches()[sw], et, fid, action));
}

void Simulation::run_action(const ScenarioAction& a) {
    EdgeNode& n = node(a.node);
    try {
        switch (a.kind) {
            case ScenarioAction::Kind::Advertise:
                n.advertise(a.scope, a.sender);
                break;
            case ScenarioAction::Kind::Subscribe:
                n.subscribe(a.scope, a.item, a.policy);
                break;
            case ScenarioAction::Kind::CoapAdvertise:
                n.gateway().advertise_resources();
                break;
            case ScenarioAction::Kind::CoapGet: {
                CoapRequest req;
                req.uri_host = a.scope;
                req.uri_path = a.item;
                req.message_id = ++coap_message_ids_[n.index()];
                req.observe = a.observe;
                n.gateway().on_coap_request(req);
                break;
            }
        }
    } catch (const Error&) {
        ++counters_.failed_actions;
    }
}

// ---- Bloom-routed packets ----

void Simulation::send_bloom(NodeIndex from, const ForwardingId& fid, IcnMessage msg, Phase phase) {
    auto p = std::make_shared<Packet>();
    p->id = next_packet_++;
    p->fid = fid;
    p->msg = std::move(msg);
    p->phase = phase;
    emit_copy(p, topo_->nodes()[from].uplink, opts_.hop_limit, 1);
}

DeliveryReport Simulation::probe(NodeIndex from, const ForwardingId& fid, std::optional<int> hop_limit) {
    auto p = std::make_shared<Packet>();
    p->id = next_packet_++;
    p->fid = fid;
    p->probe = true;
    probe_.emplace();
    emit_copy(p, topo_->nodes().at(from).uplink, hop_limit.value_or(opts_.hop_limit), 1);
    run();
    DeliveryReport out = std::move(*probe_);
    probe_.reset();
    return out;
}

void Simulation::emit_copy(const std::shared_ptr<const Packet>& p, LinkIndex link, int hop_limit,
                           std::uint64_t mult) {
    add(counters_.hop_traversals, mult);
    add(counters_.hops_by_phase[static_cast<std::size_t>(p->phase)], mult);
    add(counters_.copies_emitted, mult);
    add(counters_.copies_pending, mult);
    if (p->probe && probe_) {
        add(probe_->copies_emitted, mult);
        probe_->links_used.insert(link);
    }
    // Copies of one packet on the same link at the same tick are indistinguishable;
    // they travel as one event with a multiplicity.
    const Tick at = now_ + 1;
    if (auto it = coalesce_.find({p->id, link, at}); it != coalesce_.end()) {
        auto& ev = std::get<CopyEvent>(queue_.at(it->second));
        add(ev.multiplicity, mult);
        return;
    }
    coalesce_.emplace(std::tuple{p->id, link, at}, schedule(at, CopyEvent{p, link, hop_limit, mult}));
}

void Simulation::on_copy(const CopyEvent& e) {
    const auto m = e.multiplicity;
    counters_.copies_pending -= std::min(counters_.copies_pending, m);
    const auto& link = topo_->links()[e.link];
    if (link.to.kind == Endpoint::Kind::Node) {
        add(counters_.copies_delivered, m);
        deliver_bloom(link.to.index, *e.packet, m);
        return;
    }
    const SwitchIndex sw = link.to.index;
    const auto actions =
        switches_[sw].forward({EtherType::BloomRouted, e.packet->fid.bits(), e.hop_limit, e.link});
    bool forwarded = false;
    for (const auto& a : actions) {
        if (a.kind == SwitchAction::Kind::Output) {
            record(sw, EtherType::BloomRouted, e.packet->fid.bits(), "out:" + topo_->links()[a.link].key);
            emit_copy(e.packet, a.link, a.hop_limit, m);
            forwarded = true;
        } else {
            record(sw, EtherType::BloomRouted, e.packet->fid.bits(), "drop");
            add(counters_.copies_dropped, m);
            add(counters_.drops, m);
            if (e.packet->probe && probe_) add(probe_->switch_drops, m);
        }
    }
    if (forwarded) add(counters_.copies_forwarded, m);
}

void Simulation::deliver_bloom(NodeIndex n, const Packet& p, std::uint64_t mult) {
    if (!seen_.insert({p.id, n}).second) {
        add(counters_.duplicate_deliveries, mult);
        if (p.probe && probe_) add(probe_->duplicate_copies, mult);
        return;
    }
    add(counters_.duplicate_deliveries, mult - 1);
    if (p.probe) {
        if (probe_) {
            probe_->delivered.insert(n);
            add(probe_->duplicate_copies, mult - 1);
        }
        return;
    }
    if (!accepts(n, p.msg)) {
        ++counters_.fp_deliveries;
        return;
    }
    nodes_[n]->receive(p.msg);
}

bool Simulation::accepts(NodeIndex n, const IcnMessage& msg) const {
    const EdgeNode& node = *nodes_[n];
    if (msg.kind == IcnMessage::Kind::Response)
        return std::any_of(msg.recipients.begin(), msg.recipients.end(),
                           [&](const Recipient& r) { return node.has_id(r.node); });
    const auto& dest = msg.destination;
    if (node.has_id(dest)) return true;
    auto member_of = [&](std::string_view group) {
        if (!controller_.is_virtual(group)) return false;
        auto m = controller_.members(group);
        return std::find(m.begin(), m.end(), n) != m.end();
    };
    if (controller_.is_virtual(dest)) return member_of(dest);
    if (auto ctx = ContextHost::parse(dest)) {
        auto groups = ctx->groups();
        return std::all_of(groups.begin(), groups.end(), member_of);
    }
    return false;
}

// ---- In-band control channel ----

void Simulation::send_control(NodeIndex from, ControlBody body, Phase phase) {
    auto t = std::make_shared<ControlTransit>();
    t->body = std::move(body);
    t->phase = phase;
    t->origin = from;
    const auto& info = topo_->nodes()[from];
    t->route.push_back(info.uplink);
    for (auto l : topo_->switch_path(info.attachment, service_)) t->route.push_back(l);
    launch_control(std::move(t));
}

void Simulation::reply_control(NodeIndex to, ControlBody body, Phase phase) {
    auto t = std::make_shared<ControlTransit>();
    t->body = std::move(body);
    t->phase = phase;
    t->upward = false;
    t->origin = to;
    const auto& info = topo_->nodes()[to];
    t->route = topo_->switch_path(service_, info.attachment);
    t->route.push_back(info.downlink);
    record(service_, EtherType::Resolution, Bits256{}, "out:" + topo_->links()[t->route.front()].key);
    launch_control(std::move(t));
}

void Simulation::launch_control(std::shared_ptr<ControlTransit> t) {
    add(counters_.hop_traversals, 1);
    add(counters_.hops_by_phase[static_cast<std::size_t>(t->phase)], 1);
    add(counters_.copies_emitted, 1);
    add(counters_.copies_pending, 1);
    schedule(now_ + 1, ControlEvent{std::move(t), 0});
}

void Simulation::on_control_hop(const ControlEvent& e) {
    auto& t = *e.transit;
    counters_.copies_pending -= std::min<std::uint64_t>(counters_.copies_pending, 1);
    const auto& link = topo_->links()[t.route[e.pos]];
    if (link.to.kind == Endpoint::Kind::Node) {
        add(counters_.copies_delivered, 1);
        nodes_[link.to.index]->on_control(t.body);
        return;
    }
    const SwitchIndex sw = link.to.index;
    const bool last = e.pos + 1 == t.route.size();
    if (last) {
        // Reached the controller's switch: hand the packet to the local service.
        record(sw, EtherType::Resolution, Bits256{}, "punt");
        add(counters_.copies_delivered, 1);
        serve_control(t);
        return;
    }
    const std::string action = e.pos == 0 && t.upward ? "punt" : "out:" + topo_->links()[t.route[e.pos + 1]].key;
    record(sw, EtherType::Resolution, Bits256{}, action);
    add(counters_.copies_forwarded, 1);
    add(counters_.hop_traversals, 1);
    add(counters_.hops_by_phase[static_cast<std::size_t>(t.phase)], 1);
    add(counters_.copies_emitted, 1);
    add(counters_.copies_pending, 1);
    schedule(now_ + 1, ControlEvent{e.transit, e.pos + 1});
}

void Simulation::serve_control(const ControlTransit& t) {
    if (const auto* req = std::get_if<ResolutionRequest>(&t.body)) {
        ResolutionReply reply{req->target, std::nullopt, {}};
        try {
            reply.resolution = req->context_labels.empty()
                                   ? controller_.resolve(req->target, req->requester)
                                   : controller_.resolve_context(req->context_labels, req->requester);
        } catch (const Error& e) {
            reply.error = e.what();
        }
        reply_control(req->requester, std::move(reply), t.phase);
    } else if (const auto* adv = std::get_if<RvAdvertise>(&t.body)) {
        rv_.store(adv->scope, adv->provider);
    } else if (const auto* rq = std::get_if<RvRequest>(&t.body)) {
        RvReply reply{rq->scope, {}, std::nullopt, {}};
        if (auto provider = rv_.provider(rq->scope)) {
            reply.provider = *provider;
            try {
                reply.resolution = controller_.resolve(*provider, rq->requester);
            } catch (const Error& e) {
                reply.error = e.what();
            }
        } else {
            reply.error = "scope not advertised: " + rq->scope;
        }
        reply_control(rq->requester, std::move(reply), t.phase);
    }
}

void Simulation::set_timer(NodeIndex node, Tick at, std::uint64_t timer_id) {
    schedule(std::max(at, now_), TimerEvent{node, timer_id});
}

bool Simulation::is_virtual(std::string_view name) const { return controller_.is_virtual(name); }

Counters Simulation::counters() const {
    Counters c = counters_;
    for (const auto& n : nodes_) {
        const auto& s = n->stats();
        c.resolution_packets += s.resolution_packets;
        c.advertisements += s.advertisements_sent;
        c.subscriptions += s.subscriptions_sent;
        c.responses += s.responses_sent;
        c.drops += s.drops;
        c.failed_subscriptions += s.failed_subscriptions;
        c.upstream_requests += s.upstream_requests;
        c.coap_acks += n->gateway().stats().acks;
        c.legacy_fallbacks += n->gateway().stats().legacy_fallbacks;
        for (const auto& [target, count] : s.resolutions_by_target) c.resolutions_by_target[{n->name(), target}] = count;
    }
    return c;
}

std::string Simulation::trace_text() const {
    std::string out;
    for (const auto& l : trace_) out += l + "\n";
    return out;
}

std::string RunResult::trace_text() const {
    std::string out;
    for (const auto& l : trace) out += l + "\n";
    return out;
}

std::string RunResult::counters_csv() const {
    const auto& c = counters;
    return std::string(kCountersCsvHeader) + "\n" + to_string(mode) + "," + std::to_string(shape.l) + "," +
           std::to_string(shape.scopes) + "," + std::to_string(shape.advertisers) + "," +
           std::to_string(shape.subscribers) + "," + std::to_string(c.hop_traversals) + "," + l_units().to_string() +
           "," + std::to_string(c.resolution_packets) + "," + std::to_string(c.fp_deliveries) + "," +
           std::to_string(c.duplicate_deliveries) + "," + std::to_string(c.drops) + "\n";
}

RunResult run_scenario(const ScenarioConfig& cfg, Mode mode, std::optional<std::uint64_t> seed, bool record_trace) {
    Simulation sim(cfg, mode, seed, record_trace);
    sim.run();
    RunResult r;
    r.mode = mode;
    r.shape = shape_of(cfg);
    r.counters = sim.counters();
    r.trace = sim.trace();
    return r;
}

}  // namespace edgeicn
