#include "edgeicn/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace edgeicn {

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

void expect_arity(const std::vector<std::string>& t, std::size_t n, std::size_t line, const char* usage) {
    if (t.size() != n) throw ParseError(line, std::string("expected `") + usage + "`");
}

}  // namespace

std::vector<std::string> tokenize_line(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

bool TopologySpec::consume(const std::vector<std::string>& t, std::size_t line) {
    const std::string& kw = t.front();
    if (kw == "switch") {
        expect_arity(t, 2, line, "switch <id>");
        switches.push_back({t[1], line});
    } else if (kw == "link") {
        expect_arity(t, 3, line, "link <sw> <sw>");
        links.push_back({t[1], t[2], line});
    } else if (kw == "node") {
        expect_arity(t, 3, line, "node <name> <sw>");
        nodes.push_back({t[1], t[2], line});
    } else if (kw == "vgroup") {
        expect_arity(t, 3, line, "vgroup <name> <member,...>");
        groups.push_back({t[1], split_commas(t[2]), line});
    } else if (kw == "alias") {
        expect_arity(t, 3, line, "alias <name> <node>");
        aliases.push_back({t[1], t[2], line});
    } else if (kw == "controller") {
        expect_arity(t, 2, line, "controller <sw>");
        if (controller) throw ParseError(line, "controller declared twice");
        controller = t[1];
        controller_line = line;
    } else {
        return false;
    }
    return true;
}

void TopologySpec::validate() const {
    std::map<std::string, std::size_t> sw_index;
    std::set<std::string> node_names;
    for (const auto& s : switches) {
        if (!sw_index.emplace(s.id, sw_index.size()).second)
            throw ParseError(s.line, "duplicate switch '" + s.id + "'");
    }
    for (const auto& n : nodes) {
        if (n.name.size() > kMaxNodeIdBytes) throw ParseError(n.line, "node id exceeds 1024 bytes");
        if (sw_index.count(n.name)) throw ParseError(n.line, "node name '" + n.name + "' clashes with a switch");
        if (!node_names.insert(n.name).second) throw ParseError(n.line, "duplicate node '" + n.name + "'");
        if (!sw_index.count(n.sw))
            throw ParseError(n.line, "dangling attachment: node '" + n.name + "' on unknown switch '" + n.sw + "'");
    }
    std::set<std::pair<std::string, std::string>> seen_links;
    std::vector<std::vector<std::size_t>> adj(switches.size());
    for (const auto& l : links) {
        for (const auto* end : {&l.a, &l.b})
            if (!sw_index.count(*end)) throw ParseError(l.line, "link references unknown switch '" + *end + "'");
        if (l.a == l.b) throw ParseError(l.line, "self link on '" + l.a + "'");
        auto key = std::minmax(l.a, l.b);
        if (!seen_links.insert({key.first, key.second}).second)
            throw ParseError(l.line, "duplicate link " + l.a + " " + l.b);
        adj[sw_index[l.a]].push_back(sw_index[l.b]);
        adj[sw_index[l.b]].push_back(sw_index[l.a]);
    }
    std::set<std::string> alias_names;
    for (const auto& a : aliases) {
        if (a.name.empty() || a.name.size() > kMaxNodeIdBytes) throw ParseError(a.line, "invalid node id length");
        if (!node_names.count(a.node)) throw ParseError(a.line, "alias references unknown node '" + a.node + "'");
        if (sw_index.count(a.name)) throw ParseError(a.line, "alias '" + a.name + "' clashes with a switch");
        alias_names.insert(a.name);
    }
    for (const auto& g : groups) {
        if (g.name == kAllNodes) throw ParseError(g.line, "all.nodes is implicit and cannot be redefined");
        if (node_names.count(g.name) || alias_names.count(g.name) || sw_index.count(g.name))
            throw ParseError(g.line, "group name '" + g.name + "' clashes with a node or switch");
        if (g.members.empty()) throw ParseError(g.line, "empty group '" + g.name + "'");
        for (const auto& m : g.members)
            if (!node_names.count(m)) throw ParseError(g.line, "group member '" + m + "' is not a node");
    }
    if (controller && !sw_index.count(*controller))
        throw ParseError(controller_line, "controller on unknown switch '" + *controller + "'");

    if (switches.empty()) return;
    std::vector<bool> seen(switches.size(), false);
    std::deque<std::size_t> q{0};
    seen[0] = true;
    while (!q.empty()) {
        auto s = q.front();
        q.pop_front();
        for (auto n : adj[s])
            if (!seen[n]) {
                seen[n] = true;
                q.push_back(n);
            }
    }
    for (std::size_t i = 0; i < switches.size(); ++i)
        if (!seen[i])
            throw ParseError(switches[i].line, "disconnected: switch '" + switches[i].id + "' is unreachable");
}

TopologySpec parse_topology(std::string_view text) {
    TopologySpec spec;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        auto tokens = tokenize_line(text.substr(pos, end - pos));
        if (!tokens.empty() && !spec.consume(tokens, lineno))
            throw ParseError(lineno, "unknown stanza '" + tokens.front() + "'");
        pos = end + 1;
    }
    spec.validate();
    return spec;
}

Topology build_topology(const TopologySpec& spec, const BloomParams& params) {
    params.validate();
    spec.validate();

    Topology t;
    t.bloom_ = params;
    for (const auto& s : spec.switches) {
        t.switch_index_.emplace(s.id, t.switches_.size());
        t.switches_.push_back(s.id);
    }
    t.out_links_.assign(t.switches_.size(), {});
    t.core_adj_.assign(t.switches_.size(), {});

    std::set<Bits256> used;
    auto add_link = [&](Endpoint from, Endpoint to) {
        DirectedLink l;
        l.from = from;
        l.to = to;
        l.key = t.endpoint_name(from) + "->" + t.endpoint_name(to);
        // Regenerate with a salted key on the (rare) exact collision so every
        // directed link keeps a distinct pattern.
        l.id = new_link_id(l.key, params);
        for (int salt = 1; used.count(l.id.bits()); ++salt)
            l.id = new_link_id(l.key + "#" + std::to_string(salt), params);
        used.insert(l.id.bits());
        t.links_.push_back(std::move(l));
        return t.links_.size() - 1;
    };

    for (const auto& decl : spec.links) {
        Endpoint a{Endpoint::Kind::Switch, t.switch_index_.at(decl.a)};
        Endpoint b{Endpoint::Kind::Switch, t.switch_index_.at(decl.b)};
        auto ab = add_link(a, b);
        auto ba = add_link(b, a);
        t.links_[ab].reverse = ba;
        t.links_[ba].reverse = ab;
        t.core_adj_[a.index].emplace_back(b.index, ab);
        t.core_adj_[b.index].emplace_back(a.index, ba);
    }
    for (const auto& decl : spec.nodes) {
        EdgeNodeInfo info;
        info.name = decl.name;
        info.attachment = t.switch_index_.at(decl.sw);
        NodeIndex idx = t.nodes_.size();
        t.node_index_.emplace(decl.name, idx);
        t.names_[decl.name].push_back(idx);
        t.nodes_.push_back(info);
        Endpoint n{Endpoint::Kind::Node, idx};
        Endpoint s{Endpoint::Kind::Switch, info.attachment};
        auto up = add_link(n, s);
        auto down = add_link(s, n);
        t.links_[up].reverse = down;
        t.links_[down].reverse = up;
        t.nodes_[idx].uplink = up;
        t.nodes_[idx].downlink = down;
    }
    for (const auto& a : spec.aliases) {
        NodeIndex idx = t.node_index_.at(a.node);
        auto& holders = t.names_[a.name];
        if (std::find(holders.begin(), holders.end(), idx) == holders.end()) holders.push_back(idx);
        t.nodes_[idx].aliases.push_back(a.name);
    }
    for (auto& [name, holders] : t.names_) std::sort(holders.begin(), holders.end());

    for (LinkIndex i = 0; i < t.links_.size(); ++i)
        if (t.links_[i].from.kind == Endpoint::Kind::Switch) t.out_links_[t.links_[i].from.index].push_back(i);
    for (auto& adj : t.core_adj_)
        std::sort(adj.begin(), adj.end(),
                  [&](const auto& x, const auto& y) { return t.switches_[x.first] < t.switches_[y.first]; });

    const std::size_t n = t.switches_.size();
    t.dist_.assign(n, std::vector<std::size_t>(n, kUnreachable));
    for (SwitchIndex src = 0; src < n; ++src) {
        auto& d = t.dist_[src];
        d[src] = 0;
        std::deque<SwitchIndex> q{src};
        while (!q.empty()) {
            auto s = q.front();
            q.pop_front();
            for (auto [nb, link] : t.core_adj_[s])
                if (d[nb] == kUnreachable) {
                    d[nb] = d[s] + 1;
                    q.push_back(nb);
                }
        }
    }

    if (spec.controller)
        t.controller_ = t.switch_index_.at(*spec.controller);
    else if (n > 0)
        t.controller_ = t.center();
    return t;
}

std::optional<SwitchIndex> Topology::find_switch(std::string_view id) const {
    if (auto it = switch_index_.find(id); it != switch_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<NodeIndex> Topology::find_node(std::string_view name) const {
    if (auto it = node_index_.find(name); it != node_index_.end()) return it->second;
    return std::nullopt;
}

std::vector<NodeIndex> Topology::nodes_named(std::string_view name) const {
    if (auto it = names_.find(name); it != names_.end()) return it->second;
    return {};
}

NodeIndex Topology::node_index(std::string_view name) const {
    if (auto n = find_node(name)) return *n;
    throw Error("unknown node '" + std::string(name) + "'");
}

std::vector<LinkIndex> Topology::switch_path(SwitchIndex a, SwitchIndex b) const {
    std::vector<LinkIndex> path;
    SwitchIndex cur = a;
    while (cur != b) {
        const std::size_t want = dist_[cur][b] - 1;
        // Neighbours are sorted by id, so the first hit is the smallest.
        for (auto [nb, link] : core_adj_[cur]) {
            if (dist_[nb][b] == want) {
                path.push_back(link);
                cur = nb;
                break;
            }
        }
    }
    return path;
}

std::vector<LinkIndex> Topology::shortest_path(NodeIndex from, NodeIndex to) const {
    if (from == to) return {};
    const auto& f = nodes_.at(from);
    const auto& d = nodes_.at(to);
    std::vector<LinkIndex> path{f.uplink};
    auto core = switch_path(f.attachment, d.attachment);
    path.insert(path.end(), core.begin(), core.end());
    path.push_back(d.downlink);
    return path;
}

std::size_t Topology::hop_distance(NodeIndex from, NodeIndex to) const {
    if (from == to) return 0;
    return dist_[nodes_.at(from).attachment][nodes_.at(to).attachment] + 2;
}

std::vector<LinkId> Topology::link_ids(const std::vector<LinkIndex>& path) const {
    std::vector<LinkId> ids;
    ids.reserve(path.size());
    for (auto l : path) ids.push_back(links_.at(l).id);
    return ids;
}

ForwardingId Topology::encode(const std::vector<LinkIndex>& path) const {
    ForwardingId fid;
    for (auto l : path) fid |= links_.at(l).id;
    return fid;
}

std::string Topology::endpoint_name(const Endpoint& e) const {
    return e.kind == Endpoint::Kind::Switch ? switches_.at(e.index) : nodes_.at(e.index).name;
}

SwitchIndex Topology::center() const {
    SwitchIndex best = 0;
    std::size_t best_ecc = kUnreachable;
    for (SwitchIndex s = 0; s < switches_.size(); ++s) {
        auto ecc = *std::max_element(dist_[s].begin(), dist_[s].end());
        if (ecc < best_ecc || (ecc == best_ecc && switches_[s] < switches_[best])) {
            best = s;
            best_ecc = ecc;
        }
    }
    return best;
}

std::vector<LinkId> shortest_path(const Topology& topo, std::string_view from, std::string_view to) {
    return topo.link_ids(topo.shortest_path(topo.node_index(from), topo.node_index(to)));
}

}  // namespace edgeicn
