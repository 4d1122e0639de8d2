#include "edgeicn/controller.hpp"

#include <algorithm>

namespace edgeicn {

AnycastPolicy parse_anycast_policy(std::string_view tag) {
    if (tag == "nearest-hop-count") return AnycastPolicy::NearestHopCount;
    if (tag == "round-robin") return AnycastPolicy::RoundRobin;
    throw Error("unknown anycast policy '" + std::string(tag) + "'");
}

Controller::Controller(std::shared_ptr<const Topology> topo) : topo_(std::move(topo)) {}

Controller::Controller(std::shared_ptr<const Topology> topo, const std::vector<TopologySpec::Group>& groups)
    : Controller(std::move(topo)) {
    for (const auto& g : groups) register_virtual(g.name, g.members);
}

void Controller::register_virtual(const std::string& name, const std::vector<std::string>& members) {
    if (name == kAllNodes) throw Error("all.nodes is implicit and cannot be registered");
    if (name.empty()) throw Error("virtual node id must be non-empty");
    if (topo_->find_node(name) || !topo_->nodes_named(name).empty())
        throw Error("virtual id '" + name + "' clashes with a node id");
    std::set<NodeIndex> set;
    for (const auto& m : members) {
        auto idx = topo_->find_node(m);
        if (!idx) throw Error("unknown member '" + m + "' for virtual id '" + name + "'");
        set.insert(*idx);
    }
    groups_[name] = std::move(set);
}

bool Controller::is_virtual(std::string_view name) const { return name == kAllNodes || groups_.count(name); }

std::vector<NodeIndex> Controller::members(std::string_view name) const {
    if (name == kAllNodes) {
        std::vector<NodeIndex> all(topo_->nodes().size());
        for (NodeIndex i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    if (auto it = groups_.find(name); it != groups_.end()) return {it->second.begin(), it->second.end()};
    throw Error("unknown virtual id '" + std::string(name) + "'");
}

Resolution Controller::multicast_tree(NodeIndex requester, const std::vector<NodeIndex>& targets) const {
    Resolution r;
    std::set<LinkIndex> tree;
    for (auto t : targets) {
        if (t == requester) continue;
        r.targets.push_back(t);
        for (auto l : topo_->shortest_path(requester, t)) tree.insert(l);
    }
    r.tree.assign(tree.begin(), tree.end());
    r.forward = topo_->encode(r.tree);
    return r;
}

NodeIndex Controller::pick_anycast(const std::string& name, const std::vector<NodeIndex>& holders,
                                   NodeIndex requester, AnycastStrategy strategy) {
    std::vector<NodeIndex> sorted = holders;
    std::sort(sorted.begin(), sorted.end(),
              [&](NodeIndex a, NodeIndex b) { return topo_->nodes()[a].name < topo_->nodes()[b].name; });
    if (strategy.policy == AnycastPolicy::RoundRobin) {
        auto& turn = round_robin_[name];
        return sorted[turn++ % sorted.size()];
    }
    NodeIndex best = sorted.front();
    for (auto n : sorted)
        if (topo_->hop_distance(requester, n) < topo_->hop_distance(requester, best)) best = n;
    return best;
}

Resolution Controller::resolve(std::string_view target, NodeIndex requester, AnycastStrategy strategy) {
    if (requester >= topo_->nodes().size()) throw Error("unknown requester");
    if (is_virtual(target)) {
        auto m = members(target);
        if (m.empty()) throw Error("empty virtual group '" + std::string(target) + "'");
        return multicast_tree(requester, m);
    }
    auto holders = topo_->nodes_named(target);
    if (holders.empty()) throw Error("unknown target '" + std::string(target) + "'");
    NodeIndex chosen =
        holders.size() == 1 ? holders.front() : pick_anycast(std::string(target), holders, requester, strategy);

    Resolution r;
    r.targets = {chosen};
    r.tree = topo_->shortest_path(requester, chosen);
    r.forward = topo_->encode(r.tree);
    r.reverse = topo_->encode(topo_->shortest_path(chosen, requester));
    return r;
}

Resolution Controller::resolve_context(const std::vector<std::string>& labels, NodeIndex requester) {
    if (labels.empty()) throw Error("empty context label set");
    std::vector<NodeIndex> acc;
    bool first = true;
    for (const auto& label : labels) {
        if (!is_virtual(label)) throw Error("unknown context label '" + label + "'");
        auto m = members(label);
        if (first) {
            acc = m;
            first = false;
        } else {
            std::vector<NodeIndex> out;
            std::set_intersection(acc.begin(), acc.end(), m.begin(), m.end(), std::back_inserter(out));
            acc = std::move(out);
        }
    }
    if (acc.empty()) throw Error("empty intersection for context labels");
    return multicast_tree(requester, acc);
}

}  // namespace edgeicn
