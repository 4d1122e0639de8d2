#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/topology.hpp"

namespace edgeicn {

enum class AnycastPolicy { NearestHopCount, RoundRobin };

/// Ties are always broken by the lexicographically smallest node name.
struct AnycastStrategy {
    AnycastPolicy policy = AnycastPolicy::NearestHopCount;
};

AnycastPolicy parse_anycast_policy(std::string_view tag);

struct Resolution {
    ForwardingId forward;
    ForwardingId reverse;  // all-zeros for group targets
    std::vector<NodeIndex> targets;
    std::vector<LinkIndex> tree;  // distinct directed links of the forward tree
};

/// SDN controller resolution service. Oblivious to ICN state: it only maps
/// (virtual) node identifiers to ForwardingIds over the known topology.
class Controller {
public:
    explicit Controller(std::shared_ptr<const Topology> topo);
    /// Also registers the topology's declared groups.
    Controller(std::shared_ptr<const Topology> topo, const std::vector<TopologySpec::Group>& groups);

    const Topology& topology() const { return *topo_; }

    /// Last write wins. `all.nodes` is implicit and cannot be registered.
    void register_virtual(const std::string& name, const std::vector<std::string>& members);
    bool is_virtual(std::string_view name) const;
    std::vector<NodeIndex> members(std::string_view name) const;

    Resolution resolve(std::string_view target, NodeIndex requester, AnycastStrategy strategy = {});
    Resolution resolve_context(const std::vector<std::string>& labels, NodeIndex requester);

    /// Shortest-path tree (union of per-target shortest paths) from `requester`.
    Resolution multicast_tree(NodeIndex requester, const std::vector<NodeIndex>& targets) const;

private:
    NodeIndex pick_anycast(const std::string& name, const std::vector<NodeIndex>& holders, NodeIndex requester,
                           AnycastStrategy strategy);

    std::shared_ptr<const Topology> topo_;
    std::map<std::string, std::set<NodeIndex>, std::less<>> groups_;
    std::map<std::string, std::size_t, std::less<>> round_robin_;
};

}  // namespace edgeicn
