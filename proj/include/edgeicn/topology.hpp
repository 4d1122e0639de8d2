#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/bloom.hpp"

namespace edgeicn {

/// Error raised while reading a line-oriented input; carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

using SwitchIndex = std::size_t;
using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

inline constexpr std::string_view kAllNodes = "all.nodes";
/// Node identifiers must fit in one simulated packet payload.
inline constexpr std::size_t kMaxNodeIdBytes = 1024;

/// Declarative topology as read from a topology file (or inline scenario stanzas).
struct TopologySpec {
    struct Switch {
        std::string id;
        std::size_t line = 0;
    };
    struct Link {
        std::string a, b;
        std::size_t line = 0;
    };
    struct Node {
        std::string name, sw;
        std::size_t line = 0;
    };
    struct Group {
        std::string name;
        std::vector<std::string> members;
        std::size_t line = 0;
    };
    struct Alias {
        std::string name, node;
        std::size_t line = 0;
    };

    std::vector<Switch> switches;
    std::vector<Link> links;
    std::vector<Node> nodes;
    std::vector<Group> groups;
    std::vector<Alias> aliases;
    std::optional<std::string> controller;
    std::size_t controller_line = 0;

    /// Consumes one tokenized stanza if it is a topology stanza. Returns false for
    /// any other keyword so callers can layer their own stanzas on top.
    bool consume(const std::vector<std::string>& tokens, std::size_t line);

    /// Structural checks: duplicate names, dangling references, connectivity.
    void validate() const;
};

/// Splits one line into whitespace-separated tokens, dropping `#` comments.
std::vector<std::string> tokenize_line(std::string_view line);

TopologySpec parse_topology(std::string_view text);

struct Endpoint {
    enum class Kind { Switch, Node };
    Kind kind = Kind::Switch;
    std::size_t index = 0;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct DirectedLink {
    std::string key;  // "<from>-><to>"
    Endpoint from, to;
    LinkIndex reverse = 0;
    LinkId id;
};

struct EdgeNodeInfo {
    std::string name;
    SwitchIndex attachment = 0;
    LinkIndex uplink = 0;    // node -> switch
    LinkIndex downlink = 0;  // switch -> node
    std::vector<std::string> aliases;
};

/// Immutable switched network with one LinkId per directed link.
class Topology {
public:
    Topology() = default;

    const std::vector<std::string>& switches() const { return switches_; }
    const std::vector<EdgeNodeInfo>& nodes() const { return nodes_; }
    const std::vector<DirectedLink>& links() const { return links_; }
    const BloomParams& bloom() const { return bloom_; }

    /// Outgoing directed links of a switch (core and attachment), ascending index.
    const std::vector<LinkIndex>& out_links(SwitchIndex s) const { return out_links_[s]; }
    std::optional<SwitchIndex> controller_switch() const { return controller_; }

    std::optional<SwitchIndex> find_switch(std::string_view id) const;
    std::optional<NodeIndex> find_node(std::string_view name) const;
    /// Every node answering to `name`, either as its own name or an alias.
    std::vector<NodeIndex> nodes_named(std::string_view name) const;
    NodeIndex node_index(std::string_view name) const;

    /// Hop distance between switches (core links only).
    std::size_t switch_distance(SwitchIndex a, SwitchIndex b) const { return dist_[a][b]; }
    /// Minimal-hop directed links a -> b; ties go to the lexicographically
    /// smallest sequence of switch ids.
    std::vector<LinkIndex> switch_path(SwitchIndex a, SwitchIndex b) const;
    /// Node-to-node path including both attachment links; empty when from == to.
    std::vector<LinkIndex> shortest_path(NodeIndex from, NodeIndex to) const;
    std::size_t hop_distance(NodeIndex from, NodeIndex to) const;

    std::vector<LinkId> link_ids(const std::vector<LinkIndex>& path) const;
    ForwardingId encode(const std::vector<LinkIndex>& path) const;

    std::string endpoint_name(const Endpoint& e) const;

    /// Switch minimising eccentricity; ties go to the smallest id.
    SwitchIndex center() const;

private:
    friend Topology build_topology(const TopologySpec&, const BloomParams&);

    BloomParams bloom_;
    std::vector<std::string> switches_;
    std::vector<EdgeNodeInfo> nodes_;
    std::vector<DirectedLink> links_;
    std::vector<std::vector<LinkIndex>> out_links_;
    std::vector<std::vector<std::pair<SwitchIndex, LinkIndex>>> core_adj_;
    std::vector<std::vector<std::size_t>> dist_;
    std::map<std::string, SwitchIndex, std::less<>> switch_index_;
    std::map<std::string, NodeIndex, std::less<>> node_index_;
    std::map<std::string, std::vector<NodeIndex>, std::less<>> names_;
    std::optional<SwitchIndex> controller_;
};

/// Assigns a LinkId to every directed link. Rejects disconnected graphs,
/// duplicate names and dangling references.
Topology build_topology(const TopologySpec& spec, const BloomParams& params);

/// Convenience path in terms of LinkIds, by node name.
std::vector<LinkId> shortest_path(const Topology& topo, std::string_view from, std::string_view to);

}  // namespace edgeicn
