#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/edge_node.hpp"
#include "edgeicn/topology.hpp"

namespace edgeicn {

struct ContentDecl {
    std::string node, scope, item;
    Bytes data;
    Tick available_at = 0;
    std::size_t line = 0;
};

struct CoapResourceDecl {
    std::string node, host, path;
    Bytes data;
    Tick available_at = 0;
    std::size_t line = 0;
};

struct ContextGroupDecl {
    std::string label;
    std::vector<std::string> members;
    std::size_t line = 0;
};

struct ScenarioAction {
    enum class Kind { Advertise, Subscribe, CoapAdvertise, CoapGet };

    Kind kind = Kind::Advertise;
    std::string node;
    std::string scope;  // scope, or URI host for CoAP
    std::string item;   // item, or URI path for CoAP
    std::optional<std::string> sender;
    SelectionPolicy policy = SelectionPolicy::First;
    bool observe = false;
    /// Unset: runs once the network is quiet after the previous action.
    std::optional<Tick> at;
    std::size_t line = 0;
};

struct ScenarioConfig {
    TopologySpec topology;
    BloomParams bloom;
    int hop_limit = 64;
    Tick timeout = kDefaultTimeout;
    std::uint64_t l_unit = 1;
    std::vector<ContentDecl> contents;
    std::vector<CoapResourceDecl> coap_resources;
    std::vector<ContextGroupDecl> context_groups;
    std::vector<ScenarioAction> actions;
};

/// Parses and validates a scenario. Every error is a ParseError naming a line.
/// `base_dir` resolves relative `topology <file>` stanzas.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Parses `-` (empty) or an even-length hex string.
Bytes parse_hex_bytes(std::string_view hex);

struct ScenarioShape {
    std::uint64_t l = 1;
    std::uint64_t scopes = 0;
    std::uint64_t advertisers = 0;
    std::uint64_t subscribers = 0;
};
/// Distinct advertised scopes, advertising nodes and subscribing nodes.
ScenarioShape shape_of(const ScenarioConfig& cfg);

/// Two-level star: hub switch "hub" (controller and rendezvous point), each
/// node on its own chain so that it sits l hops from the hub. Nodes a1..aA
/// advertise S scopes round-robin; u1..uU subscribe to one item per scope.
std::string conformant_star_scenario(std::uint64_t scopes, std::uint64_t advertisers, std::uint64_t subscribers,
                                     std::uint64_t l);

}  // namespace edgeicn
