#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeicn/bloom.hpp"
#include "edgeicn/topology.hpp"

namespace edgeicn {

enum class EtherType : std::uint16_t {
    Resolution = 0x88B5,
    BloomRouted = 0x88B6,
};

inline constexpr int kDefaultHopLimit = 64;

/// The fields a switch looks at. RESOLUTION packets carry all-zeros in the
/// address field.
struct PacketHeader {
    EtherType ether_type = EtherType::BloomRouted;
    Bits256 address_field;
    int hop_limit = kDefaultHopLimit;
    std::optional<LinkIndex> arrival_link;
};

struct FlowRule {
    Bits256 match_bits;
    LinkIndex output = 0;
    LinkIndex inbound_pair = 0;  // the opposite direction of `output`
};

struct SwitchAction {
    enum class Kind { Output, Punt, Drop };
    Kind kind = Kind::Drop;
    LinkIndex link = 0;  // Output only
    int hop_limit = 0;   // hop limit carried by the emitted copy

    friend bool operator==(const SwitchAction&, const SwitchAction&) = default;
};

/// Match-action table of one switch. Stateless: rules are immutable after
/// install and no per-packet memory is kept.
class Switch {
public:
    explicit Switch(SwitchIndex index) : index_(index) {}

    SwitchIndex index() const { return index_; }
    const std::vector<FlowRule>& rules() const { return rules_; }

    /// One arbitrary-bitmask rule per outgoing directed link.
    void install_rules(const Topology& topo);

    /// BLOOM_ROUTED: output on every matching link except back over the arrival
    /// link; RESOLUTION: punt. Emitted copies carry hop_limit - 1.
    std::vector<SwitchAction> forward(const PacketHeader& packet) const;

private:
    SwitchIndex index_;
    std::vector<FlowRule> rules_;
};

std::vector<Switch> install_all(const Topology& topo);

/// `t=<tick> sw=<id> et=<hex> fid=<64hex> action=<out:link|punt|drop>`
std::string trace_line(std::uint64_t tick, const std::string& sw, EtherType et, const Bits256& fid,
                       const std::string& action);

}  // namespace edgeicn
