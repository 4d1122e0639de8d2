#include "edgeicn/data_plane.hpp"

#include <cstdio>

namespace edgeicn {

void Switch::install_rules(const Topology& topo) {
    rules_.clear();
    for (auto l : topo.out_links(index_)) {
        const auto& link = topo.links()[l];
        rules_.push_back({link.id.bits(), l, link.reverse});
    }
}

std::vector<SwitchAction> Switch::forward(const PacketHeader& packet) const {
    using Kind = SwitchAction::Kind;
    if (packet.hop_limit <= 0) return {{Kind::Drop, 0, 0}};
    if (packet.ether_type == EtherType::Resolution) return {{Kind::Punt, 0, packet.hop_limit - 1}};

    std::vector<SwitchAction> out;
    for (const auto& rule : rules_) {
        if (packet.arrival_link && *packet.arrival_link == rule.inbound_pair) continue;
        if (rule.match_bits.none() || !rule.match_bits.subset_of(packet.address_field)) continue;
        out.push_back({Kind::Output, rule.output, packet.hop_limit - 1});
    }
    if (out.empty()) out.push_back({Kind::Drop, 0, 0});
    return out;
}

std::vector<Switch> install_all(const Topology& topo) {
    std::vector<Switch> switches;
    switches.reserve(topo.switches().size());
    for (SwitchIndex s = 0; s < topo.switches().size(); ++s) {
        switches.emplace_back(s);
        switches.back().install_rules(topo);
    }
    return switches;
}

std::string trace_line(std::uint64_t tick, const std::string& sw, EtherType et, const Bits256& fid,
                       const std::string& action) {
    char et_hex[8];
    std::snprintf(et_hex, sizeof et_hex, "%04x", static_cast<unsigned>(et));
    return "t=" + std::to_string(tick) + " sw=" + sw + " et=" + et_hex + " fid=" + fid.to_hex() +
           " action=" + action;
}

}  // namespace edgeicn
