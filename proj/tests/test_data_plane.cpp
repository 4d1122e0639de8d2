#include <doctest.h>

#include <random>

#include "edgeicn/data_plane.hpp"
#include "edgeicn/sim.hpp"
#include "oracles/oracles.hpp"

using namespace edgeicn;

namespace {

Topology line3() {
    return build_topology(parse_topology(R"(
        switch a
        switch b
        switch c
        link a b
        link b c
        node x a
        node y c
    )"),
                          {});
}

}  // namespace

TEST_CASE("one rule per outgoing link") {
    auto t = line3();
    auto sw = install_all(t);
    REQUIRE(sw.size() == 3);
    const auto b = *t.find_switch("b");
    CHECK(sw[b].rules().size() == t.out_links(b).size());
    for (const auto& r : sw[b].rules()) {
        CHECK(r.match_bits == t.links()[r.output].id.bits());
        CHECK(r.inbound_pair == t.links()[r.output].reverse);
    }
}

TEST_CASE("forwarding follows subset matches, never back over the arrival link") {
    auto t = line3();
    auto sw = install_all(t);
    const auto x = t.node_index("x"), y = t.node_index("y");
    auto path = t.shortest_path(x, y);
    auto fid = t.encode(path);
    const auto a = *t.find_switch("a");

    PacketHeader h{EtherType::BloomRouted, fid.bits(), 10, path[0]};
    auto acts = sw[a].forward(h);
    REQUIRE(acts.size() == 1);
    CHECK(acts[0].kind == SwitchAction::Kind::Output);
    CHECK(acts[0].link == path[1]);
    CHECK(acts[0].hop_limit == 9);

    // A filter containing every link still never bounces back.
    Bits256 all;
    for (const auto& l : t.links()) all |= l.id.bits();
    const auto b = *t.find_switch("b");
    auto from_a = sw[b].forward({EtherType::BloomRouted, all, 5, path[1]});
    for (const auto& act : from_a) CHECK(act.link != t.links()[path[1]].reverse);
    CHECK(from_a.size() == t.out_links(b).size() - 1);
}

TEST_CASE("hop limit, punt and no-match drops") {
    auto t = line3();
    auto sw = install_all(t);
    Bits256 all;
    for (const auto& l : t.links()) all |= l.id.bits();
    CHECK(sw[0].forward({EtherType::BloomRouted, all, 0, std::nullopt}).front().kind == SwitchAction::Kind::Drop);
    CHECK(sw[0].forward({EtherType::BloomRouted, all, -1, std::nullopt}).front().kind == SwitchAction::Kind::Drop);
    CHECK(sw[0].forward({EtherType::Resolution, Bits256{}, 3, std::nullopt}).front().kind ==
          SwitchAction::Kind::Punt);
    auto none = sw[0].forward({EtherType::BloomRouted, Bits256{}, 3, std::nullopt});
    REQUIRE(none.size() == 1);
    CHECK(none.front().kind == SwitchAction::Kind::Drop);
}

TEST_CASE("trace line format") {
    Bits256 b;
    b.set(4);
    CHECK(trace_line(12, "s1", EtherType::BloomRouted, b, "out:s1->s2") ==
          "t=12 sw=s1 et=88b6 fid=" + std::string(62, '0') + "10 action=out:s1->s2");
    CHECK(trace_line(0, "hub", EtherType::Resolution, Bits256{}, "punt") ==
          "t=0 sw=hub et=88b5 fid=" + std::string(64, '0') + " action=punt");
}

TEST_CASE("simulated delivery equals the traversal oracle on random graphs") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 15; ++round) {
        auto spec = oracle::random_topology(rng, 10, 8, false);
        auto topo = std::make_shared<const Topology>(build_topology(spec, {}));
        Simulation sim(topo, {});
        for (int f = 0; f < 40; ++f) {
            Bits256 bits;
            for (const auto& l : topo->links())
                if (rng() % 3 == 0) bits |= l.id.bits();
            ForwardingId fid(bits);
            NodeIndex from = rng() % topo->nodes().size();
            int hop = 1 + static_cast<int>(rng() % 12);
            auto report = sim.probe(from, fid, hop);
            CHECK(report.delivered == oracle::delivery(*topo, from, bits, hop));
        }
        CHECK(sim.counters().conserved());
    }
}
