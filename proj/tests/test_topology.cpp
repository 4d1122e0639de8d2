#include <doctest.h>

#include <random>
#include <set>

#include "edgeicn/topology.hpp"
#include "oracles/oracles.hpp"

using namespace edgeicn;

namespace {

Topology build(std::string_view text, BloomParams p = {}) { return build_topology(parse_topology(text), p); }

std::size_t error_line(std::string_view text) {
    try {
        build(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("empty topology is valid") {
    auto t = build("");
    CHECK(t.switches().empty());
    CHECK(t.nodes().empty());
    CHECK(t.links().empty());
}

TEST_CASE("directed links come in reverse pairs") {
    auto t = build(R"(
        switch a
        switch b   # trailing comment
        link a b
        node n1 a
        node n2 b
    )");
    CHECK(t.switches().size() == 2);
    CHECK(t.links().size() == 6);
    for (LinkIndex i = 0; i < t.links().size(); ++i) {
        const auto& l = t.links()[i];
        const auto& r = t.links()[l.reverse];
        CHECK(r.reverse == i);
        CHECK(r.from == l.to);
        CHECK(r.to == l.from);
    }
    const auto& n1 = t.nodes()[t.node_index("n1")];
    CHECK(t.links()[n1.uplink].key == "n1->a");
    CHECK(t.links()[n1.downlink].key == "a->n1");
    std::set<Bits256> ids;
    for (const auto& l : t.links()) ids.insert(l.id.bits());
    CHECK(ids.size() == t.links().size());
}

TEST_CASE("parse errors name the offending line") {
    CHECK(error_line("switch a\nbogus x\n") == 2);
    CHECK(error_line("switch a\nswitch a\n") == 2);
    CHECK(error_line("switch a\nnode n zz\n") == 2);
    CHECK(error_line("switch a\nswitch b\nlink a c\n") == 3);
    CHECK(error_line("switch a\nlink a a\n") == 2);
    CHECK(error_line("switch a\nswitch b\nlink a b\nlink b a\n") == 4);
    CHECK(error_line("switch a\nnode a a\n") == 2);
    CHECK(error_line("switch a\nnode n a\nnode n a\n") == 3);
    CHECK(error_line("switch a\nnode n a\nvgroup all.nodes n\n") == 3);
    CHECK(error_line("switch a\nnode n a\nvgroup g x\n") == 3);
    CHECK(error_line("switch a\ncontroller q\n") == 2);
    CHECK(error_line("switch a\nlink a\n") == 2);
}

TEST_CASE("disconnected graphs are rejected") {
    try {
        build("switch a\nswitch b\nswitch c\nlink a b\n");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("disconnected: switch 'c' is unreachable") != std::string::npos);
        CHECK(e.line() == 3);
    }
}

TEST_CASE("node ids longer than 1024 bytes are rejected") {
    std::string name(1025, 'x');
    CHECK_THROWS_AS(build("switch a\nnode " + name + " a\n"), ParseError);
    CHECK_NOTHROW(build("switch a\nnode " + std::string(1024, 'x') + " a\n"));
}

TEST_CASE("switch distances agree with Floyd-Warshall") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 40; ++round) {
        auto spec = oracle::random_topology(rng, 10, 8, false);
        auto t = build_topology(spec, {});
        auto d = oracle::switch_distances(spec);
        for (SwitchIndex a = 0; a < t.switches().size(); ++a)
            for (SwitchIndex b = 0; b < t.switches().size(); ++b) {
                CHECK(t.switch_distance(a, b) == d[a][b]);
                auto path = t.switch_path(a, b);
                CHECK(path.size() == d[a][b]);
                Endpoint at{Endpoint::Kind::Switch, a};
                for (auto l : path) {
                    CHECK(t.links()[l].from == at);
                    at = t.links()[l].to;
                }
                CHECK(at == Endpoint{Endpoint::Kind::Switch, b});
            }
        for (NodeIndex x = 0; x < t.nodes().size(); ++x)
            for (NodeIndex y = 0; y < t.nodes().size(); ++y) {
                auto p = t.shortest_path(x, y);
                if (x == y) {
                    CHECK(p.empty());
                    continue;
                }
                CHECK(p.size() == d[t.nodes()[x].attachment][t.nodes()[y].attachment] + 2);
                CHECK(p.front() == t.nodes()[x].uplink);
                CHECK(p.back() == t.nodes()[y].downlink);
            }
    }
}

TEST_CASE("equal-cost paths prefer the smallest switch ids") {
    auto t = build(R"(
        switch s1
        switch s3
        switch s2
        switch s4
        link s1 s3
        link s3 s4
        link s1 s2
        link s2 s4
        node a s1
        node b s4
    )");
    auto p = t.shortest_path(t.node_index("a"), t.node_index("b"));
    REQUIRE(p.size() == 4);
    CHECK(t.links()[p[1]].key == "s1->s2");
    CHECK(t.links()[p[2]].key == "s2->s4");
    auto back = t.shortest_path(t.node_index("b"), t.node_index("a"));
    CHECK(t.links()[back[1]].key == "s4->s2");

    auto ids = shortest_path(t, "a", "b");
    REQUIRE(ids.size() == 4);
    CHECK(ids[1] == t.links()[p[1]].id);
    CHECK_THROWS_AS(shortest_path(t, "a", "nobody"), Error);
}

TEST_CASE("identical patterns are regenerated") {
    // With k = 1 there are only 256 patterns; 40 links collide without salting.
    std::string text = "switch hub\n";
    for (int i = 0; i < 20; ++i) text += "node n" + std::to_string(i) + " hub\n";
    BloomParams p;
    p.k = 1;
    auto t = build(text, p);
    std::set<Bits256> ids;
    for (const auto& l : t.links()) ids.insert(l.id.bits());
    CHECK(ids.size() == t.links().size());
}

TEST_CASE("aliases and groups") {
    auto t = build(R"(
        switch a
        node n1 a
        node n2 a
        alias svc n1
        alias svc n2
        vgroup team n1,n2
        controller a
    )");
    CHECK(t.nodes_named("svc").size() == 2);
    CHECK(t.nodes_named("n1").size() == 1);
    CHECK(t.nodes_named("zz").empty());
    CHECK(t.controller_switch() == t.find_switch("a"));
    CHECK_THROWS_AS(t.node_index("svc2"), Error);
}

TEST_CASE("center minimises eccentricity") {
    auto t = build("switch a\nswitch b\nswitch c\nswitch d\nlink a b\nlink b c\nlink c d\n");
    CHECK(t.switches()[t.center()] == "b");
}
