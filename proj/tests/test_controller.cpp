#include <doctest.h>

#include <memory>

#include "edgeicn/controller.hpp"

using namespace edgeicn;

namespace {

std::shared_ptr<const Topology> star() {
    return std::make_shared<const Topology>(build_topology(parse_topology(R"(
        switch hub
        switch w
        switch e
        link hub w
        link hub e
        node N1 w
        node N2 w
        node N3 e
        node N4 hub
        alias svc N2
        alias svc N3
    )"),
                                                           {}));
}

}  // namespace

TEST_CASE("concrete targets resolve to the shortest path and its reverse") {
    auto t = star();
    Controller c(t);
    auto r = c.resolve("N3", t->node_index("N1"));
    auto fwd = t->shortest_path(t->node_index("N1"), t->node_index("N3"));
    CHECK(r.forward == t->encode(fwd));
    CHECK(r.reverse == t->encode(t->shortest_path(t->node_index("N3"), t->node_index("N1"))));
    CHECK(r.targets == std::vector<NodeIndex>{t->node_index("N3")});
    CHECK(r.tree.size() == 4);
    CHECK_THROWS_AS(c.resolve("nobody", 0), Error);
}

TEST_CASE("all.nodes is the shortest-path tree to everyone but the requester") {
    auto t = star();
    Controller c(t);
    const auto n1 = t->node_index("N1");
    auto r = c.resolve(kAllNodes, n1);
    CHECK(r.targets.size() == 3);
    CHECK(r.reverse.empty());
    std::set<LinkIndex> expect;
    for (NodeIndex n = 0; n < t->nodes().size(); ++n)
        if (n != n1)
            for (auto l : t->shortest_path(n1, n)) expect.insert(l);
    CHECK(std::set<LinkIndex>(r.tree.begin(), r.tree.end()) == expect);
    CHECK(r.forward == t->encode(r.tree));
}

TEST_CASE("virtual identifiers") {
    auto t = star();
    Controller c(t);
    CHECK(c.is_virtual(kAllNodes));
    CHECK_FALSE(c.is_virtual("west"));
    c.register_virtual("west", {"N1", "N2"});
    CHECK(c.is_virtual("west"));
    CHECK(c.members("west").size() == 2);
    c.register_virtual("west", {"N3"});
    CHECK(c.members("west") == std::vector<NodeIndex>{t->node_index("N3")});

    CHECK_THROWS_AS(c.register_virtual(std::string(kAllNodes), {"N1"}), Error);
    CHECK_THROWS_AS(c.register_virtual("N1", {"N2"}), Error);
    CHECK_THROWS_AS(c.register_virtual("svc", {"N2"}), Error);
    CHECK_THROWS_AS(c.register_virtual("g", {"ghost"}), Error);
    CHECK_THROWS_AS(c.members("ghost"), Error);

    c.register_virtual("empty", {});
    CHECK_THROWS_AS(c.resolve("empty", 0), Error);
}

TEST_CASE("context hosts resolve to the intersection of their labels") {
    auto t = star();
    Controller c(t);
    c.register_virtual("west", {"N1", "N2"});
    c.register_virtual("building6", {"N2", "N3"});
    auto r = c.resolve_context({"west", "building6"}, t->node_index("N4"));
    CHECK(r.targets == std::vector<NodeIndex>{t->node_index("N2")});
    CHECK(r.forward == t->encode(t->shortest_path(t->node_index("N4"), t->node_index("N2"))));
    CHECK_THROWS_AS(c.resolve_context({}, 0), Error);
    CHECK_THROWS_AS(c.resolve_context({"west", "nowhere"}, 0), Error);
    c.register_virtual("east", {"N3"});
    CHECK_THROWS_AS(c.resolve_context({"west", "east"}, 0), Error);
}

TEST_CASE("anycast picks the nearest holder, ties by name") {
    auto t = star();
    Controller c(t);
    // From N1 (on w) N2 is 2 hops away, N3 is 4.
    CHECK(c.resolve("svc", t->node_index("N1")).targets.front() == t->node_index("N2"));
    CHECK(c.resolve("svc", t->node_index("N3")).targets.front() == t->node_index("N3"));
    // From N4 on the hub both are 2 hops away.
    CHECK(c.resolve("svc", t->node_index("N4")).targets.front() == t->node_index("N2"));
}

TEST_CASE("anycast round robin alternates") {
    auto t = star();
    Controller c(t);
    AnycastStrategy rr{AnycastPolicy::RoundRobin};
    auto a = c.resolve("svc", t->node_index("N4"), rr).targets.front();
    auto b = c.resolve("svc", t->node_index("N4"), rr).targets.front();
    auto a2 = c.resolve("svc", t->node_index("N4"), rr).targets.front();
    CHECK(a == t->node_index("N2"));
    CHECK(b == t->node_index("N3"));
    CHECK(a2 == a);
    CHECK(parse_anycast_policy("round-robin") == AnycastPolicy::RoundRobin);
    CHECK(parse_anycast_policy("nearest-hop-count") == AnycastPolicy::NearestHopCount);
    CHECK_THROWS_AS(parse_anycast_policy("random"), Error);
}
