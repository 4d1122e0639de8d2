#include <doctest.h>

#include "edgeicn/coap.hpp"
#include "edgeicn/sim.hpp"

using namespace edgeicn;

namespace {

std::vector<CoapResponse> responses(Simulation& sim, const char* node) {
    return sim.node(node).gateway().client_responses();
}

}  // namespace

TEST_CASE("host mapping") {
    CHECK(map_host_to_scope("Sensor.Example") == "sensor.example");
    CHECK_THROWS_AS(map_host_to_scope(""), Error);

    auto ctx = ContextHost::parse("all.West.building6");
    REQUIRE(ctx);
    CHECK(ctx->groups() == std::vector<std::string>{"west", "building6"});
    CHECK_FALSE(ContextHost::parse("all"));
    CHECK_FALSE(ContextHost::parse("west.building6"));
    CHECK_FALSE(ContextHost::parse("all..x"));
    CHECK(to_string(CoapOutcome::LegacyFallback) == "legacy-fallback");
}

TEST_CASE("context-based host reaches only the intersection") {
    Simulation sim(load_scenario(EDGEICN_SOURCE_DIR "/scenarios/coap_group.scn"), Mode::EdgeIcn);
    sim.run();
    // N2 is the only member of both west and building6.
    CHECK(sim.node("N2").stats().responses_sent == 1);
    CHECK(sim.node("N1").stats().responses_sent == 0);
    CHECK(sim.node("N3").stats().responses_sent == 0);
    auto r = responses(sim, "N4");
    REQUIRE(r.size() == 1);
    CHECK(r[0].code == "2.05");
    CHECK(r[0].responder == "N2");
    CHECK(r[0].payload == Bytes{0x16});
    CHECK(sim.counters().fp_deliveries == 0);
}

TEST_CASE("asynchronous resource: ACK, then one multicast 2.05 to every waiting gateway") {
    Simulation sim(load_scenario(EDGEICN_SOURCE_DIR "/scenarios/coap_async.scn"), Mode::EdgeIcn);
    sim.run();
    const auto& srv = sim.node("srv");
    CHECK(srv.gateway().stats().acks == 3);
    CHECK(srv.stats().upstream_requests == 1);
    CHECK(srv.stats().responses_sent == 1);
    for (const auto* g : {"g1", "g2"}) {
        auto r = responses(sim, g);
        REQUIRE(r.size() == 1);
        CHECK(r[0].code == "2.05");
        CHECK(r[0].at >= 200);
        CHECK(r[0].payload == Bytes{0x2a});
    }
    auto g3 = responses(sim, "g3");
    REQUIRE(g3.size() == 2);
    CHECK(g3[0].code == "5.02");  // legacy.example was never advertised
    CHECK(g3[1].code == "2.05");
    CHECK(sim.counters().duplicate_deliveries == 0);
    CHECK(sim.counters().legacy_fallbacks == 1);
}

TEST_CASE("requests for the same resource are aggregated at the client gateway") {
    Simulation sim(parse_scenario(R"(
switch s
node srv s
node gw s
coap-resource srv h.example /x 01 @tick=100
coap-advertise srv @tick=1
coap-get gw h.example /x @tick=10
coap-get gw H.Example /x @tick=11
)"),
                   Mode::EdgeIcn);
    sim.run();
    auto r = responses(sim, "gw");
    REQUIRE(r.size() == 2);
    CHECK(r[0].message_id == 1);
    CHECK(r[1].message_id == 2);
    CHECK(sim.node("gw").stats().subscriptions_sent == 1);
}

TEST_CASE("a resource that never appears is answered 4.04") {
    Simulation sim(parse_scenario(R"(
timeout 50
switch s
node srv s
node gw s
coap-resource srv h.example /x 01 @tick=100000
coap-advertise srv @tick=1
coap-get gw h.example /x @tick=10
)"),
                   Mode::EdgeIcn);
    sim.run();
    auto r = responses(sim, "gw");
    REQUIRE(r.size() == 1);
    CHECK(r[0].code == "4.04");
}

TEST_CASE("observers get every new version") {
    Simulation sim(parse_scenario(R"(
switch s
node srv s
node gw s
coap-resource srv h.example /t 01
coap-resource srv h.example /t 02 @tick=500
coap-resource srv h.example /t 03 @tick=900
coap-advertise srv @tick=1
coap-get gw h.example /t observe @tick=10
)"),
                   Mode::EdgeIcn);
    sim.run();
    auto r = responses(sim, "gw");
    REQUIRE(r.size() == 3);
    CHECK(r[0].payload == Bytes{1});
    CHECK(r[1].payload == Bytes{2});
    CHECK(r[2].payload == Bytes{3});
    CHECK(r[2].at > 900);
}

TEST_CASE("CoAP stanzas are rejected in point mode") {
    auto cfg = load_scenario(EDGEICN_SOURCE_DIR "/scenarios/coap_group.scn");
    CHECK_THROWS_AS(Simulation(cfg, Mode::Point), ParseError);
}
