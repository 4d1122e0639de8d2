#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "edgeicn/bloom.hpp"

using namespace edgeicn;

TEST_CASE("link ids have exactly k distinct positions") {
    for (unsigned k : {1u, 5u, 16u}) {
        BloomParams p;
        p.k = k;
        for (int i = 0; i < 50; ++i) {
            auto id = new_link_id("link" + std::to_string(i), p);
            CHECK(id.bits().popcount() == k);
            std::set<std::uint16_t> pos(id.set_positions().begin(), id.set_positions().end());
            CHECK(pos.size() == k);
        }
    }
}

TEST_CASE("link id generation is keyed and portable") {
    BloomParams p;
    auto a = new_link_id("s1->s2", p);
    CHECK(a == new_link_id("s1->s2", p));
    CHECK_FALSE(a == new_link_id("s2->s1", p));
    // Positions from a from-scratch Python implementation of FNV-1a, splitmix64
    // and MT19937-64.
    CHECK(a.set_positions() == std::vector<std::uint16_t>{212, 47, 246, 172, 221});
    CHECK(a.to_hex() == "0040000020100000000010000000000000000000000000000000800000000000");
    p.seed = 42;
    CHECK(new_link_id("s1->s2", p).set_positions() == std::vector<std::uint16_t>{152, 122, 37, 81, 218});
}

TEST_CASE("bloom parameters are validated") {
    BloomParams p;
    p.k = 0;
    CHECK_THROWS_AS(new_link_id("x", p), Error);
    p.k = 17;
    CHECK_THROWS_AS(new_link_id("x", p), Error);
    CHECK_THROWS_AS(new_link_id("", BloomParams{}), Error);
}

TEST_CASE("encode_path is the OR of its links") {
    BloomParams p;
    std::vector<LinkId> links;
    for (int i = 0; i < 6; ++i) links.push_back(new_link_id("l" + std::to_string(i), p));
    auto fid = encode_path(links);
    Bits256 expect;
    for (const auto& l : links) expect |= l.bits();
    CHECK(fid.bits() == expect);
    for (const auto& l : links) CHECK(matches(l, fid));
    CHECK(encode_path({}).empty());

    std::vector<LinkId> first(links.begin(), links.begin() + 3), second(links.begin() + 3, links.end());
    CHECK(merge(encode_path(first), encode_path(second)) == fid);
    CHECK(merge(fid, fid) == fid);
}

TEST_CASE("an all-zero link never matches") {
    LinkId zero;
    CHECK_FALSE(matches(zero, ForwardingId{}));
    CHECK_FALSE(matches(zero, encode_path(std::vector<LinkId>{new_link_id("a", {})})));
}

TEST_CASE("hex round trip and errors") {
    auto l = new_link_id("hex", {});
    ForwardingId fid;
    fid |= l;
    CHECK(ForwardingId::from_hex(fid.to_hex()) == fid);
    CHECK(fid.to_hex().size() == 64);
    std::string upper = fid.to_hex();
    std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
    CHECK(ForwardingId::from_hex(upper) == fid);
    CHECK_THROWS_AS(ForwardingId::from_hex("abc"), Error);
    CHECK_THROWS_AS(ForwardingId::from_hex(std::string(63, '0') + "g"), Error);

    Bits256 b;
    b.set(0);
    CHECK(b.to_hex() == std::string(63, '0') + "1");
    b = Bits256{};
    b.set(255);
    CHECK(b.to_hex() == "8" + std::string(63, '0'));
}

TEST_CASE("theoretical false-positive rate matches frozen reference values") {
    // k = 5, m = 256, evaluated with mpmath at 50 digits.
    BloomParams p;
    CHECK(theoretical_fp_rate(0, p) == 0.0);
    CHECK(theoretical_fp_rate(5, p) == doctest::Approx(6.971626107715566e-06).epsilon(1e-12));
    CHECK(theoretical_fp_rate(10, p) == doctest::Approx(1.758096496773028e-4).epsilon(1e-12));
    CHECK(theoretical_fp_rate(20, p) == doctest::Approx(3.535678808828171e-3).epsilon(1e-12));
    CHECK(theoretical_fp_rate(40, p) == doctest::Approx(4.684507629321845e-2).epsilon(1e-12));
    CHECK(theoretical_fp_rate(1'000'000, p) < 1.0);
    double prev = 0;
    for (std::size_t n = 1; n < 200; ++n) {
        double r = theoretical_fp_rate(n, p);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("measured false-positive rate is within 3 standard errors") {
    BloomParams p;
    std::mt19937_64 rng(2024);
    constexpr int trials = 20000;
    for (std::size_t n : {10u, 20u, 40u}) {
        int hits = 0;
        for (int t = 0; t < trials; ++t) {
            ForwardingId fid;
            for (std::size_t i = 0; i < n; ++i) fid |= new_link_id("in" + std::to_string(rng()), p);
            if (matches(new_link_id("out" + std::to_string(rng()), p), fid)) ++hits;
        }
        const double expected = theoretical_fp_rate(n, p);
        const double se = std::sqrt(expected * (1 - expected) / trials);
        CHECK(std::abs(double(hits) / trials - expected) <= 3 * se);
    }
}
