#include "edgeicn/bloom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace edgeicn {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string Bits256::to_hex() const {
    std::string out;
    out.reserve(64);
    for (auto w = words_.rbegin(); w != words_.rend(); ++w)
        for (int shift = 60; shift >= 0; shift -= 4) out.push_back(kHexDigits[(*w >> shift) & 0xf]);
    return out;
}

Bits256 Bits256::from_hex(std::string_view hex) {
    if (hex.size() != 64) throw Error("forwarding id must be 64 hex characters");
    Bits256 b;
    for (std::size_t i = 0; i < 64; ++i) {
        int v = hex_value(hex[i]);
        if (v < 0) throw Error("invalid hex character in forwarding id");
        std::size_t word = 3 - i / 16;
        std::size_t shift = 60 - 4 * (i % 16);
        b.words_[word] |= static_cast<std::uint64_t>(v) << shift;
    }
    return b;
}

void BloomParams::validate() const {
    if (k < 1 || k > 16) throw Error("bloom parameter k must be in [1,16], got " + std::to_string(k));
}

LinkId new_link_id(std::string_view link_key, const BloomParams& params) {
    params.validate();
    if (link_key.empty()) throw Error("link key must be non-empty");

    // mt19937_64 output is fully specified by the standard; reducing mod 256 is
    // unbiased, so positions are identical across toolchains.
    std::mt19937_64 gen(splitmix64(fnv1a64(link_key) ^ splitmix64(params.seed)));
    LinkId id;
    id.positions_.reserve(params.k);
    while (id.positions_.size() < params.k) {
        auto pos = static_cast<std::uint16_t>(gen() % Bits256::kWidth);
        if (id.bits_.test(pos)) continue;
        id.bits_.set(pos);
        id.positions_.push_back(pos);
    }
    return id;
}

ForwardingId encode_path(std::span<const LinkId> links) {
    ForwardingId fid;
    for (const auto& l : links) fid |= l;
    return fid;
}

ForwardingId merge(const ForwardingId& a, const ForwardingId& b) {
    ForwardingId out = a;
    out |= b;
    return out;
}

bool matches(const LinkId& link, const ForwardingId& fid) {
    // An all-zero link pattern only arises from a default-constructed LinkId;
    // it is not a real link and never matches.
    if (link.bits().none()) return false;
    return link.bits().subset_of(fid.bits());
}

double theoretical_fp_rate(std::size_t n_links, const BloomParams& params) {
    params.validate();
    const double k = params.k;
    const double fill = -std::expm1(-k * static_cast<double>(n_links) / static_cast<double>(BloomParams::m));
    // Mathematically < 1 for every finite n; keep that true once doubles round.
    return std::min(std::pow(fill, k), std::nextafter(1.0, 0.0));
}

}  // namespace edgeicn
