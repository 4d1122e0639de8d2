#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgeicn {

struct Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed 256-bit vector; bit i lives in word i / 64. Two IPv6 addresses wide.
class Bits256 {
public:
    static constexpr std::size_t kWidth = 256;

    constexpr Bits256() = default;

    constexpr bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    constexpr void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    constexpr std::size_t popcount() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    constexpr bool none() const { return popcount() == 0; }

    /// True iff every bit set here is also set in `other`.
    constexpr bool subset_of(const Bits256& other) const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if ((words_[w] & other.words_[w]) != words_[w]) return false;
        return true;
    }

    constexpr Bits256& operator|=(const Bits256& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
        return *this;
    }
    friend constexpr Bits256 operator|(Bits256 a, const Bits256& b) { return a |= b; }
    friend constexpr Bits256 operator&(Bits256 a, const Bits256& b) {
        for (std::size_t w = 0; w < a.words_.size(); ++w) a.words_[w] &= b.words_[w];
        return a;
    }
    friend constexpr bool operator==(const Bits256&, const Bits256&) = default;
    friend constexpr auto operator<=>(const Bits256&, const Bits256&) = default;

    /// 64 lowercase hex characters, most-significant bit first.
    std::string to_hex() const;
    static Bits256 from_hex(std::string_view hex);

    const std::array<std::uint64_t, 4>& words() const { return words_; }

private:
    std::array<std::uint64_t, 4> words_{};
};

struct BloomParams {
    static constexpr std::size_t m = Bits256::kWidth;
    unsigned k = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Bloom pattern identifying one directed link: exactly k bits set.
class LinkId {
public:
    LinkId() = default;

    const Bits256& bits() const { return bits_; }
    /// Set bit indices in generation order.
    const std::vector<std::uint16_t>& set_positions() const { return positions_; }
    std::string to_hex() const { return bits_.to_hex(); }

    friend bool operator==(const LinkId& a, const LinkId& b) { return a.bits_ == b.bits_; }

private:
    friend LinkId new_link_id(std::string_view, const BloomParams&);
    Bits256 bits_;
    std::vector<std::uint16_t> positions_;
};

/// In-packet Bloom filter: the OR of the LinkIds of a delivery path or tree.
class ForwardingId {
public:
    ForwardingId() = default;
    explicit ForwardingId(const Bits256& bits) : bits_(bits) {}

    const Bits256& bits() const { return bits_; }
    bool empty() const { return bits_.none(); }
    std::string to_hex() const { return bits_.to_hex(); }
    static ForwardingId from_hex(std::string_view hex) { return ForwardingId(Bits256::from_hex(hex)); }

    ForwardingId& operator|=(const LinkId& l) {
        bits_ |= l.bits();
        return *this;
    }
    ForwardingId& operator|=(const ForwardingId& f) {
        bits_ |= f.bits_;
        return *this;
    }

    friend bool operator==(const ForwardingId&, const ForwardingId&) = default;

private:
    Bits256 bits_;
};

/// Keyed deterministic generator: the same (key, params) always yields the same
/// k positions. Distinct keys are independent draws.
LinkId new_link_id(std::string_view link_key, const BloomParams& params);

ForwardingId encode_path(std::span<const LinkId> links);
ForwardingId merge(const ForwardingId& a, const ForwardingId& b);
bool matches(const LinkId& link, const ForwardingId& fid);

/// (1 - e^(-k n / m))^k
double theoretical_fp_rate(std::size_t n_links, const BloomParams& params);

}  // namespace edgeicn
