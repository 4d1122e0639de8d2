#include "edgeicn/overhead.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace edgeicn {

namespace {

__extension__ typedef __int128 i128;

std::int64_t checked(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error("overhead value out of range");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den) {
    if (den == 0) throw Error("division by zero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num, b = den;
    while (b != 0) {
        auto t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(checked(num), checked(den));
}

Rational count(std::uint64_t v) {
    if (v > static_cast<std::uint64_t>(INT64_MAX)) throw Error("parameter out of range");
    return Rational(static_cast<std::int64_t>(v));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw Error("division by zero");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << to_double();
    auto s = os.str();
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<i128>(a.num_) * b.den_ <=> static_cast<i128>(b.num_) * a.den_;
}

void AnalysisParams::validate() const {
    if (l < 1) throw Error("l must be at least 1");
    if (resolution_cost < Rational(0)) throw Error("resolution cost must be non-negative");
}

OverheadTerms point_terms(const AnalysisParams& p) {
    p.validate();
    if (p.advertisers == 0) return {};  // nothing is advertised, nothing can be resolved
    const Rational s = count(p.scopes);
    return {s, p.resolution_cost * count(p.subscribers) * s};
}

OverheadTerms edge_terms(const AnalysisParams& p) {
    p.validate();
    if (p.advertisers == 0) return {};
    const Rational s = count(p.scopes);
    // One l-unit from the advertiser to the hub, then l per receiving node.
    std::uint64_t receivers = p.advertisers + p.subscribers - 1 + (p.include_sender_in_tree ? 1 : 0);
    // A lone advertiser has nobody to tell.
    const Rational advertisement = receivers == 0 ? Rational(0) : s * (Rational(1) + count(receivers));
    // Each subscriber resolves each advertiser it fetches from; only advertisers
    // holding at least one scope are ever contacted.
    const Rational pairs = count(p.subscribers) * count(std::min(p.scopes, p.advertisers));
    return {advertisement, p.resolution_cost * pairs};
}

SweepParam parse_sweep_param(std::string_view s) {
    if (s == "scopes" || s == "S") return SweepParam::Scopes;
    if (s == "advertisers" || s == "A") return SweepParam::Advertisers;
    if (s == "subscribers" || s == "U") return SweepParam::Subscribers;
    throw Error("unknown sweep parameter '" + std::string(s) + "' (expected scopes, advertisers or subscribers)");
}

std::string to_string(SweepParam p) {
    switch (p) {
        case SweepParam::Scopes:
            return "scopes";
        case SweepParam::Advertisers:
            return "advertisers";
        case SweepParam::Subscribers:
            return "subscribers";
    }
    return "?";
}

std::vector<SweepRow> sweep(const std::vector<SweepRange>& ranges, const AnalysisParams& fixed) {
    if (ranges.size() != 1) throw Error("exactly one parameter may be swept, got " + std::to_string(ranges.size()));
    return sweep(ranges.front(), fixed);
}

std::vector<SweepRow> sweep(const SweepRange& r, const AnalysisParams& fixed) {
    if (r.step == 0) throw Error("sweep step must be positive");
    if (r.from > r.to) throw Error("sweep range is empty (from > to)");
    fixed.validate();
    std::vector<SweepRow> rows;
    for (std::uint64_t v = r.from;; v += r.step) {
        AnalysisParams p = fixed;
        switch (r.param) {
            case SweepParam::Scopes:
                p.scopes = v;
                break;
            case SweepParam::Advertisers:
                p.advertisers = v;
                break;
            case SweepParam::Subscribers:
                p.subscribers = v;
                break;
        }
        rows.push_back({r.param, v, point_model(p), edge_model(p)});
        if (r.to - v < r.step) break;
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "varied,value,point_l_units,edge_l_units\n";
    for (const auto& row : rows)
        out += to_string(row.varied) + "," + std::to_string(row.value) + "," + row.point.to_string() + "," +
               row.edge.to_string() + "\n";
    return out;
}

}  // namespace edgeicn
