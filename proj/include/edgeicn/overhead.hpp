#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edgeicn/bloom.hpp"

namespace edgeicn {

/// Exact fraction, always normalised with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Integers print bare; anything else as a decimal with up to 6 places.
    std::string to_string() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Inputs of the closed-form overhead comparison. Costs are in l-units, one
/// l-unit being the hop count between an edge node and the hub.
struct AnalysisParams {
    std::uint64_t scopes = 0;       // S
    std::uint64_t advertisers = 0;  // A
    std::uint64_t subscribers = 0;  // U
    std::uint64_t l = 1;
    /// Counts a branch back to the advertiser itself in the all.nodes tree.
    bool include_sender_in_tree = false;
    /// Request plus reply of one resolution exchange with the hub.
    Rational resolution_cost{2};

    void validate() const;
};

struct OverheadTerms {
    Rational advertisement;
    Rational resolution;
    Rational total() const { return advertisement + resolution; }
};

/// POINT: each scope advertised once to the rendezvous point, then one
/// rendezvous exchange per (subscriber, scope).
OverheadTerms point_terms(const AnalysisParams& p);
/// Edge-ICN: each scope advertised over the all.nodes tree, then one
/// controller exchange per (subscriber, advertiser) pair that actually serves a scope.
OverheadTerms edge_terms(const AnalysisParams& p);

inline Rational point_model(const AnalysisParams& p) { return point_terms(p).total(); }
inline Rational edge_model(const AnalysisParams& p) { return edge_terms(p).total(); }

enum class SweepParam { Scopes, Advertisers, Subscribers };
SweepParam parse_sweep_param(std::string_view s);
std::string to_string(SweepParam p);

struct SweepRange {
    SweepParam param = SweepParam::Subscribers;
    std::uint64_t from = 0, to = 0, step = 1;
};

struct SweepRow {
    SweepParam varied = SweepParam::Subscribers;
    std::uint64_t value = 0;
    Rational point;
    Rational edge;
};

/// Exactly one parameter may vary; the others come from `fixed`.
std::vector<SweepRow> sweep(const std::vector<SweepRange>& ranges, const AnalysisParams& fixed);
std::vector<SweepRow> sweep(const SweepRange& range, const AnalysisParams& fixed);

/// Header `varied,value,point_l_units,edge_l_units`, one line per row.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace edgeicn
