#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgeicn/bloom.hpp"
#include "edgeicn/overhead.hpp"
#include "edgeicn/scenario.hpp"
#include "edgeicn/sim.hpp"

namespace py = pybind11;
using namespace edgeicn;

namespace {

AnalysisParams make_params(std::uint64_t scopes, std::uint64_t advertisers, std::uint64_t subscribers,
                           std::uint64_t l, bool include_sender, std::int64_t resolution_cost) {
    AnalysisParams p;
    p.scopes = scopes;
    p.advertisers = advertisers;
    p.subscribers = subscribers;
    p.l = l;
    p.include_sender_in_tree = include_sender;
    p.resolution_cost = Rational(resolution_cost);
    return p;
}

py::tuple as_pair(const Rational& r) { return py::make_tuple(r.num(), r.den()); }

py::dict counters_dict(const Counters& c) {
    py::dict d;
    d["hop_traversals"] = c.hop_traversals;
    d["resolution_packets"] = c.resolution_packets;
    d["advertisements"] = c.advertisements;
    d["subscriptions"] = c.subscriptions;
    d["responses"] = c.responses;
    d["duplicate_deliveries"] = c.duplicate_deliveries;
    d["fp_deliveries"] = c.fp_deliveries;
    d["drops"] = c.drops;
    d["failed_subscriptions"] = c.failed_subscriptions;
    py::dict by_target;
    for (const auto& [key, n] : c.resolutions_by_target) by_target[py::make_tuple(key.first, key.second)] = n;
    d["resolutions_by_target"] = by_target;
    d["conserved"] = c.conserved();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Edge-ICN simulator core";
    py::register_exception<Error>(m, "EdgeIcnError", PyExc_ValueError);

    m.def(
        "new_link_id",
        [](const std::string& key, unsigned k, std::uint64_t seed) {
            return new_link_id(key, BloomParams{k, seed}).to_hex();
        },
        py::arg("key"), py::arg("k") = 5, py::arg("seed") = 0);
    m.def(
        "theoretical_fp_rate",
        [](std::size_t n, unsigned k) { return theoretical_fp_rate(n, BloomParams{k, 0}); }, py::arg("n_links"),
        py::arg("k") = 5);

    auto model = [&m](const char* name, Rational (*fn)(const AnalysisParams&)) {
        m.def(
            name,
            [fn](std::uint64_t s, std::uint64_t a, std::uint64_t u, std::uint64_t l, bool include_sender,
                 std::int64_t cost) { return as_pair(fn(make_params(s, a, u, l, include_sender, cost))); },
            py::arg("scopes"), py::arg("advertisers"), py::arg("subscribers"), py::arg("l") = 1,
            py::arg("include_sender_in_tree") = false, py::arg("resolution_cost") = 2);
    };
    model("_point_model", &point_model);
    model("_edge_model", &edge_model);

    m.def(
        "sweep_csv",
        [](const std::string& vary, std::uint64_t from, std::uint64_t to, std::uint64_t step, std::uint64_t scopes,
           std::uint64_t advertisers, std::uint64_t subscribers, std::uint64_t l) {
            SweepRange r{parse_sweep_param(vary), from, to, step};
            return sweep_csv(sweep(r, make_params(scopes, advertisers, subscribers, l, false, 2)));
        },
        py::arg("vary"), py::arg("start"), py::arg("stop"), py::arg("step") = 1, py::arg("scopes") = 0,
        py::arg("advertisers") = 0, py::arg("subscribers") = 0, py::arg("l") = 1);

    m.def("conformant_star_scenario", &conformant_star_scenario, py::arg("scopes"), py::arg("advertisers"),
          py::arg("subscribers"), py::arg("l"));

    m.def(
        "_run_scenario",
        [](const std::string& text, const std::string& mode, std::optional<std::uint64_t> seed) {
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(parse_scenario(text), parse_mode(mode), seed);
            }
            py::dict d;
            d["mode"] = to_string(r.mode);
            d["counters"] = counters_dict(r.counters);
            d["l_units"] = as_pair(r.l_units());
            d["trace"] = r.trace;
            d["counters_csv"] = r.counters_csv();
            return d;
        },
        py::arg("text"), py::arg("mode") = "edge-icn", py::arg("seed") = std::nullopt);
}
