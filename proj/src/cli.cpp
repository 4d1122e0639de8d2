#include "edgeicn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "edgeicn/overhead.hpp"
#include "edgeicn/scenario.hpp"
#include "edgeicn/sim.hpp"

namespace edgeicn {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << content;
    if (!f) throw Error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Edge-ICN simulator and overhead comparator", "edgeicn"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("sim", "Run scenarios on the simulated network");
    sim->require_subcommand(1);
    auto* sim_run = sim->add_subcommand("run", "Run one scenario file");
    std::string scenario_path, mode_name, trace_path, counters_path;
    std::optional<std::uint64_t> seed;
    sim_run->add_option("--scenario", scenario_path, "Scenario file")->required();
    sim_run->add_option("--mode", mode_name, "edge-icn or point")
        ->required()
        ->check(CLI::IsMember({"edge-icn", "point"}));
    sim_run->add_option("--seed", seed, "Seed for LinkId generation (overrides the scenario)");
    sim_run->add_option("--trace", trace_path, "Write the switch trace here");
    sim_run->add_option("--counters", counters_path, "Write the counters CSV here");

    auto* analyze = app.add_subcommand("analyze", "Closed-form overhead models");
    analyze->require_subcommand(1);
    auto* sweep_cmd = analyze->add_subcommand("sweep", "Sweep one parameter and emit CSV");
    std::string vary, out_path;
    SweepRange range;
    AnalysisParams fixed;
    bool include_sender = false;
    std::uint64_t resolution_cost = 2;
    sweep_cmd->add_option("--vary", vary, "advertisers, subscribers or scopes")
        ->required()
        ->check(CLI::IsMember({"advertisers", "subscribers", "scopes"}));
    sweep_cmd->add_option("--from", range.from)->required();
    sweep_cmd->add_option("--to", range.to)->required();
    sweep_cmd->add_option("--step", range.step)->capture_default_str();
    sweep_cmd->add_option("--scopes", fixed.scopes)->capture_default_str();
    sweep_cmd->add_option("--advertisers", fixed.advertisers)->capture_default_str();
    sweep_cmd->add_option("--subscribers", fixed.subscribers)->capture_default_str();
    sweep_cmd->add_option("--l", fixed.l)->capture_default_str()->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--include-sender", include_sender, "Count the advertiser as a tree receiver");
    sweep_cmd->add_option("--resolution-cost", resolution_cost, "l-units per resolution exchange")
        ->capture_default_str();
    sweep_cmd->add_option("--out", out_path, "CSV output (stdout when omitted)");

    auto* topo = app.add_subcommand("topo", "Topology utilities");
    topo->require_subcommand(1);
    auto* topo_check = topo->add_subcommand("check", "Validate a topology file");
    std::string topo_path;
    topo_check->add_option("topology,--topology", topo_path, "Topology file")->required();

    if (args.empty()) {
        err << app.help();
        return 1;
    }
    std::vector<std::string> argv_store;
    argv_store.push_back("edgeicn");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim_run->parsed()) {
            const auto cfg = load_scenario(scenario_path);
            const auto result = run_scenario(cfg, parse_mode(mode_name), seed, !trace_path.empty());
            if (!trace_path.empty()) write_file(trace_path, result.trace_text());
            if (counters_path.empty()) {
                out << result.counters_csv();
            } else {
                write_file(counters_path, result.counters_csv());
                out << "hop_traversals=" << result.counters.hop_traversals
                    << " l_units=" << result.l_units().to_string() << "\n";
            }
        } else if (sweep_cmd->parsed()) {
            range.param = parse_sweep_param(vary);
            fixed.include_sender_in_tree = include_sender;
            fixed.resolution_cost = Rational(static_cast<std::int64_t>(resolution_cost));
            const auto csv = sweep_csv(sweep(range, fixed));
            if (out_path.empty())
                out << csv;
            else
                write_file(out_path, csv);
        } else if (topo_check->parsed()) {
            const auto spec = parse_topology(read_file(topo_path));
            const auto t = build_topology(spec, BloomParams{});
            out << "ok: " << t.switches().size() << " switches, " << t.nodes().size() << " nodes, "
                << t.links().size() << " directed links\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace edgeicn
