#include "edgeicn/scenario.hpp"

#include "edgeicn/coap.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace edgeicn {

namespace {

std::uint64_t parse_u64(std::string_view s, std::size_t line, std::string_view what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line, std::string(what) + " must be a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

/// Strips a trailing `@tick=<t>` token.
std::optional<Tick> take_tick(std::vector<std::string>& t, std::size_t line) {
    if (t.empty() || !t.back().starts_with("@tick=")) return std::nullopt;
    auto v = parse_u64(std::string_view(t.back()).substr(6), line, "@tick");
    t.pop_back();
    return v;
}

void arity(const std::vector<std::string>& t, std::size_t lo, std::size_t hi, std::size_t line, const char* usage) {
    if (t.size() < lo || t.size() > hi) throw ParseError(line, std::string("expected `") + usage + "`");
}

TopologySpec read_topology_file(const std::filesystem::path& path, std::size_t line) {
    std::ifstream in(path);
    if (!in) throw ParseError(line, "cannot open topology file '" + path.string() + "'");
    TopologySpec spec;
    std::string text;
    std::size_t inner = 0;
    try {
        while (std::getline(in, text)) {
            ++inner;
            auto tokens = tokenize_line(text);
            if (!tokens.empty() && !spec.consume(tokens, inner))
                throw ParseError(inner, "unknown stanza '" + tokens.front() + "'");
        }
    } catch (const ParseError& e) {
        throw ParseError(line, path.filename().string() + ": " + e.what());
    }
    // Errors found later cite the stanza that pulled the file in.
    for (auto& s : spec.switches) s.line = line;
    for (auto& l : spec.links) l.line = line;
    for (auto& n : spec.nodes) n.line = line;
    for (auto& g : spec.groups) g.line = line;
    for (auto& a : spec.aliases) a.line = line;
    if (spec.controller) spec.controller_line = line;
    return spec;
}

void merge_into(TopologySpec& dst, TopologySpec src, std::size_t line) {
    auto append = [](auto& a, auto& b) { a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end())); };
    append(dst.switches, src.switches);
    append(dst.links, src.links);
    append(dst.nodes, src.nodes);
    append(dst.groups, src.groups);
    append(dst.aliases, src.aliases);
    if (src.controller) {
        if (dst.controller) throw ParseError(line, "controller declared twice");
        dst.controller = src.controller;
        dst.controller_line = src.controller_line;
    }
}

void validate(const ScenarioConfig& cfg) {
    cfg.topology.validate();

    std::set<std::string, std::less<>> nodes, ids;
    for (const auto& n : cfg.topology.nodes) {
        nodes.insert(n.name);
        ids.insert(n.name);
    }
    for (const auto& a : cfg.topology.aliases) ids.insert(a.name);
    std::set<std::string, std::less<>> switches;
    for (const auto& s : cfg.topology.switches) switches.insert(s.id);

    auto need_node = [&](const std::string& name, std::size_t line) {
        if (!nodes.count(name)) throw ParseError(line, "unknown node '" + name + "'");
    };
    for (const auto& c : cfg.contents) need_node(c.node, c.line);
    for (const auto& r : cfg.coap_resources) need_node(r.node, r.line);
    std::set<std::string> labels;
    for (const auto& g : cfg.context_groups) {
        if (!labels.insert(g.label).second) throw ParseError(g.line, "duplicate context group '" + g.label + "'");
        if (g.label == kAllNodes) throw ParseError(g.line, "all.nodes is implicit and cannot be redefined");
        if (ids.count(g.label) || switches.count(g.label) ||
            std::any_of(cfg.topology.groups.begin(), cfg.topology.groups.end(),
                        [&](const auto& vg) { return vg.name == g.label; }))
            throw ParseError(g.line, "context group '" + g.label + "' clashes with another name");
        if (g.members.empty()) throw ParseError(g.line, "empty context group '" + g.label + "'");
        for (const auto& m : g.members) need_node(m, g.line);
    }
    for (const auto& a : cfg.actions) need_node(a.node, a.line);
}

}  // namespace

Bytes parse_hex_bytes(std::string_view hex) {
    if (hex == "-") return {};
    if (hex.size() % 2 != 0) throw Error("hex bytes must have even length");
    Bytes out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        std::uint8_t b = 0;
        auto [p, ec] = std::from_chars(hex.data() + i, hex.data() + i + 2, b, 16);
        if (ec != std::errc() || p != hex.data() + i + 2) throw Error("invalid hex bytes '" + std::string(hex) + "'");
        out.push_back(b);
    }
    return out;
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    ScenarioConfig cfg;
    std::size_t pos = 0, line = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line;
        auto t = tokenize_line(text.substr(pos, end - pos));
        pos = end + 1;
        if (t.empty() || cfg.topology.consume(t, line)) continue;

        const std::string& kw = t.front();
        auto bytes = [&](const std::string& hex) {
            try {
                return parse_hex_bytes(hex);
            } catch (const Error& e) {
                throw ParseError(line, e.what());
            }
        };

        if (kw == "topology") {
            arity(t, 2, 2, line, "topology <file>");
            std::filesystem::path p = t[1];
            if (p.is_relative()) p = base_dir / p;
            merge_into(cfg.topology, read_topology_file(p, line), line);
        } else if (kw == "bloom") {
            arity(t, 2, 3, line, "bloom [k=<k>] [seed=<seed>]");
            for (std::size_t i = 1; i < t.size(); ++i) {
                if (t[i].starts_with("k="))
                    cfg.bloom.k = static_cast<unsigned>(parse_u64(std::string_view(t[i]).substr(2), line, "k"));
                else if (t[i].starts_with("seed="))
                    cfg.bloom.seed = parse_u64(std::string_view(t[i]).substr(5), line, "seed");
                else
                    throw ParseError(line, "unknown bloom parameter '" + t[i] + "'");
            }
            try {
                cfg.bloom.validate();
            } catch (const Error& e) {
                throw ParseError(line, e.what());
            }
        } else if (kw == "hop-limit") {
            arity(t, 2, 2, line, "hop-limit <n>");
            auto v = parse_u64(t[1], line, "hop-limit");
            if (v < 1 || v > 255) throw ParseError(line, "hop-limit must be in [1,255]");
            cfg.hop_limit = static_cast<int>(v);
        } else if (kw == "timeout") {
            arity(t, 2, 2, line, "timeout <ticks>");
            cfg.timeout = parse_u64(t[1], line, "timeout");
            if (cfg.timeout == 0) throw ParseError(line, "timeout must be positive");
        } else if (kw == "l-unit") {
            arity(t, 2, 2, line, "l-unit <l>");
            cfg.l_unit = parse_u64(t[1], line, "l-unit");
            if (cfg.l_unit == 0) throw ParseError(line, "l-unit must be at least 1");
        } else if (kw == "content") {
            auto at = take_tick(t, line);
            arity(t, 5, 5, line, "content <node> <scope> <item> <hexbytes> [@tick=<t>]");
            cfg.contents.push_back({t[1], t[2], t[3], bytes(t[4]), at.value_or(0), line});
        } else if (kw == "coap-resource") {
            auto at = take_tick(t, line);
            arity(t, 5, 5, line, "coap-resource <node> <host> <path> <hexbytes> [@tick=<t>]");
            if (t[2].empty()) throw ParseError(line, "empty host");
            cfg.coap_resources.push_back({t[1], t[2], t[3], bytes(t[4]), at.value_or(0), line});
        } else if (kw == "context-group") {
            arity(t, 3, 3, line, "context-group <label> <node,...>");
            cfg.context_groups.push_back({t[1], split_commas(t[2]), line});
        } else if (kw == "advertise") {
            ScenarioAction a;
            a.at = take_tick(t, line);
            arity(t, 3, 4, line, "advertise <node> <scope> [<sender-name>] [@tick=<t>]");
            a.kind = ScenarioAction::Kind::Advertise;
            a.node = t[1];
            a.scope = t[2];
            if (t.size() == 4) a.sender = t[3];
            a.line = line;
            cfg.actions.push_back(std::move(a));
        } else if (kw == "subscribe") {
            ScenarioAction a;
            a.at = take_tick(t, line);
            arity(t, 4, 5, line, "subscribe <node> <scope> <item> [first|round-robin] [@tick=<t>]");
            a.kind = ScenarioAction::Kind::Subscribe;
            a.node = t[1];
            a.scope = t[2];
            a.item = t[3];
            if (t.size() == 5) {
                try {
                    a.policy = parse_selection_policy(t[4]);
                } catch (const Error& e) {
                    throw ParseError(line, e.what());
                }
            }
            a.line = line;
            cfg.actions.push_back(std::move(a));
        } else if (kw == "coap-advertise") {
            ScenarioAction a;
            a.at = take_tick(t, line);
            arity(t, 2, 2, line, "coap-advertise <node> [@tick=<t>]");
            a.kind = ScenarioAction::Kind::CoapAdvertise;
            a.node = t[1];
            a.line = line;
            cfg.actions.push_back(std::move(a));
        } else if (kw == "coap-get") {
            ScenarioAction a;
            a.at = take_tick(t, line);
            if (t.size() == 5 && t[4] == "observe") {
                a.observe = true;
                t.pop_back();
            }
            arity(t, 4, 4, line, "coap-get <node> <host> <path> [observe] [@tick=<t>]");
            a.kind = ScenarioAction::Kind::CoapGet;
            a.node = t[1];
            a.scope = t[2];
            a.item = t[3];
            a.line = line;
            cfg.actions.push_back(std::move(a));
        } else {
            throw ParseError(line, "unknown stanza '" + kw + "'");
        }
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open scenario '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), file.parent_path());
}

ScenarioShape shape_of(const ScenarioConfig& cfg) {
    std::set<std::string> scopes, advertisers, subscribers;
    for (const auto& a : cfg.actions) {
        switch (a.kind) {
            case ScenarioAction::Kind::Advertise:
                scopes.insert(a.scope);
                advertisers.insert(a.node);
                break;
            case ScenarioAction::Kind::CoapAdvertise:
                for (const auto& r : cfg.coap_resources)
                    if (r.node == a.node) scopes.insert(map_host_to_scope(r.host));
                advertisers.insert(a.node);
                break;
            case ScenarioAction::Kind::Subscribe:
            case ScenarioAction::Kind::CoapGet:
                subscribers.insert(a.node);
                break;
        }
    }
    return {cfg.l_unit, scopes.size(), advertisers.size(), subscribers.size()};
}

std::string conformant_star_scenario(std::uint64_t scopes, std::uint64_t advertisers, std::uint64_t subscribers,
                                     std::uint64_t l) {
    if (l < 1) throw Error("l must be at least 1");
    std::ostringstream os;
    os << "switch hub\ncontroller hub\nl-unit " << l << "\n";
    auto attach = [&](const std::string& name) {
        std::string prev = "hub";
        for (std::uint64_t i = 1; i < l; ++i) {
            std::string sw = name + ".c" + std::to_string(i);
            os << "switch " << sw << "\nlink " << prev << " " << sw << "\n";
            prev = sw;
        }
        os << "node " << name << " " << prev << "\n";
    };
    for (std::uint64_t i = 1; i <= advertisers; ++i) attach("a" + std::to_string(i));
    for (std::uint64_t i = 1; i <= subscribers; ++i) attach("u" + std::to_string(i));
    if (advertisers > 0) {
        auto owner = [&](std::uint64_t j) { return "a" + std::to_string(j % advertisers + 1); };
        for (std::uint64_t j = 0; j < scopes; ++j)
            os << "content " << owner(j) << " scope" << j << " item 01\n";
        for (std::uint64_t j = 0; j < scopes; ++j) os << "advertise " << owner(j) << " scope" << j << "\n";
    }
    for (std::uint64_t i = 1; i <= subscribers; ++i)
        for (std::uint64_t j = 0; j < scopes; ++j) os << "subscribe u" << i << " scope" << j << " item\n";
    return os.str();
}

}  // namespace edgeicn
