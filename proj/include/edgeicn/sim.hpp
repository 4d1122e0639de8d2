#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "edgeicn/controller.hpp"
#include "edgeicn/data_plane.hpp"
#include "edgeicn/edge_node.hpp"
#include "edgeicn/overhead.hpp"
#include "edgeicn/scenario.hpp"

namespace edgeicn {

struct Counters {
    std::uint64_t hop_traversals = 0;
    std::array<std::uint64_t, kPhaseCount> hops_by_phase{};
    std::uint64_t resolution_packets = 0;
    std::uint64_t advertisements = 0;
    std::uint64_t subscriptions = 0;
    std::uint64_t responses = 0;
    std::uint64_t duplicate_deliveries = 0;
    std::uint64_t fp_deliveries = 0;
    std::uint64_t drops = 0;

    // Copy accounting, see conserved().
    std::uint64_t copies_emitted = 0;
    std::uint64_t copies_delivered = 0;  // reached an edge node or the control service
    std::uint64_t copies_forwarded = 0;  // consumed by a switch that re-emitted or punted them
    std::uint64_t copies_dropped = 0;    // consumed by a switch with nothing to emit
    std::uint64_t copies_pending = 0;

    std::uint64_t failed_actions = 0;
    std::uint64_t failed_subscriptions = 0;
    std::uint64_t upstream_requests = 0;
    std::uint64_t coap_acks = 0;
    std::uint64_t legacy_fallbacks = 0;

    /// (node, target name) -> resolution requests sent.
    std::map<std::pair<std::string, std::string>, std::uint64_t> resolutions_by_target;

    bool conserved() const {
        return copies_emitted == copies_delivered + copies_forwarded + copies_dropped + copies_pending;
    }
};

/// Advertisement and resolution traffic in l-units.
Rational measure_l_units(const Counters& c, std::uint64_t l);

/// Rendezvous point of the POINT comparator; lives at the controller switch.
class RendezvousPoint {
public:
    void store(const ScopeId& scope, const std::string& provider);
    /// First-registered provider, if any.
    std::optional<std::string> provider(const ScopeId& scope) const;
    const std::map<ScopeId, std::vector<std::string>>& scopes() const { return scopes_; }

private:
    std::map<ScopeId, std::vector<std::string>> scopes_;
};

/// What a single injected Bloom packet reached.
struct DeliveryReport {
    std::set<NodeIndex> delivered;
    std::set<LinkIndex> links_used;
    std::uint64_t copies_emitted = 0;
    std::uint64_t duplicate_copies = 0;
    std::uint64_t switch_drops = 0;
};

class Simulation : private NodeNetwork {
public:
    struct Options {
        Mode mode = Mode::EdgeIcn;
        int hop_limit = kDefaultHopLimit;
        Tick timeout = kDefaultTimeout;
        bool record_trace = true;
    };

    Simulation(std::shared_ptr<const Topology> topo, Options opts);
    /// Builds the topology (with `seed` overriding the scenario's Bloom seed),
    /// registers groups and content, and schedules the scenario's actions.
    Simulation(const ScenarioConfig& cfg, Mode mode, std::optional<std::uint64_t> seed = std::nullopt,
               bool record_trace = true);
    ~Simulation() override;

    /// Processes events until nothing is left to do.
    void run();

    /// Sends one Bloom-routed probe from `from` and runs to quiescence.
    DeliveryReport probe(NodeIndex from, const ForwardingId& fid, std::optional<int> hop_limit = std::nullopt);

    Tick now() const override { return now_; }
    const Topology& topology() const { return *topo_; }
    Controller& controller() { return controller_; }
    const RendezvousPoint& rendezvous() const { return rv_; }
    EdgeNode& node(std::string_view name);
    EdgeNode& node(NodeIndex i) { return *nodes_.at(i); }
    /// Counters including the per-node statistics gathered so far.
    Counters counters() const;
    const std::vector<std::string>& trace() const { return trace_; }
    std::string trace_text() const;

private:
    struct Packet;
    struct ControlTransit;
    struct CopyEvent {
        std::shared_ptr<const Packet> packet;
        LinkIndex link;
        int hop_limit;
        std::uint64_t multiplicity;
    };
    struct ControlEvent {
        std::shared_ptr<ControlTransit> transit;
        std::size_t pos;  // index of the link just traversed
    };
    struct ActionEvent {
        std::size_t action;
        bool sequential;
    };
    struct TimerEvent {
        NodeIndex node;
        std::uint64_t id;
    };
    struct AvailabilityEvent {
        NodeIndex node;
        bool coap;
        std::string a, b;
    };
    using EventBody = std::variant<CopyEvent, ControlEvent, ActionEvent, TimerEvent, AvailabilityEvent>;
    using EventKey = std::pair<Tick, std::uint64_t>;  // (tick, insertion order)

    // NodeNetwork
    void send_control(NodeIndex from, ControlBody body, Phase phase) override;
    void send_bloom(NodeIndex from, const ForwardingId& fid, IcnMessage msg, Phase phase) override;
    void set_timer(NodeIndex node, Tick at, std::uint64_t timer_id) override;
    bool is_virtual(std::string_view name) const override;

    EventKey schedule(Tick at, EventBody body);
    void dispatch(EventBody& e);
    void emit_copy(const std::shared_ptr<const Packet>& p, LinkIndex link, int hop_limit, std::uint64_t mult);
    void on_copy(const CopyEvent& e);
    void deliver_bloom(NodeIndex n, const Packet& p, std::uint64_t mult);
    bool accepts(NodeIndex n, const IcnMessage& msg) const;
    void launch_control(std::shared_ptr<ControlTransit> t);
    void on_control_hop(const ControlEvent& e);
    void serve_control(const ControlTransit& t);
    void reply_control(NodeIndex to, ControlBody body, Phase phase);
    void run_action(const ScenarioAction& a);
    void record(SwitchIndex sw, EtherType et, const Bits256& fid, const std::string& action);
    void add(std::uint64_t& counter, std::uint64_t v);

    std::shared_ptr<const Topology> topo_;
    Options opts_;
    Controller controller_;
    RendezvousPoint rv_;
    std::vector<Switch> switches_;
    std::vector<std::unique_ptr<EdgeNode>> nodes_;
    std::vector<ScenarioAction> actions_;
    std::vector<std::size_t> sequential_;  // actions without a tick, in file order
    std::size_t next_sequential_ = 0;

    Tick now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_packet_ = 1;
    std::uint64_t in_flight_ = 0;  // copy and control events queued
    bool sequential_queued_ = false;
    std::map<EventKey, EventBody> queue_;
    std::map<std::tuple<std::uint64_t, LinkIndex, Tick>, EventKey> coalesce_;
    std::set<std::pair<std::uint64_t, NodeIndex>> seen_;
    std::optional<DeliveryReport> probe_;
    SwitchIndex service_ = 0;  // controller and rendezvous point
    std::map<NodeIndex, std::uint16_t> coap_message_ids_;

    Counters counters_;
    std::vector<std::string> trace_;
};

struct RunResult {
    Mode mode = Mode::EdgeIcn;
    ScenarioShape shape;
    Counters counters;
    std::vector<std::string> trace;

    Rational l_units() const { return measure_l_units(counters, shape.l); }
    std::string trace_text() const;
    /// Header plus one row.
    std::string counters_csv() const;
};

inline constexpr const char* kCountersCsvHeader =
    "mode,l,scopes,advertisers,subscribers,hop_traversals,l_units,resolution_packets,fp_deliveries,"
    "duplicate_deliveries,drops";

RunResult run_scenario(const ScenarioConfig& cfg, Mode mode, std::optional<std::uint64_t> seed = std::nullopt,
                       bool record_trace = true);

}  // namespace edgeicn
