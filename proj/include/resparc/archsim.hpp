// Event-driven simulator of the mapped three-tier hierarchy: crossbar reads
// and time-multiplexed neuron integration inside mPEs, switch-network packet
// transfers with zero-check suppression, IO-bus broadcasts with NC tags.
#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <vector>

#include "resparc/mapper.hpp"
#include "resparc/snn.hpp"

namespace resparc {

struct SimOptions {
    bool event_driven = true;
    std::ostream* trace = nullptr; // one line per packet/bus event when set
};

struct SimCounters {
    uint64_t crossbar_reads = 0;
    uint64_t neuron_integrations = 0;
    uint64_t spikes_emitted = 0;
    uint64_t packets_generated = 0;
    uint64_t packets_sent = 0;
    uint64_t packets_suppressed = 0;
    uint64_t hop_count = 0;
    uint64_t cext_transfers = 0;
    uint64_t bus_broadcasts = 0;
    uint64_t bus_suppressed = 0;
    uint64_t sram_reads = 0;
    uint64_t sram_writes = 0;
    uint64_t buffer_accesses = 0;
    uint64_t cycles_elapsed = 0;
    // cycle breakdown (sums to cycles_elapsed)
    uint64_t cycles_input = 0;
    uint64_t cycles_compute = 0;
    uint64_t cycles_cext = 0;
    uint64_t cycles_switch = 0;
    uint64_t cycles_bus = 0;

    bool operator==(const SimCounters&) const = default;
};

struct SimResult {
    std::vector<SpikeTrain> layer_outputs;
    SimCounters counters;
};

// true iff every payload word is zero (the switch/SRAM zero-check logic).
bool zero_check(const std::vector<uint64_t>& payload_words);

SimResult simulate(const MappingPlan& plan, const SpikeTrain& input,
                   const SimOptions& opts);

namespace netsim {

// One spike packet inside the switch network of a NeuroCell. `path` is the
// ordered list of switches it traverses (local switch id = y * grid_w + x);
// delivery to the destination mPE happens at the last switch.
struct FabricPacket {
    uint32_t id = 0;
    uint32_t src = 0; // local mPE id
    uint32_t dst = 0;
    std::vector<uint32_t> path;
};

std::vector<uint32_t> route_path(uint32_t grid_w, uint32_t src, uint32_t dst,
                                 RouteKind kind);

// Switch network of one NeuroCell: one switch per mPE, bounded per-link input
// buffers, round-robin arbitration per output port (one grant per port per
// cycle). Arbitration cursors persist across phases.
class SwitchFabric {
public:
    SwitchFabric(uint32_t grid_w, uint32_t grid_h, uint32_t buffer_depth);

    struct PhaseStats {
        uint64_t cycles = 0;
        uint64_t hops = 0;            // switch traversals (grants)
        uint64_t buffer_accesses = 0; // fabric buffer enqueues + dequeues
        std::vector<uint32_t> delivery_order; // packet ids
    };

    // Runs until every packet is delivered. Sources inject at most one packet
    // per cycle. Throws SimError on buffer overflow, naming switch, port and
    // timestep. With trace set, emits one line per grant (cycle, switch,
    // ports, packet).
    PhaseStats run_phase(const std::vector<FabricPacket>& packets, uint32_t timestep,
                         std::ostream* trace = nullptr);

private:
    struct InFlight {
        FabricPacket pkt;
        uint32_t leg = 0; // index into pkt.path of the switch currently holding it
    };
    // Input buffer source ids: 0 = local mPE injection, 1 + s = link from
    // switch s. Output port keys: (0, mPE) for delivery, (1, switch) for links.
    using PortKey = uint64_t;
    static PortKey deliver_port(uint32_t mpe) { return (uint64_t(0) << 32) | mpe; }
    static PortKey link_port(uint32_t sw) { return (uint64_t(1) << 32) | sw; }

    uint32_t grid_w_, grid_h_, depth_;
    std::vector<std::map<uint32_t, std::deque<InFlight>>> buffers_; // per switch
    std::map<std::pair<uint32_t, PortKey>, uint32_t> rr_cursor_;    // next source id
};

} // namespace netsim

} // namespace resparc
