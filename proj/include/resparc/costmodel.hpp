// Converts simulation counters into energy/latency reports, plus the abstract
// event-driven CMOS baseline for ratio studies. Every per-event constant is
// configuration-supplied; the shipped defaults are calibration artifacts.
#pragma once

#include <cstdint>

#include "resparc/archsim.hpp"
#include "resparc/mapper.hpp"

namespace resparc {

struct EnergyConfig {
    // crossbar read energy per tile activation: base + per_cell*R*C + per_col*C
    double xbar_base = 1.0e-12;
    double xbar_per_cell = 1.0e-14;
    double xbar_per_col = 1.0e-13;

    double e_neuron_integrate = 2.0e-12;
    double e_spike = 5.0e-13;
    double e_switch_hop = 6.0e-12;
    double e_buffer_access = 2.0e-12;
    double e_bus_broadcast = 5.0e-11;
    double e_sram_read = 1.0e-11;
    double e_sram_write = 1.0e-11;
    double e_cext = 3.0e-12;

    double p_static_mpe = 2.0e-5;    // watts
    double p_static_switch = 1.0e-5; // watts
    double cycle_time = 1.0e-9;      // seconds

    void validate() const;
};

struct EnergyReport {
    double neuron = 0.0;
    double crossbar = 0.0;
    double peripheral = 0.0;
    double total = 0.0;
    double per_classification = 0.0; // one run = one classification
};

struct LatencyReport {
    uint64_t cycles = 0;
    double seconds = 0.0;
    double classifications_per_sec = 0.0;
};

EnergyReport resparc_energy(const SimCounters& c, const MappingPlan& plan,
                            const EnergyConfig& cfg);

LatencyReport resparc_latency(const SimCounters& c, const MappingPlan& plan,
                              const EnergyConfig& cfg);

struct CmosConfig {
    double e_mac = 2.0e-12;
    double e_weight_fetch = 8.0e-12; // per byte
    double e_buffer = 1.0e-12;       // per synaptic op
    double leakage_power = 5.0e-4;   // watts
    double cycle_time = 1.0e-9;      // seconds
    double buffer_reuse_factor = 0.6; // fraction of fetches served on-chip
    double macs_per_cycle = 16.0;
    int bits = 4; // weight precision; scales fetch bytes linearly

    void validate() const;
};

// Event-driven activity statistics from a reference run: synops counts one
// MAC per outgoing synapse of every spiking neuron.
struct SpikeStats {
    uint64_t synops = 0;
    uint64_t spikes = 0;
};

SpikeStats spike_stats(const SnnTopology& topology, const SpikeTrain& input,
                       const std::vector<SpikeTrain>& layer_outputs);

struct CmosReport {
    double core = 0.0;
    double memory_access = 0.0;
    double memory_leakage = 0.0;
    double total = 0.0;
    uint64_t cycles = 0;
};

CmosReport cmos_baseline(const SpikeStats& stats, const CmosConfig& cfg);

} // namespace resparc
