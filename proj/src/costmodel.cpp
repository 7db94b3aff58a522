#include "resparc/costmodel.hpp"

#include <cmath>

#include "resparc/errors.hpp"

namespace resparc {

void EnergyConfig::validate() const
{
    const double vals[] = {xbar_base,    xbar_per_cell, xbar_per_col,
                           e_neuron_integrate, e_spike,  e_switch_hop,
                           e_buffer_access,    e_bus_broadcast, e_sram_read,
                           e_sram_write, e_cext,        p_static_mpe,
                           p_static_switch};
    for (double v : vals)
        if (!(v >= 0.0))
            throw InputError("energy: per-event constants must be nonnegative");
    if (!(cycle_time > 0.0))
        throw InputError("energy: cycle_time must be positive");
}

void CmosConfig::validate() const
{
    if (!(e_mac >= 0.0) || !(e_weight_fetch >= 0.0) || !(e_buffer >= 0.0) ||
        !(leakage_power >= 0.0))
        throw InputError("cmos: energies must be nonnegative");
    if (!(cycle_time > 0.0) || !(macs_per_cycle > 0.0))
        throw InputError("cmos: cycle_time and macs_per_cycle must be positive");
    if (!(buffer_reuse_factor >= 0.0) || buffer_reuse_factor >= 1.0)
        throw InputError("cmos: buffer_reuse_factor must be in [0, 1)");
    if (bits < 1 || bits > 8)
        throw InputError("cmos: bits must be in [1, 8]");
}

EnergyReport resparc_energy(const SimCounters& c, const MappingPlan& plan,
                            const EnergyConfig& cfg)
{
    cfg.validate();
    EnergyReport rep;
    rep.neuron = cfg.e_neuron_integrate * double(c.neuron_integrations) +
                 cfg.e_spike * double(c.spikes_emitted);

    const double cells = double(plan.arch.mca_rows) * double(plan.arch.mca_cols);
    const double per_read =
        cfg.xbar_base + cfg.xbar_per_cell * cells + cfg.xbar_per_col * plan.arch.mca_cols;
    rep.crossbar = per_read * double(c.crossbar_reads);

    const double static_power = cfg.p_static_mpe * double(plan.mpes_used()) +
                                cfg.p_static_switch * double(plan.switches_used());
    rep.peripheral = cfg.e_switch_hop * double(c.hop_count) +
                     cfg.e_buffer_access * double(c.buffer_accesses) +
                     cfg.e_bus_broadcast * double(c.bus_broadcasts) +
                     cfg.e_sram_read * double(c.sram_reads) +
                     cfg.e_sram_write * double(c.sram_writes) +
                     cfg.e_cext * double(c.cext_transfers) +
                     static_power * double(c.cycles_elapsed) * cfg.cycle_time;

    rep.total = rep.neuron + rep.crossbar + rep.peripheral;
    rep.per_classification = rep.total;
    return rep;
}

LatencyReport resparc_latency(const SimCounters& c, const MappingPlan&,
                              const EnergyConfig& cfg)
{
    cfg.validate();
    LatencyReport rep;
    rep.cycles = c.cycles_elapsed;
    rep.seconds = double(c.cycles_elapsed) * cfg.cycle_time;
    rep.classifications_per_sec = rep.seconds > 0.0 ? 1.0 / rep.seconds : 0.0;
    return rep;
}

SpikeStats spike_stats(const SnnTopology& topology, const SpikeTrain& input,
                       const std::vector<SpikeTrain>& layer_outputs)
{
    SpikeStats stats;
    for (size_t l = 0; l < topology.layers.size(); ++l) {
        // fan-out per input neuron of this layer
        ConnectivityMatrix conn =
            build_connectivity(topology.layers[l], topology.weights[l]);
        std::vector<uint32_t> fanout(conn.rows, 0);
        for (const auto& col : conn.columns)
            for (const auto& e : col)
                fanout[e.row] += 1;
        const SpikeTrain& in = l == 0 ? input : layer_outputs[l - 1];
        for (uint32_t t = 0; t < in.timesteps; ++t) {
            const uint8_t* bits = in.row(t);
            for (uint32_t i = 0; i < in.width; ++i)
                if (bits[i])
                    stats.synops += fanout[i];
        }
    }
    for (const auto& train : layer_outputs)
        stats.spikes += train.spike_count();
    return stats;
}

CmosReport cmos_baseline(const SpikeStats& stats, const CmosConfig& cfg)
{
    cfg.validate();
    CmosReport rep;
    const double synops = double(stats.synops);
    rep.core = (cfg.e_mac + cfg.e_buffer) * synops;
    const double bytes_per_fetch = double(cfg.bits) / 8.0;
    rep.memory_access =
        cfg.e_weight_fetch * synops * (1.0 - cfg.buffer_reuse_factor) * bytes_per_fetch;
    rep.cycles = static_cast<uint64_t>(std::ceil(synops / cfg.macs_per_cycle));
    rep.memory_leakage = cfg.leakage_power * double(rep.cycles) * cfg.cycle_time;
    rep.total = rep.core + rep.memory_access + rep.memory_leakage;
    return rep;
}

} // namespace resparc
