#include "resparc/archsim.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <string>

#include "resparc/errors.hpp"
#include "resparc/kernels.hpp"

namespace resparc {

bool zero_check(const std::vector<uint64_t>& payload_words)
{
    return kernels::ops().all_zero_u64(payload_words.data(), payload_words.size());
}

namespace netsim {

std::vector<uint32_t> route_path(uint32_t grid_w, uint32_t src, uint32_t dst,
                                 RouteKind kind)
{
    switch (kind) {
    case RouteKind::Local:
        return {};
    case RouteKind::SharedSwitch:
        return {src};
    case RouteKind::SameRow:
    case RouteKind::SameCol:
        return {src, dst};
    case RouteKind::RowThenCol:
        // row link to the switch in the source row / destination column,
        // then a column link down to the destination switch
        return {src, (src / grid_w) * grid_w + dst % grid_w, dst};
    }
    return {src, dst};
}

SwitchFabric::SwitchFabric(uint32_t grid_w, uint32_t grid_h, uint32_t buffer_depth)
    : grid_w_(grid_w), grid_h_(grid_h), depth_(buffer_depth),
      buffers_(size_t(grid_w) * grid_h)
{
}

SwitchFabric::PhaseStats SwitchFabric::run_phase(const std::vector<FabricPacket>& packets,
                                                 uint32_t timestep, std::ostream* trace)
{
    PhaseStats stats;
    if (packets.empty())
        return stats;

    // Per-source injection queues, drained one packet per cycle.
    std::map<uint32_t, std::deque<FabricPacket>> pending;
    for (const auto& p : packets)
        pending[p.src].push_back(p);

    size_t in_flight = 0;
    size_t remaining = packets.size();
    uint64_t cycle = 0;

    struct Move {
        uint32_t from_sw;
        uint32_t from_src; // input buffer source id
        bool deliver;
        uint32_t to_sw; // valid when !deliver
    };

    while (remaining > 0) {
        ++cycle;
        if (cycle > 100000000ull)
            throw SimError("switch network made no progress at timestep " +
                           std::to_string(timestep));

        // Injection: one packet per mPE per cycle into its switch's buffer.
        for (auto& [src, q] : pending) {
            if (q.empty())
                continue;
            auto& buf = buffers_[q.front().path[0]][0];
            if (buf.size() >= depth_)
                continue; // source stalls until its switch accepts
            buf.push_back({q.front(), 0});
            ++stats.buffer_accesses;
            q.pop_front();
            ++in_flight;
        }

        // Collect grants from start-of-cycle buffer heads: per output port,
        // round-robin over contending input buffers.
        std::vector<Move> moves;
        for (uint32_t sw = 0; sw < buffers_.size(); ++sw) {
            auto& bufs = buffers_[sw];
            // port -> candidate input source ids (ascending)
            std::map<PortKey, std::vector<uint32_t>> want;
            for (auto& [src_id, q] : bufs) {
                if (q.empty())
                    continue;
                const InFlight& head = q.front();
                if (head.leg + 1 == head.pkt.path.size())
                    want[deliver_port(head.pkt.dst)].push_back(src_id);
                else
                    want[link_port(head.pkt.path[head.leg + 1])].push_back(src_id);
            }
            for (auto& [port, candidates] : want) {
                auto& cursor = rr_cursor_[{sw, port}];
                uint32_t pick = candidates.front();
                for (uint32_t c : candidates) {
                    if (c >= cursor) {
                        pick = c;
                        break;
                    }
                }
                cursor = pick + 1;
                const InFlight& head = bufs[pick].front();
                Move m;
                m.from_sw = sw;
                m.from_src = pick;
                m.deliver = head.leg + 1 == head.pkt.path.size();
                m.to_sw = m.deliver ? 0 : head.pkt.path[head.leg + 1];
                moves.push_back(m);
            }
        }

        // Apply moves simultaneously.
        for (const auto& m : moves) {
            auto& q = buffers_[m.from_sw][m.from_src];
            InFlight fl = q.front();
            q.pop_front();
            ++stats.buffer_accesses; // dequeue
            ++stats.hops;            // switch traversal
            if (trace) {
                *trace << "t=" << timestep << " cycle=" << cycle << " switch=("
                       << m.from_sw % grid_w_ << "," << m.from_sw / grid_w_
                       << ") in=" << (m.from_src == 0 ? "mpe" : "link") << " out=";
                if (m.deliver)
                    *trace << "mpe(" << fl.pkt.dst % grid_w_ << ","
                           << fl.pkt.dst / grid_w_ << ")";
                else
                    *trace << "link(" << m.to_sw % grid_w_ << "," << m.to_sw / grid_w_
                           << ")";
                *trace << " pkt=" << fl.pkt.id << "\n";
            }
            if (m.deliver) {
                stats.delivery_order.push_back(fl.pkt.id);
                --in_flight;
                --remaining;
            } else {
                auto& dstq = buffers_[m.to_sw][1 + m.from_sw];
                fl.leg += 1;
                dstq.push_back(fl);
                ++stats.buffer_accesses;
                if (dstq.size() > depth_)
                    throw SimError(
                        "switch buffer overflow: switch (" +
                        std::to_string(m.to_sw % grid_w_) + "," +
                        std::to_string(m.to_sw / grid_w_) + ") link port from switch (" +
                        std::to_string(m.from_sw % grid_w_) + "," +
                        std::to_string(m.from_sw / grid_w_) + ") at timestep " +
                        std::to_string(timestep) + " (depth " + std::to_string(depth_) +
                        ")");
            }
        }
    }
    stats.cycles = cycle;
    return stats;
}

} // namespace netsim

namespace {

struct PacketWindows {
    // For one layer's output space: windows of packet_width neurons.
    uint32_t window_count = 0;
    // per producer mPE: windows it has neurons in, with the neuron lists
    std::map<uint32_t, std::map<uint32_t, std::vector<uint32_t>>> producer_windows;
};

std::vector<uint64_t> payload_words(const uint8_t* spikes,
                                    const std::vector<uint32_t>& neurons,
                                    uint32_t window_base, uint32_t packet_width)
{
    std::vector<uint64_t> words((packet_width + 63) / 64, 0);
    for (uint32_t n : neurons)
        if (spikes[n])
            words[(n - window_base) / 64] |= 1ull << ((n - window_base) % 64);
    return words;
}

} // namespace

SimResult simulate(const MappingPlan& plan, const SpikeTrain& input, const SimOptions& opts)
{
    const auto& k = kernels::ops();
    const size_t L = plan.layers.size();
    if (L == 0)
        throw InputError("simulate: empty plan");
    if (input.width != plan.layers[0].fan_in)
        throw InputError("simulate: input width " + std::to_string(input.width) +
                         " != first-layer fan-in " + std::to_string(plan.layers[0].fan_in));
    const uint32_t PW = plan.arch.packet_width;

    // --- static lookups -----------------------------------------------------
    std::vector<std::vector<uint32_t>> layer_tiles(L);
    for (uint32_t t = 0; t < plan.tiles.size(); ++t)
        layer_tiles[plan.tiles[t].layer].push_back(t);

    // resident tile count per (layer, mpe) for the compute-cycle model
    std::vector<uint32_t> layer_compute_cycles(L, 0);
    for (size_t l = 0; l < L; ++l) {
        std::map<uint32_t, uint32_t> per_mpe;
        for (uint32_t t : layer_tiles[l])
            per_mpe[plan.tile_mpe[t]] += 1;
        for (auto& [m, n] : per_mpe)
            layer_compute_cycles[l] = std::max(layer_compute_cycles[l], n);
    }

    std::vector<uint32_t> layer_cext_edges(L, 0), layer_cext_cycles(L, 0);
    for (const auto& chain : plan.chains) {
        layer_cext_edges[chain.layer] += static_cast<uint32_t>(chain.mpes.size() - 1);
        layer_cext_cycles[chain.layer] =
            std::max(layer_cext_cycles[chain.layer],
                     static_cast<uint32_t>(chain.mpes.size() - 1));
    }

    std::vector<uint64_t> layer_integrations(L, 0);
    for (size_t l = 0; l < L; ++l)
        for (const auto& s : plan.schedules[l])
            layer_integrations[l] += s.size();

    // consumers per (layer, input window): mPEs holding tiles with rows there
    std::vector<std::vector<std::vector<uint32_t>>> consumers(L);
    for (size_t l = 0; l < L; ++l) {
        const uint32_t windows = (plan.layers[l].fan_in + PW - 1) / PW;
        std::vector<std::set<uint32_t>> sets(windows);
        for (uint32_t t : layer_tiles[l])
            for (uint32_t row : plan.tiles[t].row_map)
                sets[row / PW].insert(plan.tile_mpe[t]);
        consumers[l].resize(windows);
        for (uint32_t w = 0; w < windows; ++w)
            consumers[l][w].assign(sets[w].begin(), sets[w].end());
    }

    // producer windows per layer (homes of that layer's outputs)
    std::vector<PacketWindows> prod(L);
    for (size_t l = 0; l < L; ++l) {
        prod[l].window_count = (plan.layers[l].fan_out + PW - 1) / PW;
        for (uint32_t j = 0; j < plan.layers[l].fan_out; ++j)
            prod[l].producer_windows[plan.neuron_home[l][j]][j / PW].push_back(j);
    }

    // one switch fabric per NeuroCell, state persistent across timesteps
    const uint32_t ncs = plan.ncs_used();
    std::vector<netsim::SwitchFabric> fabrics;
    fabrics.reserve(ncs);
    for (uint32_t n = 0; n < ncs; ++n)
        fabrics.emplace_back(plan.arch.nc_grid_w, plan.arch.nc_grid_h,
                             plan.arch.buffer_depth);
    auto local_mpe = [&](uint32_t mpe) {
        const MpePlace& p = plan.mpes[mpe];
        return p.y * plan.arch.nc_grid_w + p.x;
    };

    // --- simulation state ---------------------------------------------------
    SimResult result;
    result.layer_outputs.reserve(L);
    for (size_t l = 0; l < L; ++l)
        result.layer_outputs.emplace_back(input.timesteps, plan.layers[l].fan_out);
    SimCounters& ctr = result.counters;

    std::vector<std::vector<double>> potential(L);
    for (size_t l = 0; l < L; ++l)
        potential[l].assign(plan.layers[l].fan_out, 0.0);

    std::vector<std::vector<int32_t>> tile_acc(plan.tiles.size());
    std::vector<int64_t> neuron_sum;
    std::vector<double> currents;
    uint32_t next_packet_id = 0;

    for (uint32_t t = 0; t < input.timesteps; ++t) {
        // (1) SRAM input broadcast to first-layer NCs, tag-filtered, with
        // zero-check when event-driven.
        {
            const uint8_t* bits = input.row(t);
            const uint32_t windows = (plan.layers[0].fan_in + PW - 1) / PW;
            for (uint32_t w = 0; w < windows; ++w) {
                ++ctr.sram_reads;
                const uint32_t base = w * PW;
                const uint32_t end = std::min(base + PW, plan.layers[0].fan_in);
                std::vector<uint64_t> words((PW + 63) / 64, 0);
                for (uint32_t i = base; i < end; ++i)
                    if (bits[i])
                        words[(i - base) / 64] |= 1ull << ((i - base) % 64);
                const bool zero = zero_check(words);
                if (opts.event_driven && zero) {
                    ++ctr.bus_suppressed;
                } else {
                    ++ctr.bus_broadcasts;
                    ++ctr.cycles_input;
                    ctr.buffer_accesses += consumers[0][w].size(); // iBUFF writes
                }
                if (opts.trace)
                    *opts.trace << "t=" << t << " bus in window=" << w
                                << " suppressed=" << (opts.event_driven && zero) << "\n";
            }
        }

        const uint8_t* prev = input.row(t);
        for (size_t l = 0; l < L; ++l) {
            const LayerInfo& li = plan.layers[l];

            // (2) crossbar reads + time-multiplexed integration. Level sums
            // are integers: partial-sum order cannot change the result.
            ctr.crossbar_reads += layer_tiles[l].size();
            for (uint32_t tid : layer_tiles[l]) {
                const CrossbarTile& tile = plan.tiles[tid];
                auto& acc = tile_acc[tid];
                acc.assign(tile.col_map.size(), 0);
                for (size_t r = 0; r < tile.row_map.size(); ++r)
                    if (prev[tile.row_map[r]])
                        k.add_row_i32(acc.data(), tile.level_row(r),
                                      tile.col_map.size());
            }
            ctr.neuron_integrations += layer_integrations[l];
            ctr.cext_transfers += layer_cext_edges[l];

            neuron_sum.assign(li.fan_out, 0);
            for (uint32_t j = 0; j < li.fan_out; ++j)
                for (const ScheduleEntry& e : plan.schedules[l][j])
                    neuron_sum[j] += tile_acc[e.tile][e.local_col];

            currents.assign(li.fan_out, 0.0);
            for (uint32_t j = 0; j < li.fan_out; ++j)
                currents[j] = double(neuron_sum[j]) * li.unit;

            uint8_t* out = result.layer_outputs[l].row(t);
            k.if_update(potential[l].data(), currents.data(), li.threshold, out,
                        li.fan_out);
            for (uint32_t j = 0; j < li.fan_out; ++j)
                ctr.spikes_emitted += out[j];

            ctr.cycles_compute += layer_compute_cycles[l];
            ctr.cycles_cext += layer_cext_cycles[l];

            // (3)+(4) route output spikes to the next layer: switch packets
            // within a NC, SRAM/IO-bus segments across NCs.
            if (l + 1 < L) {
                std::vector<std::vector<netsim::FabricPacket>> nc_packets(ncs);
                // per-source spike packets staged in SRAM for the bus segment;
                // the zero-check at the SRAM read sees each packet separately
                struct BusPacket {
                    bool zero;
                    uint32_t window;
                    size_t consumers;
                };
                std::vector<BusPacket> bus_packets;

                for (const auto& [p, windows] : prod[l].producer_windows) {
                    for (const auto& [w, neurons] : windows) {
                        auto words = payload_words(out, neurons, w * PW, PW);
                        const bool zero = zero_check(words);
                        std::set<uint32_t> cross_nc;
                        for (uint32_t d : consumers[l + 1][w]) {
                            if (d == p)
                                continue; // stays inside the mPE
                            if (plan.mpes[d].nc != plan.mpes[p].nc) {
                                cross_nc.insert(d);
                                continue;
                            }
                            ++ctr.packets_generated;
                            auto it = plan.routes.find(MappingPlan::route_key(p, d));
                            if (it == plan.routes.end())
                                throw SimError("routing table miss for mPE " +
                                               std::to_string(p) + " -> " +
                                               std::to_string(d) + " at timestep " +
                                               std::to_string(t));
                            if (opts.event_driven && zero) {
                                ++ctr.packets_suppressed;
                            } else {
                                ++ctr.packets_sent;
                                ++ctr.buffer_accesses; // oBUFF at the source
                                netsim::FabricPacket fp;
                                fp.id = next_packet_id++;
                                fp.src = local_mpe(p);
                                fp.dst = local_mpe(d);
                                fp.path = netsim::route_path(plan.arch.nc_grid_w,
                                                             fp.src, fp.dst,
                                                             it->second.kind);
                                nc_packets[plan.mpes[p].nc].push_back(fp);
                            }
                            if (opts.trace)
                                *opts.trace
                                    << "t=" << t << " pkt layer=" << l << " window=" << w
                                    << " src=" << p << " dst=" << d << " kind="
                                    << route_kind_name(it->second.kind)
                                    << " suppressed=" << (opts.event_driven && zero)
                                    << "\n";
                        }
                        if (!cross_nc.empty()) {
                            ++ctr.sram_writes;
                            bus_packets.push_back({zero, w, cross_nc.size()});
                        }
                    }
                }

                // switch phases run in parallel across NCs
                uint64_t phase_cycles = 0;
                for (uint32_t n = 0; n < ncs; ++n) {
                    if (nc_packets[n].empty())
                        continue;
                    auto stats = fabrics[n].run_phase(nc_packets[n], t, opts.trace);
                    ctr.hop_count += stats.hops;
                    ctr.buffer_accesses += stats.buffer_accesses;
                    ctr.buffer_accesses += nc_packets[n].size(); // iBUFF at dests
                    phase_cycles = std::max(phase_cycles, stats.cycles);
                }
                ctr.cycles_switch += phase_cycles;

                // serial bus broadcasts, one per staged packet
                for (const auto& bp : bus_packets) {
                    ++ctr.sram_reads;
                    if (opts.event_driven && bp.zero) {
                        ++ctr.bus_suppressed;
                    } else {
                        ++ctr.bus_broadcasts;
                        ++ctr.cycles_bus;
                        ctr.buffer_accesses += bp.consumers;
                    }
                    if (opts.trace)
                        *opts.trace << "t=" << t << " bus layer=" << l
                                    << " window=" << bp.window
                                    << " suppressed=" << (opts.event_driven && bp.zero)
                                    << "\n";
                }
            }

            prev = out;
        }
    }

    // bus write cycles: one per sram_write (serial shared bus)
    ctr.cycles_bus += ctr.sram_writes;

    ctr.cycles_elapsed = ctr.cycles_input + ctr.cycles_compute + ctr.cycles_cext +
                         ctr.cycles_switch + ctr.cycles_bus;
    return result;
}

} // namespace resparc
