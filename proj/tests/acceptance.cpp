// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "resparc/archsim.hpp"
#include "resparc/bench.hpp"
#include "resparc/config.hpp"
#include "resparc/costmodel.hpp"
#include "resparc/errors.hpp"
#include "resparc/io.hpp"
#include "resparc/mapper.hpp"
#include "resparc/prng.hpp"
#include "resparc/snn.hpp"

using namespace resparc;
namespace fs = std::filesystem;

namespace {

const std::string kSrcDir = RESPARC_SRC_DIR;
const std::string kBin = std::string(RESPARC_BIN_DIR) + "/resparc";

struct Check {
    std::string name;
    double budget_seconds;
    std::function<std::string()> run; // empty string = pass
};

// ---------------------------------------------------------------------------

SnnTopology random_dense_net(uint64_t seed, uint32_t max_layers)
{
    SnnTopology topo;
    uint32_t layers = 1 + counter_hash(seed, 1) % max_layers;
    uint32_t width = 4 + counter_hash(seed, 2) % 36;
    for (uint32_t l = 0; l < layers; ++l) {
        uint32_t next = 2 + counter_hash(seed, 3 + l) % 20;
        LayerSpec spec;
        spec.kind = LayerKind::Dense;
        spec.n_in = width;
        spec.n_out = next;
        spec.threshold = 0.5 + unit_draw(seed, 40 + l);
        topo.layers.push_back(spec);
        topo.weights.push_back(random_weights(width, next, counter_hash(seed, 50 + l),
                                              false, 1.0));
        width = next;
    }
    return topo;
}

SnnTopology random_conv_net(uint64_t seed)
{
    SnnTopology topo;
    uint32_t dim = 6 + 2 * (counter_hash(seed, 1) % 3); // 6, 8, 10
    uint32_t channels = 1 + counter_hash(seed, 2) % 2;
    uint32_t k = 3;
    LayerSpec conv;
    conv.kind = LayerKind::Conv;
    conv.in_width = dim;
    conv.in_height = dim;
    conv.in_channels = 1;
    conv.kernel = k;
    conv.out_channels = channels + 1;
    conv.stride = 1;
    conv.threshold = 0.4 + 0.4 * unit_draw(seed, 3);
    topo.layers.push_back(conv);
    topo.weights.push_back(
        random_weights(k * k, conv.out_channels, counter_hash(seed, 4), false, 1.0));

    if (counter_hash(seed, 5) % 2 == 0 && conv.out_width() % 2 == 0) {
        LayerSpec sub;
        sub.kind = LayerKind::Subsample;
        sub.in_width = conv.out_width();
        sub.in_height = conv.out_height();
        sub.in_channels = conv.out_channels;
        sub.window = 2;
        sub.stride = 2;
        sub.threshold = 0.5;
        topo.layers.push_back(sub);
        topo.weights.push_back(WeightMatrix{});
    }

    LayerSpec head;
    head.kind = LayerKind::Dense;
    head.n_in = topo.layers.back().fan_out();
    head.n_out = 2 + counter_hash(seed, 6) % 8;
    head.threshold = 0.8;
    topo.layers.push_back(head);
    topo.weights.push_back(
        random_weights(head.n_in, head.n_out, counter_hash(seed, 7), false, 1.0));
    return topo;
}

void make_nonnegative(SnnTopology& topo)
{
    for (auto& w : topo.weights)
        for (auto& v : w.values)
            v = std::abs(v);
}

std::string check_equal_trains(const std::vector<SpikeTrain>& a,
                               const std::vector<SpikeTrain>& b)
{
    if (a.size() != b.size())
        return "layer count mismatch";
    for (size_t l = 0; l < a.size(); ++l)
        if (!(a[l] == b[l]))
            return "spike mismatch at layer " + std::to_string(l);
    return "";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FullConfig default_config()
{
    return load_config(kSrcDir + "/configs/default.cfg");
}

SnnTopology desk_mlp()
{
    return load_topology(kSrcDir + "/models/desk_mlp.json");
}

SnnTopology desk_cnn()
{
    return load_topology(kSrcDir + "/models/desk_cnn.json");
}

struct TrendRow {
    double total = 0.0;
    double mean_fill = 0.0;
    SimCounters counters;
};

TrendRow run_point(const SnnTopology& topo, FullConfig cfg, uint32_t size,
                   bool event_driven, double rate, uint32_t timesteps, uint64_t seed,
                   bool couple_packet_width)
{
    cfg.arch.mca_rows = size;
    cfg.arch.mca_cols = size;
    if (couple_packet_width)
        cfg.arch.packet_width = size;
    MappingPlan plan = compile_topology(topo, cfg.arch, cfg.quant);
    SpikeTrain input = random_input(topo.layers.front().fan_in(), timesteps, rate, seed);
    SimOptions opts;
    opts.event_driven = event_driven;
    SimResult res = simulate(plan, input, opts);
    auto ref = reference_forward(topo, input, &cfg.quant);
    if (auto err = check_equal_trains(ref, res.layer_outputs); !err.empty())
        throw SimError("trend point lost oracle equivalence: " + err);
    TrendRow row;
    row.total = resparc_energy(res.counters, plan, cfg.energy).total;
    row.mean_fill = utilization(plan).mean_fill;
    row.counters = res.counters;
    return row;
}

// --- criterion bodies -------------------------------------------------------

std::string criterion_oracle_and_tiling(bool check_tiling)
{
    uint32_t combos = 0;
    uint32_t max_degree_seen = 0;
    bool saw_diff = false, saw_unsigned = false, saw_conv = false, saw_bus = false,
         saw_cext = false;

    auto run_one = [&](const SnnTopology& topo, const ArchConfig& arch,
                       const QuantConfig& quant, uint32_t timesteps, double rate,
                       uint64_t seed) -> std::string {
        MappingPlan plan = compile_topology(topo, arch, quant);
        for (const auto& sched : plan.schedules)
            for (const auto& per_neuron : sched)
                max_degree_seen =
                    std::max(max_degree_seen, uint32_t(per_neuron.size()));
        saw_cext = saw_cext || !plan.cext_links.empty();
        for (uint8_t seg : plan.layer_bus_segment)
            saw_bus = saw_bus || seg;

        if (check_tiling) {
            auto rebuilt = reconstruct_levels(plan);
            for (size_t l = 0; l < topo.layers.size(); ++l) {
                ConnectivityMatrix conn =
                    build_connectivity(topo.layers[l], topo.weights[l]);
                LevelMatrix want = quantize_connectivity(conn, quant);
                if (rebuilt[l].levels != want.levels)
                    return "tile reconstruction mismatch at layer " + std::to_string(l);
            }
        }

        SpikeTrain input =
            random_input(topo.layers.front().fan_in(), timesteps, rate, seed);
        auto ref = reference_forward(topo, input, &quant);
        for (bool ed : {true, false}) {
            SimOptions opts;
            opts.event_driven = ed;
            SimResult res = simulate(plan, input, opts);
            if (auto err = check_equal_trains(ref, res.layer_outputs); !err.empty())
                return err + (ed ? " (event-driven)" : " (always-on)");
            if (res.counters.packets_sent + res.counters.packets_suppressed !=
                res.counters.packets_generated)
                return "packet conservation violated";
        }
        ++combos;
        return "";
    };

    for (uint64_t i = 0; i < 90 && combos < 55; ++i) {
        ArchConfig arch;
        const uint32_t sizes[] = {4, 8, 16, 32};
        arch.mca_rows = sizes[counter_hash(i, 10) % 4];
        arch.mca_cols = arch.mca_rows;
        arch.mcas_per_mpe = 4;
        arch.nc_grid_w = 2 + counter_hash(i, 11) % 3;
        arch.nc_grid_h = 2 + counter_hash(i, 12) % 3;
        arch.num_neurocells = counter_hash(i, 13) % 4 == 0 ? 4 : 16;
        arch.packet_width = counter_hash(i, 14) % 2 ? 8 : 32;

        QuantConfig quant;
        quant.bits = 1 + counter_hash(i, 15) % 8;
        bool differential = i % 2 == 0;
        quant.mode = differential ? SignedMode::Differential : SignedMode::Unsigned;

        SnnTopology topo;
        bool is_conv = i % 3 == 2;
        if (is_conv)
            topo = random_conv_net(counter_hash(i, 16));
        else
            topo = random_dense_net(counter_hash(i, 17), 3);
        if (quant.mode == SignedMode::Unsigned)
            make_nonnegative(topo);

        uint32_t timesteps = 5 + counter_hash(i, 18) % 12;
        double rate = 0.1 + 0.8 * unit_draw(i, 19);
        std::string err;
        try {
            err = run_one(topo, arch, quant, timesteps, rate, i);
        } catch (const CapacityError&) {
            continue; // this (topology, core) pairing does not fit; roll on
        }
        if (!err.empty())
            return "combo " + std::to_string(i) + ": " + err;
        if (differential)
            saw_diff = true;
        else
            saw_unsigned = true;
        if (is_conv)
            saw_conv = true;
    }

    // pinned high-degree combos: degree 8 time-mux and a C_ext spill chain
    {
        SnnTopology topo;
        LayerSpec l;
        l.kind = LayerKind::Dense;
        l.n_in = 32;
        l.n_out = 6;
        l.threshold = 1.0;
        topo.layers = {l};
        topo.weights = {random_weights(32, 6, 999, false, 1.0)};
        ArchConfig arch;
        arch.mca_rows = 4;
        arch.mca_cols = 16;
        QuantConfig quant;
        if (auto err = run_one(topo, arch, quant, 10, 0.5, 1001); !err.empty())
            return "degree-8 combo: " + err;
    }

    if (combos < 50)
        return "only " + std::to_string(combos) + " combos ran";
    if (max_degree_seen < 8)
        return "max time-mux degree seen was " + std::to_string(max_degree_seen);
    if (!saw_diff || !saw_unsigned || !saw_conv || !saw_bus || !saw_cext)
        return "combo set missed a required regime";
    return "";
}

std::string criterion_fig5_tiling()
{
    SnnTopology topo;
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.n_in = 4;
    l.n_out = 4;
    topo.layers = {l};
    topo.weights = {random_weights(4, 4, 5, true, 1.0)};
    ArchConfig arch;
    arch.mca_rows = 2;
    arch.mca_cols = 2;
    QuantConfig quant;
    quant.mode = SignedMode::Unsigned;
    MappingPlan plan = compile_topology(topo, arch, quant);
    if (plan.tiles.size() != 4)
        return "expected 4 tiles, got " + std::to_string(plan.tiles.size());
    for (const auto& sched : plan.schedules[0])
        if (sched.size() != 2)
            return "expected degree-2 schedules";
    return "";
}

std::string criterion_quant_endpoints()
{
    QuantConfig q; // bits=4, 20k-200k
    const double lo = level_to_conductance(0, q);
    const double hi = level_to_conductance(15, q);
    if (std::abs(lo - 5.0e-6) > 1e-12 * 5.0e-6)
        return "level 0 conductance " + std::to_string(lo);
    if (std::abs(hi - 5.0e-5) > 1e-12 * 5.0e-5)
        return "level 15 conductance " + std::to_string(hi);
    const double w_max = 1.8;
    const double bound = w_max / (2.0 * 15.0);
    for (uint64_t i = 0; i < 100000; ++i) {
        double w = symmetric_draw(4242, i) * w_max;
        double eff = effective_weight(quantize_weight(w, w_max, q), w_max, q);
        if (std::abs(eff - w) > bound + 1e-15)
            return "error bound violated at w=" + std::to_string(w);
    }
    return "";
}

std::string criterion_mlp_trend()
{
    FullConfig cfg = default_config();
    SnnTopology topo = desk_mlp();
    double prev = 1e300;
    for (uint32_t size : {32u, 64u, 128u}) {
        TrendRow row = run_point(topo, cfg, size, true, 0.2, 20, 1, false);
        if (!(row.total < prev))
            return "total not strictly decreasing at size " + std::to_string(size);
        prev = row.total;
    }
    return "";
}

std::string criterion_cnn_trend()
{
    FullConfig cfg = default_config();
    SnnTopology topo = desk_cnn();
    TrendRow r32 = run_point(topo, cfg, 32, true, 0.2, 20, 1, false);
    TrendRow r64 = run_point(topo, cfg, 64, true, 0.2, 20, 1, false);
    TrendRow r128 = run_point(topo, cfg, 128, true, 0.2, 20, 1, false);
    if (!(r64.total < r32.total && r64.total < r128.total))
        return "minimum energy not at size 64";
    if (!(r128.mean_fill < r64.mean_fill))
        return "mean fill did not drop from 64 to 128";
    return "";
}

std::string criterion_event_ablation()
{
    FullConfig cfg = default_config();
    SnnTopology mlp = desk_mlp();
    SnnTopology cnn = desk_cnn();
    const uint32_t sizes[] = {32, 64, 128};

    double mlp_savings[3], cnn_savings[3];
    for (int i = 0; i < 3; ++i) {
        for (int which = 0; which < 2; ++which) {
            const SnnTopology& topo = which ? cnn : mlp;
            TrendRow on = run_point(topo, cfg, sizes[i], true, 0.05, 20, 1, true);
            TrendRow off = run_point(topo, cfg, sizes[i], false, 0.05, 20, 1, true);
            double savings = (off.total - on.total) / off.total;
            (which ? cnn_savings : mlp_savings)[i] = savings;
        }
    }
    for (int i = 0; i < 3; ++i)
        if (!(mlp_savings[i] > 0.0))
            return "MLP savings not positive at size " + std::to_string(sizes[i]);
    if (!(mlp_savings[0] > mlp_savings[1] && mlp_savings[0] > mlp_savings[2]))
        return "MLP savings not largest at the smallest size";
    for (int i = 0; i < 3; ++i)
        if (!(mlp_savings[i] >= cnn_savings[i]))
            return "CNN saved more than the MLP at size " + std::to_string(sizes[i]);

    // dense input: zero suppression, exactly zero savings
    for (uint32_t size : sizes) {
        TrendRow on = run_point(mlp, cfg, size, true, 1.0, 20, 1, true);
        TrendRow off = run_point(mlp, cfg, size, false, 1.0, 20, 1, true);
        if (on.counters.packets_suppressed != 0 || on.counters.bus_suppressed != 0)
            return "suppression at rate 1.0 at size " + std::to_string(size);
        if (on.total != off.total)
            return "savings not exactly zero at rate 1.0";
    }
    return "";
}

std::string criterion_bit_sweep()
{
    FullConfig cfg = default_config();

    // fixed spikes: weights in {0, +-w_max} quantize identically at every
    // precision, so counters and energy must match bit for bit
    SnnTopology fixed;
    {
        LayerSpec l1;
        l1.kind = LayerKind::Dense;
        l1.n_in = 20;
        l1.n_out = 12;
        l1.threshold = 1.0;
        LayerSpec l2;
        l2.kind = LayerKind::Dense;
        l2.n_in = 12;
        l2.n_out = 6;
        l2.threshold = 1.0;
        fixed.layers = {l1, l2};
        for (int l = 0; l < 2; ++l) {
            WeightMatrix w;
            w.rows = l == 0 ? 20 : 12;
            w.cols = l == 0 ? 12 : 6;
            w.values.resize(size_t(w.rows) * w.cols);
            for (size_t i = 0; i < w.values.size(); ++i)
                w.values[i] = double(int(counter_hash(888 + l, i) % 3) - 1);
            fixed.weights.push_back(std::move(w));
        }
    }
    SpikeTrain input = random_input(20, 25, 0.4, 77);
    double first_energy = 0.0;
    SimCounters first_counters;
    double prev_mem = -1.0;
    for (int bits = 1; bits <= 8; ++bits) {
        FullConfig c = cfg;
        c.quant.bits = bits;
        c.cmos.bits = bits;
        MappingPlan plan = compile_topology(fixed, c.arch, c.quant);
        SimResult res = simulate(plan, input, SimOptions{});
        auto ref = reference_forward(fixed, input, &c.quant);
        if (auto err = check_equal_trains(ref, res.layer_outputs); !err.empty())
            return "fixed-spike net: " + err;
        double e = resparc_energy(res.counters, plan, c.energy).total;
        if (bits == 1) {
            first_energy = e;
            first_counters = res.counters;
        } else {
            if (!(res.counters == first_counters))
                return "counters changed with bits=" + std::to_string(bits);
            if (e != first_energy)
                return "energy changed with bits=" + std::to_string(bits);
        }
        CmosReport cm = cmos_baseline(spike_stats(fixed, input, ref), c.cmos);
        if (!(cm.memory_access > prev_mem))
            return "cmos memory_access not strictly increasing at bits=" +
                   std::to_string(bits);
        prev_mem = cm.memory_access;
    }

    // fidelity comparability on the desk MLP over 200 inputs
    SnnTopology mlp = desk_mlp();
    const uint32_t n_inputs = 200, timesteps = 50;
    std::vector<SpikeTrain> inputs;
    std::vector<uint32_t> full_class;
    for (uint32_t i = 0; i < n_inputs; ++i) {
        inputs.push_back(random_input(784, timesteps, 0.2, counter_hash(1, 100 + i)));
        full_class.push_back(classify(reference_forward(mlp, inputs.back(), nullptr).back()));
    }
    double fid[2];
    int slot = 0;
    for (int bits : {4, 8}) {
        QuantConfig q = cfg.quant;
        q.bits = bits;
        uint32_t agree = 0;
        for (uint32_t i = 0; i < n_inputs; ++i)
            if (classify(reference_forward(mlp, inputs[i], &q).back()) == full_class[i])
                ++agree;
        fid[slot++] = double(agree) / n_inputs;
    }
    if (std::abs(fid[0] - fid[1]) > 0.05)
        return "fidelity(4)=" + std::to_string(fid[0]) + " vs fidelity(8)=" +
               std::to_string(fid[1]);
    return "";
}

std::string criterion_determinism()
{
    const fs::path base = fs::temp_directory_path() / "resparc_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string topo = kSrcDir + "/models/desk_mlp.json";
    const std::string config = kSrcDir + "/configs/default.cfg";
    for (int run = 0; run < 2; ++run) {
        const std::string out = (base / ("run" + std::to_string(run))).string();
        const std::string cmd = kBin + " cost --topology " + topo + " --config " + config +
                                " --timesteps 10 --seed 5 --out " + out +
                                " > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0)
            return "cost pipeline failed";
    }
    for (const char* f : {"plan.json", "sim_counters.csv", "energy.csv", "comparison.csv"})
        if (slurp(base / "run0" / f) != slurp(base / "run1" / f))
            return std::string("artifact differs between runs: ") + f;

    // packet conservation on a desk-scale run
    FullConfig cfg = default_config();
    TrendRow row = run_point(desk_mlp(), cfg, 32, true, 0.3, 10, 9, false);
    if (row.counters.packets_generated !=
        row.counters.packets_sent + row.counters.packets_suppressed)
        return "packet conservation violated";
    return "";
}

std::string criterion_latency()
{
    QuantConfig quant;
    quant.mode = SignedMode::Unsigned;
    SnnTopology topo;
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.n_in = 8;
    l.n_out = 8;
    l.threshold = 1.0;
    topo.layers = {l};
    topo.weights = {random_weights(8, 8, 3, true, 1.0)};
    SpikeTrain input = random_input(8, 10, 0.5, 7);

    ArchConfig a1;
    a1.mca_rows = 8;
    a1.mca_cols = 8;
    ArchConfig a2 = a1;
    a2.mca_rows = 4; // degree 2
    SimResult r1 = simulate(compile_topology(topo, a1, quant), input, SimOptions{});
    SimResult r2 = simulate(compile_topology(topo, a2, quant), input, SimOptions{});
    if (r2.counters.cycles_compute != 2 * r1.counters.cycles_compute)
        return "degree-2 compute cycles are " + std::to_string(r2.counters.cycles_compute) +
               " vs degree-1 " + std::to_string(r1.counters.cycles_compute);

    // one-NC-fitting topology split across two NCs
    QuantConfig dq;
    SnnTopology two = random_dense_net(31337, 2);
    while (two.layers.size() != 2)
        two = random_dense_net(counter_hash(two.layers.size(), 99), 2);
    ArchConfig one_nc;
    one_nc.mca_rows = 64;
    one_nc.mca_cols = 64;
    one_nc.nc_grid_w = 2;
    one_nc.nc_grid_h = 1;
    one_nc.num_neurocells = 1;
    ArchConfig two_nc = one_nc;
    two_nc.nc_grid_w = 1;
    two_nc.num_neurocells = 2;
    SpikeTrain in2 = random_input(two.layers.front().fan_in(), 10, 0.6, 3);
    MappingPlan p_one = compile_topology(two, one_nc, dq);
    MappingPlan p_two = compile_topology(two, two_nc, dq);
    if (p_one.layer_bus_segment[0] != 0 || p_two.layer_bus_segment[0] != 1)
        return "two-NC construction did not split as intended";
    SimResult r_one = simulate(p_one, in2, SimOptions{});
    SimResult r_two = simulate(p_two, in2, SimOptions{});
    if (!(r_two.counters.cycles_elapsed > r_one.counters.cycles_elapsed))
        return "two-NC split did not increase cycles";
    return "";
}

} // namespace

int main()
{
    std::vector<Check> checks = {
        {"1 oracle equivalence over 50+ randomized combos, both event-driven modes", 120,
         [] { return criterion_oracle_and_tiling(false); }},
        {"2 tiling correctness: exact reconstruction + fan-in-4 on 2x2 crossbars", 120,
         [] {
             if (auto err = criterion_oracle_and_tiling(true); !err.empty())
                 return err;
             return criterion_fig5_tiling();
         }},
        {"3 quantization endpoints and error bound", 60,
         [] { return criterion_quant_endpoints(); }},
        {"4 desk MLP energy strictly decreasing over sizes {32,64,128}", 60,
         [] { return criterion_mlp_trend(); }},
        {"5 desk CNN energy minimal at 64; fill drops from 64 to 128", 120,
         [] { return criterion_cnn_trend(); }},
        {"6 event-driven savings: positive, largest at 32, zero at rate 1.0, MLP >= CNN",
         120, [] { return criterion_event_ablation(); }},
        {"7 bit sweep: exact energy invariance, CMOS growth, fidelity(4) ~ fidelity(8)",
         180, [] { return criterion_bit_sweep(); }},
        {"8 determinism: byte-identical artifacts and counter conservation", 60,
         [] { return criterion_determinism(); }},
        {"9 latency: degree-2 doubles compute cycles; NC split adds bus cycles", 60,
         [] { return criterion_latency(); }},
    };

    int failures = 0;
    for (auto& check : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string err;
        try {
            err = check.run();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (err.empty() && secs > check.budget_seconds)
            err = "exceeded runtime budget (" + std::to_string(secs) + "s)";
        if (err.empty()) {
            std::printf("PASS criterion %s (%.2fs)\n", check.name.c_str(), secs);
        } else {
            std::printf("FAIL criterion %s (%.2fs): %s\n", check.name.c_str(), secs,
                        err.c_str());
            ++failures;
        }
    }
    return failures;
}
