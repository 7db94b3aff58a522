// resparc: compile/simulate/cost pipeline and experiment harness CLI.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resparc/archsim.hpp"
#include "resparc/bench.hpp"
#include "resparc/config.hpp"
#include "resparc/costmodel.hpp"
#include "resparc/errors.hpp"
#include "resparc/io.hpp"
#include "resparc/mapper.hpp"
#include "resparc/prng.hpp"
#include "resparc/snn.hpp"

namespace fs = std::filesystem;
using namespace resparc;

namespace {

struct CommonArgs {
    std::string topology;
    std::string weights;
    std::string config;
    std::string out = "out";
    uint32_t timesteps = 20;
    uint64_t seed = 1;
    double rate = 0.2;
    std::string event_driven = "on";
    bool trace = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_topology = true)
{
    auto* opt = cmd->add_option("--topology", a.topology, "topology JSON file");
    if (needs_topology)
        opt->required();
    cmd->add_option("--weights", a.weights, "sidecar weights file overriding the topology's");
    cmd->add_option("--config", a.config, "configuration file (TOML-style sections)");
    cmd->add_option("--timesteps", a.timesteps, "simulation timesteps");
    cmd->add_option("--seed", a.seed, "PRNG seed for inputs");
    cmd->add_option("--rate", a.rate, "mean input spike rate in [0,1]");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--event-driven", a.event_driven, "on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_flag("--trace", a.trace, "write a per-packet trace file");
}

FullConfig get_config(const CommonArgs& a)
{
    if (a.config.empty())
        return FullConfig{};
    return load_config(a.config);
}

SnnTopology get_topology(const CommonArgs& a)
{
    SnnTopology topo = load_topology(a.topology);
    if (!a.weights.empty()) {
        topo.weights = load_weights_file(a.weights, topo.layers.size());
        topo.validate();
    }
    return topo;
}

SpikeTrain make_input(const SnnTopology& topo, const CommonArgs& a)
{
    if (a.rate < 0.0 || a.rate > 1.0)
        throw InputError("--rate must be in [0, 1]");
    return random_input(topo.layers.front().fan_in(), a.timesteps, a.rate, a.seed);
}

void ensure_out(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create output directory " + dir + ": " + ec.message());
}

struct RunArtifacts {
    MappingPlan plan;
    SimResult sim;
    EnergyReport energy;
    LatencyReport latency;
    CmosReport cmos;
    UtilizationReport util;
};

// One full compile -> simulate -> cost pass, oracle-checked against the dense
// reference on the same quantized weights.
RunArtifacts run_pipeline(const SnnTopology& topo, const SpikeTrain& input,
                          const FullConfig& cfg, bool event_driven,
                          std::ostream* trace = nullptr)
{
    RunArtifacts r;
    r.plan = compile_topology(topo, cfg.arch, cfg.quant);
    SimOptions opts;
    opts.event_driven = event_driven;
    opts.trace = trace;
    r.sim = simulate(r.plan, input, opts);

    auto ref = reference_forward(topo, input, &cfg.quant);
    for (size_t l = 0; l < ref.size(); ++l)
        if (!(ref[l] == r.sim.layer_outputs[l]))
            throw SimError("oracle mismatch at layer " + std::to_string(l));

    r.energy = resparc_energy(r.sim.counters, r.plan, cfg.energy);
    r.latency = resparc_latency(r.sim.counters, r.plan, cfg.energy);
    r.cmos = cmos_baseline(spike_stats(topo, input, ref), cfg.cmos);
    r.util = utilization(r.plan);
    return r;
}

void write_energy_csv(const EnergyReport& e, const std::string& run_id,
                      const std::string& path)
{
    CsvWriter csv(path);
    csv.row({"run_id", "component", "joules"});
    csv.row({run_id, "neuron", csv_num(e.neuron)});
    csv.row({run_id, "crossbar", csv_num(e.crossbar)});
    csv.row({run_id, "peripheral", csv_num(e.peripheral)});
    csv.row({run_id, "total", csv_num(e.total)});
}

void write_comparison_csv(const RunArtifacts& r, const std::string& path)
{
    CsvWriter csv(path);
    csv.row({"metric", "resparc", "cmos", "ratio"});
    csv.row({"energy_j", csv_num(r.energy.total), csv_num(r.cmos.total),
             csv_num(r.energy.total > 0 ? r.cmos.total / r.energy.total : 0.0)});
    csv.row({"cycles", csv_num(r.latency.cycles), csv_num(r.cmos.cycles),
             csv_num(r.latency.cycles ? double(r.cmos.cycles) / double(r.latency.cycles)
                                      : 0.0)});
    const double t_res = r.latency.seconds;
    const double t_cmos = double(r.cmos.cycles) * 1e-9;
    csv.row({"seconds", csv_num(t_res), csv_num(t_cmos),
             csv_num(t_res > 0 ? t_cmos / t_res : 0.0)});
}

int cmd_compile(const CommonArgs& a)
{
    ensure_out(a.out);
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    MappingPlan plan = compile_topology(topo, cfg.arch, cfg.quant);
    save_plan(plan, (fs::path(a.out) / "plan.json").string());
    write_utilization_csv(utilization(plan), (fs::path(a.out) / "utilization.csv").string());
    std::cout << "compiled: " << plan.tiles.size() << " tiles, " << plan.mpes_used()
              << " mPEs, " << plan.ncs_used() << " NeuroCells\n";
    return 0;
}

int cmd_simulate(const CommonArgs& a)
{
    ensure_out(a.out);
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    SpikeTrain input = make_input(topo, a);
    MappingPlan plan = compile_topology(topo, cfg.arch, cfg.quant);
    save_plan(plan, (fs::path(a.out) / "plan.json").string());

    std::ofstream trace_out;
    SimOptions opts;
    opts.event_driven = a.event_driven == "on";
    if (a.trace) {
        trace_out.open(fs::path(a.out) / "trace.txt", std::ios::binary);
        opts.trace = &trace_out;
    }
    SimResult sim = simulate(plan, input, opts);
    write_counters_csv(sim.counters, (fs::path(a.out) / "sim_counters.csv").string());
    for (size_t l = 0; l < sim.layer_outputs.size(); ++l)
        write_spike_csv(sim.layer_outputs[l],
                        (fs::path(a.out) / ("spikes_layer" + std::to_string(l) + ".csv"))
                            .string());
    std::cout << "simulated " << input.timesteps << " timesteps: "
              << sim.counters.spikes_emitted << " spikes, " << sim.counters.cycles_elapsed
              << " cycles\n";
    return 0;
}

int cmd_cost(const CommonArgs& a)
{
    ensure_out(a.out);
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    SpikeTrain input = make_input(topo, a);
    RunArtifacts r = run_pipeline(topo, input, cfg, a.event_driven == "on");
    save_plan(r.plan, (fs::path(a.out) / "plan.json").string());
    write_counters_csv(r.sim.counters, (fs::path(a.out) / "sim_counters.csv").string());
    write_energy_csv(r.energy, "single", (fs::path(a.out) / "energy.csv").string());
    write_comparison_csv(r, (fs::path(a.out) / "comparison.csv").string());
    std::cout << "total energy " << csv_num(r.energy.total) << " J over "
              << r.latency.cycles << " cycles\n";
    return 0;
}

std::vector<uint32_t> parse_sizes(const std::vector<uint32_t>& sizes)
{
    if (sizes.empty())
        throw InputError("--sizes must list at least one crossbar size");
    for (size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw InputError("--sizes must be sorted ascending");
    return sizes;
}

int cmd_sweep_mca(const CommonArgs& a, const std::vector<uint32_t>& sizes_in)
{
    ensure_out(a.out);
    auto sizes = parse_sizes(sizes_in);
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    SpikeTrain input = make_input(topo, a);

    CsvWriter csv((fs::path(a.out) / "sweep_mca.csv").string());
    csv.row({"size", "neuron", "crossbar", "peripheral", "total", "mean_fill", "tiles",
             "mpes", "ncs", "cycles"});
    SvgSeries neuron{"neuron", "#4c78a8", {}}, xbar{"crossbar", "#f58518", {}},
        peri{"peripheral", "#54a24b", {}};
    std::vector<std::string> cats;
    for (uint32_t s : sizes) {
        FullConfig c = cfg;
        c.arch.mca_rows = s;
        c.arch.mca_cols = s;
        RunArtifacts r = run_pipeline(topo, input, c, a.event_driven == "on");
        csv.row({csv_num(uint64_t(s)), csv_num(r.energy.neuron), csv_num(r.energy.crossbar),
                 csv_num(r.energy.peripheral), csv_num(r.energy.total),
                 csv_num(r.util.mean_fill), csv_num(uint64_t(r.util.total_tiles)),
                 csv_num(uint64_t(r.util.total_mpes)), csv_num(uint64_t(r.util.total_ncs)),
                 csv_num(r.latency.cycles)});
        neuron.values.push_back(r.energy.neuron);
        xbar.values.push_back(r.energy.crossbar);
        peri.values.push_back(r.energy.peripheral);
        cats.push_back(std::to_string(s));
    }
    write_svg_bars((fs::path(a.out) / "sweep_mca.svg").string(),
                   "Energy breakdown vs crossbar size", cats, {neuron, xbar, peri}, true);
    std::cout << "sweep-mca: " << sizes.size() << " sizes -> " << a.out << "\n";
    return 0;
}

int cmd_sweep_bits(const CommonArgs& a, const std::vector<uint32_t>& bits_list,
                   uint32_t num_inputs)
{
    ensure_out(a.out);
    if (bits_list.empty())
        throw InputError("--bits must list at least one precision");
    for (uint32_t b : bits_list)
        if (b < 1 || b > 8)
            throw InputError("--bits values must be in [1, 8]");
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);

    // Full-precision reference decisions on every probe input.
    std::vector<SpikeTrain> inputs;
    std::vector<uint32_t> ref_class;
    std::vector<std::vector<uint64_t>> ref_counts;
    for (uint32_t i = 0; i < num_inputs; ++i) {
        inputs.push_back(random_input(topo.layers.front().fan_in(), a.timesteps, a.rate,
                                      counter_hash(a.seed, 100 + i)));
        auto ref = reference_forward(topo, inputs.back(), nullptr);
        ref_class.push_back(classify(ref.back()));
        std::vector<uint64_t> counts(ref.back().width);
        for (uint32_t n = 0; n < ref.back().width; ++n)
            counts[n] = ref.back().spike_count(n);
        ref_counts.push_back(std::move(counts));
    }

    CsvWriter csv((fs::path(a.out) / "sweep_bits.csv").string());
    csv.row({"bits", "fidelity", "spike_l1", "resparc_total", "cmos_core",
             "cmos_memory_access", "cmos_leakage", "cmos_total"});
    SvgSeries fid{"fidelity", "#4c78a8", {}}, res_n{"resparc energy (norm)", "#f58518", {}},
        cmos_n{"cmos energy (norm)", "#54a24b", {}};
    std::vector<std::string> cats;
    std::vector<double> res_tot, cmos_tot;

    for (uint32_t b : bits_list) {
        FullConfig c = cfg;
        c.quant.bits = static_cast<int>(b);
        c.cmos.bits = static_cast<int>(b);
        // Mapped-vs-reference equivalence spot check on the first input.
        RunArtifacts spot = run_pipeline(topo, inputs.front(), c, a.event_driven == "on");

        uint64_t agree = 0;
        double l1_sum = 0.0;
        for (uint32_t i = 0; i < num_inputs; ++i) {
            auto q = reference_forward(topo, inputs[i], &c.quant);
            if (classify(q.back()) == ref_class[i])
                ++agree;
            double l1 = 0.0;
            for (uint32_t n = 0; n < q.back().width; ++n)
                l1 += std::abs(double(q.back().spike_count(n)) -
                               double(ref_counts[i][n]));
            l1_sum += l1 / double(q.back().width);
        }
        const double fidelity = double(agree) / double(num_inputs);
        const double l1 = l1_sum / double(num_inputs);
        csv.row({csv_num(uint64_t(b)), csv_num(fidelity), csv_num(l1),
                 csv_num(spot.energy.total), csv_num(spot.cmos.core),
                 csv_num(spot.cmos.memory_access), csv_num(spot.cmos.memory_leakage),
                 csv_num(spot.cmos.total)});
        fid.values.push_back(fidelity);
        res_tot.push_back(spot.energy.total);
        cmos_tot.push_back(spot.cmos.total);
        cats.push_back(std::to_string(b));
    }
    const double rmax = *std::max_element(res_tot.begin(), res_tot.end());
    const double cmax = *std::max_element(cmos_tot.begin(), cmos_tot.end());
    for (size_t i = 0; i < res_tot.size(); ++i) {
        res_n.values.push_back(rmax > 0 ? res_tot[i] / rmax : 0.0);
        cmos_n.values.push_back(cmax > 0 ? cmos_tot[i] / cmax : 0.0);
    }
    write_svg_bars((fs::path(a.out) / "sweep_bits.svg").string(),
                   "Fidelity and normalized energy vs bit-discretization", cats,
                   {fid, res_n, cmos_n}, false);
    std::cout << "sweep-bits: " << bits_list.size() << " precisions over " << num_inputs
              << " inputs -> " << a.out << "\n";
    return 0;
}

int cmd_event_ablation(const CommonArgs& a, const std::vector<uint32_t>& sizes_in)
{
    ensure_out(a.out);
    auto sizes = parse_sizes(sizes_in);
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    SpikeTrain input = make_input(topo, a);

    CsvWriter csv((fs::path(a.out) / "event_ablation.csv").string());
    csv.row({"size", "energy_on", "energy_off", "savings_fraction", "packets_suppressed",
             "bus_suppressed"});
    SvgSeries on{"event-driven on", "#4c78a8", {}}, off{"event-driven off", "#f58518", {}};
    std::vector<std::string> cats;
    for (uint32_t s : sizes) {
        FullConfig c = cfg;
        c.arch.mca_rows = s;
        c.arch.mca_cols = s;
        // spike-packet run length tracks the crossbar size: an s-row MCA
        // produces s-bit packets
        c.arch.packet_width = s;
        RunArtifacts r_on = run_pipeline(topo, input, c, true);
        RunArtifacts r_off = run_pipeline(topo, input, c, false);
        const double savings =
            r_off.energy.total > 0
                ? (r_off.energy.total - r_on.energy.total) / r_off.energy.total
                : 0.0;
        csv.row({csv_num(uint64_t(s)), csv_num(r_on.energy.total),
                 csv_num(r_off.energy.total), csv_num(savings),
                 csv_num(r_on.sim.counters.packets_suppressed),
                 csv_num(r_on.sim.counters.bus_suppressed)});
        on.values.push_back(r_on.energy.total);
        off.values.push_back(r_off.energy.total);
        cats.push_back(std::to_string(s));
    }
    write_svg_bars((fs::path(a.out) / "event_ablation.svg").string(),
                   "Energy with and without event-driven suppression", cats, {on, off},
                   false);
    std::cout << "event-ablation: " << sizes.size() << " sizes -> " << a.out << "\n";
    return 0;
}

int cmd_verify_oracle(const CommonArgs& a, uint32_t num_inputs)
{
    FullConfig cfg = get_config(a);
    SnnTopology topo = get_topology(a);
    MappingPlan plan = compile_topology(topo, cfg.arch, cfg.quant);
    for (uint32_t i = 0; i < num_inputs; ++i) {
        SpikeTrain input = random_input(topo.layers.front().fan_in(), a.timesteps, a.rate,
                                        counter_hash(a.seed, i));
        auto ref = reference_forward(topo, input, &cfg.quant);
        for (bool ed : {true, false}) {
            SimOptions opts;
            opts.event_driven = ed;
            SimResult sim = simulate(plan, input, opts);
            for (size_t l = 0; l < ref.size(); ++l)
                if (!(ref[l] == sim.layer_outputs[l]))
                    throw SimError("oracle mismatch: input " + std::to_string(i) +
                                   " layer " + std::to_string(l) + " event_driven=" +
                                   (ed ? "on" : "off"));
        }
    }
    std::cout << "verify-oracle: " << num_inputs
              << " inputs x {on,off} match the reference spike-for-spike\n";
    return 0;
}

int cmd_gen_bench(const std::string& out_dir, uint64_t seed)
{
    ensure_out(out_dir);
    save_topology(make_desk_mlp(seed), (fs::path(out_dir) / "desk_mlp.json").string(),
                  "desk_mlp_weights.bin");
    save_topology(make_desk_cnn(seed), (fs::path(out_dir) / "desk_cnn.json").string(),
                  "desk_cnn_weights.bin");
    std::cout << "wrote desk_mlp and desk_cnn into " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RESPARC crossbar SNN accelerator simulator and mapping compiler"};
    app.require_subcommand(1);

    CommonArgs a_compile, a_sim, a_cost, a_mca, a_bits, a_abl, a_verify;
    std::vector<uint32_t> sizes{32, 64, 128};
    std::vector<uint32_t> sizes_abl{32, 64, 128};
    std::vector<uint32_t> bits{1, 2, 3, 4, 5, 6, 7, 8};
    uint32_t num_inputs = 200;
    uint32_t verify_inputs = 10;
    std::string bench_out = "models";
    uint64_t bench_seed = 7;

    auto* c_compile = app.add_subcommand("compile", "map a topology onto the core");
    add_common(c_compile, a_compile);

    auto* c_sim = app.add_subcommand("simulate", "run the mapped architecture simulation");
    add_common(c_sim, a_sim);

    auto* c_cost = app.add_subcommand("cost", "compile + simulate + energy/latency reports");
    add_common(c_cost, a_cost);

    auto* c_mca = app.add_subcommand("sweep-mca", "energy breakdown across crossbar sizes");
    add_common(c_mca, a_mca);
    c_mca->add_option("--sizes", sizes, "crossbar sizes, ascending");

    auto* c_bits = app.add_subcommand("sweep-bits", "fidelity and energy across precisions");
    add_common(c_bits, a_bits);
    c_bits->add_option("--bits", bits, "bit precisions, each in [1,8]");
    c_bits->add_option("--inputs", num_inputs, "number of probe inputs");

    auto* c_abl = app.add_subcommand("event-ablation",
                                     "event-driven on/off energy comparison");
    add_common(c_abl, a_abl);
    c_abl->add_option("--sizes", sizes_abl, "crossbar sizes, ascending");

    auto* c_verify = app.add_subcommand("verify-oracle",
                                        "check mapped simulation against the reference");
    add_common(c_verify, a_verify);
    c_verify->add_option("--inputs", verify_inputs, "number of random inputs");

    auto* c_bench = app.add_subcommand("gen-bench", "write the desk benchmark files");
    c_bench->add_option("--out", bench_out, "output directory");
    c_bench->add_option("--seed", bench_seed, "weight generation seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_compile->parsed())
            return cmd_compile(a_compile);
        if (c_sim->parsed())
            return cmd_simulate(a_sim);
        if (c_cost->parsed())
            return cmd_cost(a_cost);
        if (c_mca->parsed())
            return cmd_sweep_mca(a_mca, sizes);
        if (c_bits->parsed())
            return cmd_sweep_bits(a_bits, bits, num_inputs);
        if (c_abl->parsed())
            return cmd_event_ablation(a_abl, sizes_abl);
        if (c_verify->parsed())
            return cmd_verify_oracle(a_verify, verify_inputs);
        if (c_bench->parsed())
            return cmd_gen_bench(bench_out, bench_seed);
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
