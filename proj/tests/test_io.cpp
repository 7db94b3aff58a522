#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "resparc/archsim.hpp"
#include "resparc/bench.hpp"
#include "resparc/config.hpp"
#include "resparc/errors.hpp"
#include "resparc/io.hpp"

using namespace resparc;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir()
{
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "resparc_io_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parser: sections, comments, overrides, and defaults")
{
    const char* text = R"(# defaults overridden below
[quant]
bits = 6
mode = "unsigned"
[arch]
mca_rows = 32
mca_cols = 32
[energy]
e_switch_hop = 2.5e-12
[cmos]
bits = 6
)";
    FullConfig cfg = parse_config_text(text, "test.cfg");
    CHECK(cfg.quant.bits == 6);
    CHECK(cfg.quant.mode == SignedMode::Unsigned);
    CHECK(cfg.quant.r_min == doctest::Approx(20e3)); // untouched default
    CHECK(cfg.arch.mca_rows == 32);
    CHECK(cfg.arch.packet_width == 32);
    CHECK(cfg.energy.e_switch_hop == doctest::Approx(2.5e-12));
    CHECK(cfg.cmos.bits == 6);
}

TEST_CASE("config parser rejects unknown keys, sections, and bad values")
{
    CHECK_THROWS_WITH_AS(parse_config_text("[quant]\nbogus = 1\n", "t"),
                         doctest::Contains("unknown key"), InputError);
    CHECK_THROWS_WITH_AS(parse_config_text("[nope]\n", "t"),
                         doctest::Contains("unknown section"), InputError);
    CHECK_THROWS_WITH_AS(parse_config_text("bits = 4\n", "t"),
                         doctest::Contains("outside any"), InputError);
    CHECK_THROWS_WITH_AS(parse_config_text("[quant]\nbits = banana\n", "t"),
                         doctest::Contains("expected a number"), InputError);
    CHECK_THROWS_AS(parse_config_text("[quant]\nbits = 11\n", "t"), InputError);
}

TEST_CASE("topology round trip with inline weights")
{
    SnnTopology topo = make_desk_cnn(3);
    const fs::path p = tmpdir() / "cnn_inline.json";
    save_topology(topo, p.string(), "");
    SnnTopology back = load_topology(p.string());
    REQUIRE(back.layers.size() == topo.layers.size());
    for (size_t l = 0; l < topo.layers.size(); ++l) {
        CHECK(back.layers[l].kind == topo.layers[l].kind);
        CHECK(back.layers[l].fan_in() == topo.layers[l].fan_in());
        CHECK(back.layers[l].fan_out() == topo.layers[l].fan_out());
        CHECK(back.layers[l].threshold == topo.layers[l].threshold);
        CHECK(back.weights[l].values == topo.weights[l].values);
    }
}

TEST_CASE("topology round trip through a float32 sidecar blob")
{
    SnnTopology topo = make_desk_mlp(5);
    const fs::path p = tmpdir() / "mlp.json";
    save_topology(topo, p.string(), "mlp_weights.bin");
    SnnTopology back = load_topology(p.string());
    REQUIRE(back.weights.size() == topo.weights.size());
    for (size_t l = 0; l < topo.weights.size(); ++l) {
        REQUIRE(back.weights[l].values.size() == topo.weights[l].values.size());
        for (size_t i = 0; i < topo.weights[l].values.size(); ++i)
            CHECK(back.weights[l].values[i] ==
                  double(float(topo.weights[l].values[i])));
    }
}

TEST_CASE("truncated or mismatched weight files are rejected with the layer named")
{
    SnnTopology topo = make_desk_mlp(5);
    const fs::path p = tmpdir() / "mlp_bad.json";
    save_topology(topo, p.string(), "mlp_bad_weights.bin");
    // chop the blob mid-layer-1
    const fs::path blob = tmpdir() / "mlp_bad_weights.bin";
    std::string bytes = slurp(blob);
    std::ofstream out(blob, std::ios::binary);
    out << bytes.substr(0, bytes.size() / 2);
    out.close();
    CHECK_THROWS_WITH_AS(load_topology(p.string()), doctest::Contains("layer"),
                         InputError);
}

TEST_CASE("malformed topology JSON errors carry the file name")
{
    const fs::path p = tmpdir() / "broken.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_WITH_AS(load_topology(p.string()), doctest::Contains("broken.json"),
                         InputError);
}

TEST_CASE("plan JSON round trip preserves simulation behavior exactly")
{
    SnnTopology topo = make_desk_cnn(7);
    ArchConfig arch;
    arch.mca_rows = 16;
    arch.mca_cols = 16;
    QuantConfig q;
    MappingPlan plan = compile_topology(topo, arch, q);
    const fs::path p = tmpdir() / "plan.json";
    save_plan(plan, p.string());
    MappingPlan back = load_plan(p.string());

    SpikeTrain input = random_input(256, 6, 0.3, 11);
    SimResult a = simulate(plan, input, SimOptions{});
    SimResult b = simulate(back, input, SimOptions{});
    CHECK(a.counters == b.counters);
    for (size_t l = 0; l < a.layer_outputs.size(); ++l)
        CHECK(a.layer_outputs[l] == b.layer_outputs[l]);

    // serialization itself is deterministic
    const fs::path p2 = tmpdir() / "plan2.json";
    save_plan(back, p2.string());
    CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("CSV writer emits RFC-4180 lines with CRLF and minimal quoting")
{
    const fs::path p = tmpdir() / "t.csv";
    {
        CsvWriter csv(p.string());
        csv.row({"a", "b,c", "d\"e"});
        csv.row({"1", "2", "3"});
    }
    CHECK(slurp(p) == "a,\"b,c\",\"d\"\"e\"\r\n1,2,3\r\n");
}

TEST_CASE("spike train CSV lists only (timestep, neuron) spike pairs")
{
    SpikeTrain t(3, 2);
    t.set(0, 1, 1);
    t.set(2, 0, 1);
    const fs::path p = tmpdir() / "spikes.csv";
    write_spike_csv(t, p.string());
    CHECK(slurp(p) == "timestep,neuron_index\r\n0,1\r\n2,0\r\n");
}

TEST_CASE("SVG output is a pure function of its inputs")
{
    const fs::path a = tmpdir() / "a.svg";
    const fs::path b = tmpdir() / "b.svg";
    std::vector<SvgSeries> series = {{"x", "#112233", {1.0, 2.0, 3.0}},
                                     {"y", "#445566", {0.5, 1.5, 2.5}}};
    write_svg_bars(a.string(), "chart", {"p", "q", "r"}, series, true);
    write_svg_bars(b.string(), "chart", {"p", "q", "r"}, series, true);
    const std::string sa = slurp(a);
    CHECK(sa == slurp(b));
    CHECK(sa.find("<svg") == 0);
    CHECK(sa.find("</svg>") != std::string::npos);
}
