#include "resparc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "resparc/errors.hpp"

namespace resparc {

using nlohmann::json;

namespace {

json layer_to_json(const LayerSpec& l)
{
    json j;
    j["kind"] = layer_kind_name(l.kind);
    j["threshold"] = l.threshold;
    switch (l.kind) {
    case LayerKind::Dense:
        j["n_in"] = l.n_in;
        j["n_out"] = l.n_out;
        break;
    case LayerKind::Conv:
        j["in_width"] = l.in_width;
        j["in_height"] = l.in_height;
        j["in_channels"] = l.in_channels;
        j["kernel"] = l.kernel;
        j["out_channels"] = l.out_channels;
        j["stride"] = l.stride;
        break;
    case LayerKind::Subsample:
        j["in_width"] = l.in_width;
        j["in_height"] = l.in_height;
        j["in_channels"] = l.in_channels;
        j["window"] = l.window;
        j["stride"] = l.stride;
        break;
    }
    return j;
}

LayerSpec layer_from_json(const json& j, size_t index)
{
    const std::string where = "layer " + std::to_string(index) + ": ";
    if (!j.contains("kind"))
        throw InputError(where + "missing 'kind'");
    LayerSpec l;
    const std::string kind = j.at("kind").get<std::string>();
    auto get_u32 = [&](const char* key) -> uint32_t {
        if (!j.contains(key))
            throw InputError(where + "missing '" + key + "'");
        return j.at(key).get<uint32_t>();
    };
    if (j.contains("threshold"))
        l.threshold = j.at("threshold").get<double>();
    if (kind == "dense") {
        l.kind = LayerKind::Dense;
        l.n_in = get_u32("n_in");
        l.n_out = get_u32("n_out");
    } else if (kind == "conv") {
        l.kind = LayerKind::Conv;
        l.in_width = get_u32("in_width");
        l.in_height = get_u32("in_height");
        l.in_channels = get_u32("in_channels");
        l.kernel = get_u32("kernel");
        l.out_channels = get_u32("out_channels");
        l.stride = get_u32("stride");
    } else if (kind == "subsample") {
        l.kind = LayerKind::Subsample;
        l.in_width = get_u32("in_width");
        l.in_height = get_u32("in_height");
        l.in_channels = get_u32("in_channels");
        l.window = get_u32("window");
        l.stride = get_u32("stride");
    } else {
        throw InputError(where + "unknown kind '" + kind + "'");
    }
    return l;
}

void put_u32_le(std::string& out, uint32_t v)
{
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 24) & 0xff));
}

uint32_t get_u32_le(const unsigned char* p)
{
    return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
           (uint32_t(p[3]) << 24);
}

void put_f32_le(std::string& out, float f)
{
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32_le(out, v);
}

float get_f32_le(const unsigned char* p)
{
    uint32_t v = get_u32_le(p);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

std::vector<WeightMatrix> read_sidecar(const std::string& path, size_t nlayers)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open weights file: " + path);
    std::string blob((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
    size_t off = 0;
    std::vector<WeightMatrix> out;
    for (size_t l = 0; l < nlayers; ++l) {
        if (off + 8 > blob.size())
            throw InputError("weights file truncated before layer " + std::to_string(l) +
                             " header: " + path);
        WeightMatrix w;
        w.rows = get_u32_le(p + off);
        w.cols = get_u32_le(p + off + 4);
        off += 8;
        const size_t n = size_t(w.rows) * w.cols;
        if (off + 4 * n > blob.size())
            throw InputError("weights file truncated in layer " + std::to_string(l) +
                             " data: " + path);
        w.values.resize(n);
        for (size_t i = 0; i < n; ++i)
            w.values[i] = double(get_f32_le(p + off + 4 * i));
        off += 4 * n;
        out.push_back(std::move(w));
    }
    if (off != blob.size())
        throw InputError("weights file has " + std::to_string(blob.size() - off) +
                         " trailing bytes: " + path);
    return out;
}

} // namespace

std::vector<WeightMatrix> load_weights_file(const std::string& path, size_t nlayers)
{
    return read_sidecar(path, nlayers);
}

SnnTopology load_topology(const std::string& json_path)
{
    std::ifstream in(json_path, std::ios::binary);
    if (!in)
        throw InputError("cannot open topology file: " + json_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("topology JSON parse error in " + json_path + ": " + e.what());
    }
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw InputError("topology missing 'layers' array: " + json_path);

    SnnTopology topo;
    size_t idx = 0;
    for (const auto& lj : j.at("layers"))
        topo.layers.push_back(layer_from_json(lj, idx++));

    if (!j.contains("weights"))
        throw InputError("topology missing 'weights': " + json_path);
    const json& wj = j.at("weights");
    if (wj.contains("inline")) {
        const json& arrays = wj.at("inline");
        if (!arrays.is_array() || arrays.size() != topo.layers.size())
            throw InputError("inline weights must hold one array per layer: " + json_path);
        for (size_t l = 0; l < topo.layers.size(); ++l) {
            const LayerSpec& spec = topo.layers[l];
            WeightMatrix w;
            if (spec.kind == LayerKind::Dense) {
                w.rows = spec.n_in;
                w.cols = spec.n_out;
            } else if (spec.kind == LayerKind::Conv) {
                w.rows = spec.kernel * spec.kernel * spec.in_channels;
                w.cols = spec.out_channels;
            }
            const json& a = arrays[l];
            if (a.size() != size_t(w.rows) * w.cols)
                throw InputError("layer " + std::to_string(l) + ": inline weights have " +
                                 std::to_string(a.size()) + " values, expected " +
                                 std::to_string(size_t(w.rows) * w.cols));
            w.values.reserve(a.size());
            for (const auto& v : a)
                w.values.push_back(v.get<double>());
            topo.weights.push_back(std::move(w));
        }
    } else if (wj.contains("file")) {
        const std::filesystem::path side =
            std::filesystem::path(json_path).parent_path() /
            wj.at("file").get<std::string>();
        topo.weights = read_sidecar(side.string(), topo.layers.size());
    } else {
        throw InputError("weights must specify 'inline' or 'file': " + json_path);
    }
    topo.validate();
    return topo;
}

void save_topology(const SnnTopology& topology, const std::string& json_path,
                   const std::string& sidecar_name)
{
    json j;
    j["layers"] = json::array();
    for (const auto& l : topology.layers)
        j["layers"].push_back(layer_to_json(l));
    if (sidecar_name.empty()) {
        json arrays = json::array();
        for (const auto& w : topology.weights)
            arrays.push_back(w.values);
        j["weights"] = {{"inline", arrays}};
    } else {
        std::string blob;
        for (const auto& w : topology.weights) {
            put_u32_le(blob, w.rows);
            put_u32_le(blob, w.cols);
            for (double v : w.values)
                put_f32_le(blob, float(v));
        }
        const std::filesystem::path side =
            std::filesystem::path(json_path).parent_path() / sidecar_name;
        std::ofstream bout(side, std::ios::binary);
        if (!bout)
            throw InputError("cannot write weights file: " + side.string());
        bout << blob;
        j["weights"] = {{"file", sidecar_name}};
    }
    std::ofstream out(json_path, std::ios::binary);
    if (!out)
        throw InputError("cannot write topology file: " + json_path);
    out << j.dump(1) << "\n";
}

// --- mapping plan ----------------------------------------------------------

namespace {

const char* signed_mode_name(SignedMode m)
{
    return m == SignedMode::Differential ? "differential" : "unsigned";
}

json quant_to_json(const QuantConfig& q)
{
    return {{"bits", q.bits},   {"r_min", q.r_min},
            {"r_max", q.r_max}, {"v_read", q.v_read},
            {"mode", signed_mode_name(q.mode)}};
}

QuantConfig quant_from_json(const json& j)
{
    QuantConfig q;
    q.bits = j.at("bits").get<int>();
    q.r_min = j.at("r_min").get<double>();
    q.r_max = j.at("r_max").get<double>();
    q.v_read = j.at("v_read").get<double>();
    q.mode = j.at("mode").get<std::string>() == "differential" ? SignedMode::Differential
                                                               : SignedMode::Unsigned;
    return q;
}

LayerKind kind_from_name(const std::string& s)
{
    if (s == "dense")
        return LayerKind::Dense;
    if (s == "conv")
        return LayerKind::Conv;
    if (s == "subsample")
        return LayerKind::Subsample;
    throw InputError("unknown layer kind '" + s + "'");
}

RouteKind route_kind_from_name(const std::string& s)
{
    if (s == "local")
        return RouteKind::Local;
    if (s == "shared_switch")
        return RouteKind::SharedSwitch;
    if (s == "same_row")
        return RouteKind::SameRow;
    if (s == "same_col")
        return RouteKind::SameCol;
    if (s == "row_then_col")
        return RouteKind::RowThenCol;
    throw InputError("unknown route kind '" + s + "'");
}

} // namespace

void save_plan(const MappingPlan& plan, const std::string& path)
{
    json j;
    j["arch"] = {{"mca_rows", plan.arch.mca_rows},
                 {"mca_cols", plan.arch.mca_cols},
                 {"mcas_per_mpe", plan.arch.mcas_per_mpe},
                 {"nc_grid_w", plan.arch.nc_grid_w},
                 {"nc_grid_h", plan.arch.nc_grid_h},
                 {"num_neurocells", plan.arch.num_neurocells},
                 {"packet_width", plan.arch.packet_width},
                 {"buffer_depth", plan.arch.buffer_depth}};
    j["quant"] = quant_to_json(plan.quant);
    j["layers"] = json::array();
    for (const auto& l : plan.layers)
        j["layers"].push_back({{"kind", layer_kind_name(l.kind)},
                               {"fan_in", l.fan_in},
                               {"fan_out", l.fan_out},
                               {"threshold", l.threshold},
                               {"w_max", l.w_max},
                               {"unit", l.unit}});
    j["tiles"] = json::array();
    for (const auto& t : plan.tiles)
        j["tiles"].push_back({{"id", t.id},
                              {"layer", t.layer},
                              {"group", t.group},
                              {"row_map", t.row_map},
                              {"col_map", t.col_map},
                              {"levels", t.levels},
                              {"mapped_cells", t.mapped_cells}});
    j["schedules"] = json::array();
    for (const auto& sched : plan.schedules) {
        json layer = json::array();
        for (const auto& per_neuron : sched) {
            json entries = json::array();
            for (const auto& e : per_neuron)
                entries.push_back({e.tile, e.local_col});
            layer.push_back(entries);
        }
        j["schedules"].push_back(layer);
    }
    j["tile_mpe"] = plan.tile_mpe;
    j["mpes"] = json::array();
    for (const auto& m : plan.mpes)
        j["mpes"].push_back({{"nc", m.nc}, {"x", m.x}, {"y", m.y}});
    j["neuron_home"] = plan.neuron_home;
    j["cext_links"] = json::array();
    for (const auto& c : plan.cext_links)
        j["cext_links"].push_back({{"from", c.from_mpe}, {"to", c.to_mpe}});
    j["chains"] = json::array();
    for (const auto& c : plan.chains)
        j["chains"].push_back({{"layer", c.layer}, {"mpes", c.mpes}});
    j["routes"] = json::array();
    {
        // emit in sorted key order for deterministic files
        std::vector<uint64_t> keys;
        keys.reserve(plan.routes.size());
        for (const auto& [k, v] : plan.routes)
            keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (uint64_t k : keys) {
            const RouteEntry& r = plan.routes.at(k);
            j["routes"].push_back({{"src", uint32_t(k >> 32)},
                                   {"dst", uint32_t(k & 0xffffffffu)},
                                   {"kind", route_kind_name(r.kind)},
                                   {"hops", r.hops}});
        }
    }
    j["layer_bus_segment"] = plan.layer_bus_segment;
    // tag (x, y) of each NeuroCell in the core's NC array, for inspection
    j["nc_tags"] = json::array();
    for (uint32_t nc = 0; nc < plan.ncs_used(); ++nc) {
        auto [x, y] = plan.nc_tag(nc);
        j["nc_tags"].push_back({x, y});
    }

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write plan file: " + path);
    out << j.dump(1) << "\n";
}

MappingPlan load_plan(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open plan file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("plan JSON parse error in " + path + ": " + e.what());
    }
    MappingPlan plan;
    const json& a = j.at("arch");
    plan.arch.mca_rows = a.at("mca_rows").get<uint32_t>();
    plan.arch.mca_cols = a.at("mca_cols").get<uint32_t>();
    plan.arch.mcas_per_mpe = a.at("mcas_per_mpe").get<uint32_t>();
    plan.arch.nc_grid_w = a.at("nc_grid_w").get<uint32_t>();
    plan.arch.nc_grid_h = a.at("nc_grid_h").get<uint32_t>();
    plan.arch.num_neurocells = a.at("num_neurocells").get<uint32_t>();
    plan.arch.packet_width = a.at("packet_width").get<uint32_t>();
    plan.arch.buffer_depth = a.at("buffer_depth").get<uint32_t>();
    plan.quant = quant_from_json(j.at("quant"));
    for (const auto& lj : j.at("layers")) {
        LayerInfo l;
        l.kind = kind_from_name(lj.at("kind").get<std::string>());
        l.fan_in = lj.at("fan_in").get<uint32_t>();
        l.fan_out = lj.at("fan_out").get<uint32_t>();
        l.threshold = lj.at("threshold").get<double>();
        l.w_max = lj.at("w_max").get<double>();
        l.unit = lj.at("unit").get<double>();
        plan.layers.push_back(l);
    }
    for (const auto& tj : j.at("tiles")) {
        CrossbarTile t;
        t.id = tj.at("id").get<uint32_t>();
        t.layer = tj.at("layer").get<uint32_t>();
        t.group = tj.at("group").get<uint32_t>();
        t.row_map = tj.at("row_map").get<std::vector<uint32_t>>();
        t.col_map = tj.at("col_map").get<std::vector<uint32_t>>();
        t.levels = tj.at("levels").get<std::vector<int16_t>>();
        t.mapped_cells = tj.at("mapped_cells").get<uint64_t>();
        plan.tiles.push_back(std::move(t));
    }
    for (const auto& sj : j.at("schedules")) {
        TimeMuxSchedule sched;
        for (const auto& nj : sj) {
            std::vector<ScheduleEntry> entries;
            for (const auto& ej : nj)
                entries.push_back({ej.at(0).get<uint32_t>(), ej.at(1).get<uint32_t>()});
            sched.push_back(std::move(entries));
        }
        plan.schedules.push_back(std::move(sched));
    }
    plan.tile_mpe = j.at("tile_mpe").get<std::vector<uint32_t>>();
    for (const auto& mj : j.at("mpes"))
        plan.mpes.push_back(
            {mj.at("nc").get<uint32_t>(), mj.at("x").get<uint32_t>(), mj.at("y").get<uint32_t>()});
    plan.neuron_home = j.at("neuron_home").get<std::vector<std::vector<uint32_t>>>();
    for (const auto& cj : j.at("cext_links"))
        plan.cext_links.push_back({cj.at("from").get<uint32_t>(), cj.at("to").get<uint32_t>()});
    for (const auto& cj : j.at("chains")) {
        SpillChain c;
        c.layer = cj.at("layer").get<uint32_t>();
        c.mpes = cj.at("mpes").get<std::vector<uint32_t>>();
        plan.chains.push_back(std::move(c));
    }
    for (const auto& rj : j.at("routes")) {
        RouteEntry r;
        r.kind = route_kind_from_name(rj.at("kind").get<std::string>());
        r.hops = rj.at("hops").get<uint32_t>();
        plan.routes[MappingPlan::route_key(rj.at("src").get<uint32_t>(),
                                           rj.at("dst").get<uint32_t>())] = r;
    }
    plan.layer_bus_segment = j.at("layer_bus_segment").get<std::vector<uint8_t>>();
    return plan;
}

// --- CSV ---------------------------------------------------------------------

CsvWriter::CsvWriter(const std::string& path)
{
    auto* f = new std::ofstream(path, std::ios::binary);
    if (!*f) {
        delete f;
        throw InputError("cannot write CSV file: " + path);
    }
    out_ = f;
}

CsvWriter::~CsvWriter()
{
    delete static_cast<std::ofstream*>(out_);
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    auto& out = *static_cast<std::ofstream*>(out_);
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") != std::string::npos) {
            out << '"';
            for (char c : f) {
                if (c == '"')
                    out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << f;
        }
    }
    out << "\r\n";
}

std::string csv_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_num(uint64_t v)
{
    return std::to_string(v);
}

void write_counters_csv(const SimCounters& c, const std::string& path)
{
    CsvWriter csv(path);
    csv.row({"counter", "value"});
    csv.row({"crossbar_reads", csv_num(c.crossbar_reads)});
    csv.row({"neuron_integrations", csv_num(c.neuron_integrations)});
    csv.row({"spikes_emitted", csv_num(c.spikes_emitted)});
    csv.row({"packets_generated", csv_num(c.packets_generated)});
    csv.row({"packets_sent", csv_num(c.packets_sent)});
    csv.row({"packets_suppressed", csv_num(c.packets_suppressed)});
    csv.row({"hop_count", csv_num(c.hop_count)});
    csv.row({"cext_transfers", csv_num(c.cext_transfers)});
    csv.row({"bus_broadcasts", csv_num(c.bus_broadcasts)});
    csv.row({"bus_suppressed", csv_num(c.bus_suppressed)});
    csv.row({"sram_reads", csv_num(c.sram_reads)});
    csv.row({"sram_writes", csv_num(c.sram_writes)});
    csv.row({"buffer_accesses", csv_num(c.buffer_accesses)});
    csv.row({"cycles_elapsed", csv_num(c.cycles_elapsed)});
    csv.row({"cycles_input", csv_num(c.cycles_input)});
    csv.row({"cycles_compute", csv_num(c.cycles_compute)});
    csv.row({"cycles_cext", csv_num(c.cycles_cext)});
    csv.row({"cycles_switch", csv_num(c.cycles_switch)});
    csv.row({"cycles_bus", csv_num(c.cycles_bus)});
}

void write_spike_csv(const SpikeTrain& train, const std::string& path)
{
    CsvWriter csv(path);
    csv.row({"timestep", "neuron_index"});
    for (uint32_t t = 0; t < train.timesteps; ++t)
        for (uint32_t i = 0; i < train.width; ++i)
            if (train.at(t, i))
                csv.row({csv_num(uint64_t(t)), csv_num(uint64_t(i))});
}

void write_utilization_csv(const UtilizationReport& rep, const std::string& path)
{
    CsvWriter csv(path);
    csv.row({"tile_id", "layer", "rows_used", "cols_used", "fill"});
    for (const auto& t : rep.tiles)
        csv.row({csv_num(uint64_t(t.tile)), csv_num(uint64_t(t.layer)),
                 csv_num(uint64_t(t.rows_used)), csv_num(uint64_t(t.cols_used)),
                 csv_num(t.fill)});
}

// --- SVG ---------------------------------------------------------------------

void write_svg_bars(const std::string& path, const std::string& title,
                    const std::vector<std::string>& categories,
                    const std::vector<SvgSeries>& series, bool stacked)
{
    const double W = 720, H = 420;
    const double ml = 80, mr = 30, mt = 50, mb = 60;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double vmax = 0.0;
    for (size_t c = 0; c < categories.size(); ++c) {
        double stack = 0.0;
        for (const auto& s : series) {
            const double v = c < s.values.size() ? s.values[c] : 0.0;
            if (stacked)
                stack += v;
            else
                vmax = std::max(vmax, v);
        }
        if (stacked)
            vmax = std::max(vmax, stack);
    }
    if (vmax <= 0.0)
        vmax = 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write SVG file: " + path);
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    for (int g = 0; g <= 4; ++g) {
        const double y = mt + ph - ph * g / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"#cccccc\"/>\n",
                      ml, y, ml + pw, y);
        out << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                      "font-size=\"11\">%.3g</text>\n",
                      ml - 6, y + 4, vmax * g / 4.0);
        out << buf;
    }

    const size_t ncat = categories.size();
    const size_t nser = series.size();
    const double slot = pw / double(ncat ? ncat : 1);
    for (size_t c = 0; c < ncat; ++c) {
        const double x0 = ml + slot * double(c);
        if (stacked) {
            double y = mt + ph;
            const double bw = slot * 0.6;
            for (const auto& s : series) {
                const double v = c < s.values.size() ? s.values[c] : 0.0;
                const double h = ph * v / vmax;
                y -= h;
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                              "fill=\"%s\"/>\n",
                              x0 + slot * 0.2, y, bw, h, s.color.c_str());
                out << buf;
            }
        } else {
            const double bw = slot * 0.8 / double(nser ? nser : 1);
            for (size_t si = 0; si < nser; ++si) {
                const double v = c < series[si].values.size() ? series[si].values[c] : 0.0;
                const double h = ph * v / vmax;
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                              "fill=\"%s\"/>\n",
                              x0 + slot * 0.1 + bw * double(si), mt + ph - h, bw, h,
                              series[si].color.c_str());
                out << buf;
            }
        }
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-size=\"12\">%s</text>\n",
                      x0 + slot / 2, mt + ph + 18, categories[c].c_str());
        out << buf;
    }

    double lx = ml, ly = H - 18;
    for (const auto& s : series) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" "
                      "fill=\"%s\"/><text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                      lx, ly - 9, s.color.c_str(), lx + 14, ly, s.name.c_str());
        out << buf;
        lx += 18 + 8 * double(s.name.size()) + 16;
    }
    out << "</svg>\n";
}

} // namespace resparc
