#include "resparc/mapper.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "resparc/errors.hpp"

namespace resparc {

void ArchConfig::validate() const
{
    if (mca_rows == 0 || mca_cols == 0 || mcas_per_mpe == 0 || nc_grid_w == 0 ||
        nc_grid_h == 0 || num_neurocells == 0 || packet_width == 0)
        throw InputError("arch: all dimensions must be positive");
    if (buffer_depth == 0)
        throw InputError("arch: buffer_depth must be >= 1");
}

const char* route_kind_name(RouteKind k)
{
    switch (k) {
    case RouteKind::Local: return "local";
    case RouteKind::SharedSwitch: return "shared_switch";
    case RouteKind::SameRow: return "same_row";
    case RouteKind::SameCol: return "same_col";
    case RouteKind::RowThenCol: return "row_then_col";
    }
    return "?";
}

uint32_t LayerTiling::max_degree() const
{
    size_t d = 0;
    for (const auto& s : schedule)
        d = std::max(d, s.size());
    return static_cast<uint32_t>(d);
}

LayerTiling tile_dense(const LevelMatrix& lm, uint32_t layer, const ArchConfig& cfg,
                       const QuantConfig& quant)
{
    const uint32_t R = cfg.mca_rows;
    const uint32_t Ceff = cfg.cols_effective(quant);
    if (Ceff == 0)
        throw InputError("arch: mca_cols too small for differential mode");

    const uint32_t row_blocks = (lm.rows + R - 1) / R;
    const uint32_t col_blocks = (lm.cols + Ceff - 1) / Ceff;

    LayerTiling out;
    out.schedule.assign(lm.cols, {});
    for (uint32_t cb = 0; cb < col_blocks; ++cb) {
        const uint32_t c0 = cb * Ceff;
        const uint32_t c1 = std::min(c0 + Ceff, lm.cols);
        for (uint32_t rb = 0; rb < row_blocks; ++rb) {
            const uint32_t r0 = rb * R;
            const uint32_t r1 = std::min(r0 + R, lm.rows);
            CrossbarTile tile;
            tile.id = static_cast<uint32_t>(out.tiles.size());
            tile.layer = layer;
            tile.group = cb;
            tile.row_map.resize(r1 - r0);
            for (uint32_t r = r0; r < r1; ++r)
                tile.row_map[r - r0] = r;
            tile.col_map.resize(c1 - c0);
            for (uint32_t c = c0; c < c1; ++c)
                tile.col_map[c - c0] = c;
            tile.levels.resize(size_t(r1 - r0) * (c1 - c0));
            for (uint32_t r = r0; r < r1; ++r)
                for (uint32_t c = c0; c < c1; ++c)
                    tile.levels[size_t(r - r0) * (c1 - c0) + (c - c0)] = lm.at(r, c);
            tile.mapped_cells = uint64_t(r1 - r0) * (c1 - c0);
            out.tiles.push_back(std::move(tile));
            for (uint32_t c = c0; c < c1; ++c)
                out.schedule[c].push_back({out.tiles.back().id, c - c0});
        }
    }
    return out;
}

namespace {

// Under-construction tile for the greedy sparse packer.
struct OpenTile {
    std::vector<uint32_t> rows; // ascending union of member columns' rows
    std::vector<uint32_t> cols; // global output indices
    uint32_t group = 0;
};

// Chunking of one oversized column's rows into runs of at most R.
std::vector<std::vector<uint32_t>> chunk_rows(const std::vector<uint32_t>& rows, uint32_t R)
{
    std::vector<std::vector<uint32_t>> chunks;
    for (size_t i = 0; i < rows.size(); i += R)
        chunks.emplace_back(rows.begin() + i,
                            rows.begin() + std::min(rows.size(), i + R));
    return chunks;
}

} // namespace

LayerTiling pack_sparse(const ConnectivityMatrix& pattern, const LevelMatrix& lm,
                        uint32_t layer, const ArchConfig& cfg, const QuantConfig& quant)
{
    const uint32_t R = cfg.mca_rows;
    const uint32_t Ceff = cfg.cols_effective(quant);
    if (Ceff == 0)
        throw InputError("arch: mca_cols too small for differential mode");

    LayerTiling out;
    out.schedule.assign(pattern.cols, {});
    uint32_t next_group = 0;

    auto emit_tile = [&](const std::vector<uint32_t>& rows,
                         const std::vector<uint32_t>& cols, uint32_t group) {
        CrossbarTile tile;
        tile.id = static_cast<uint32_t>(out.tiles.size());
        tile.layer = layer;
        tile.group = group;
        tile.row_map = rows;
        tile.col_map = cols;
        tile.levels.assign(rows.size() * cols.size(), 0);
        for (size_t c = 0; c < cols.size(); ++c) {
            for (const auto& e : pattern.columns[cols[c]]) {
                auto it = std::lower_bound(rows.begin(), rows.end(), e.row);
                if (it != rows.end() && *it == e.row) {
                    size_t r = size_t(it - rows.begin());
                    tile.levels[r * cols.size() + c] = lm.at(e.row, cols[c]);
                    ++tile.mapped_cells;
                }
            }
        }
        out.tiles.push_back(std::move(tile));
        return out.tiles.back().id;
    };

    // Shared open tile for columns whose rows fit in R.
    OpenTile open;
    bool open_valid = false;
    auto close_open = [&]() {
        if (!open_valid)
            return;
        uint32_t id = emit_tile(open.rows, open.cols, open.group);
        for (size_t c = 0; c < open.cols.size(); ++c)
            out.schedule[open.cols[c]].push_back({id, static_cast<uint32_t>(c)});
        open_valid = false;
    };

    // Open group of split columns sharing identical chunk row-sets.
    std::vector<std::vector<uint32_t>> split_chunks;
    std::vector<uint32_t> split_cols;
    uint32_t split_group = 0;
    auto close_split = [&]() {
        if (split_cols.empty())
            return;
        for (const auto& chunk : split_chunks) {
            uint32_t id = emit_tile(chunk, split_cols, split_group);
            for (size_t c = 0; c < split_cols.size(); ++c)
                out.schedule[split_cols[c]].push_back({id, static_cast<uint32_t>(c)});
        }
        split_cols.clear();
        split_chunks.clear();
    };

    for (uint32_t col = 0; col < pattern.cols; ++col) {
        std::vector<uint32_t> rows;
        rows.reserve(pattern.columns[col].size());
        for (const auto& e : pattern.columns[col])
            rows.push_back(e.row);

        if (rows.size() > R) {
            close_open();
            auto chunks = chunk_rows(rows, R);
            if (!split_cols.empty() &&
                (split_chunks != chunks || split_cols.size() >= Ceff))
                close_split();
            if (split_cols.empty()) {
                split_chunks = std::move(chunks);
                split_group = next_group++;
            }
            split_cols.push_back(col);
            continue;
        }

        close_split();
        if (open_valid) {
            std::vector<uint32_t> merged;
            std::set_union(open.rows.begin(), open.rows.end(), rows.begin(), rows.end(),
                           std::back_inserter(merged));
            if (merged.size() <= R && open.cols.size() < Ceff) {
                open.rows = std::move(merged);
                open.cols.push_back(col);
                continue;
            }
            close_open();
        }
        open.rows = std::move(rows);
        open.cols = {col};
        open.group = next_group++;
        open_valid = true;
    }
    close_open();
    close_split();
    return out;
}

namespace {

// Serpentine slot -> grid coordinates; consecutive slots are always
// grid-adjacent within the NC, so spill chains can use C_ext wires.
MpePlace place_for_slot(uint32_t slot, const ArchConfig& cfg)
{
    const uint32_t per_nc = cfg.nc_grid_w * cfg.nc_grid_h;
    MpePlace p;
    p.nc = slot / per_nc;
    const uint32_t local = slot % per_nc;
    p.y = local / cfg.nc_grid_w;
    const uint32_t xr = local % cfg.nc_grid_w;
    p.x = (p.y % 2 == 0) ? xr : cfg.nc_grid_w - 1 - xr;
    return p;
}

struct Allocator {
    const ArchConfig& cfg;
    uint32_t total_slots;
    uint32_t next_slot = 0;      // next untouched slot
    int32_t open_mpe = -1;       // mPE id accepting more tiles, -1 if none
    uint32_t open_free = 0;      // free crossbar slots in open_mpe
    std::vector<MpePlace>& mpes; // mPE id -> place

    explicit Allocator(const ArchConfig& c, std::vector<MpePlace>& m)
        : cfg(c), total_slots(c.num_neurocells * c.nc_grid_w * c.nc_grid_h), mpes(m)
    {
    }

    uint32_t fresh_mpe(uint32_t required_for_diag)
    {
        if (next_slot >= total_slots)
            throw CapacityError("topology needs more than the configured " +
                                std::to_string(total_slots) + " mPEs (" +
                                std::to_string(cfg.num_neurocells) + " NeuroCells of " +
                                std::to_string(cfg.nc_grid_w) + "x" +
                                std::to_string(cfg.nc_grid_h) + "); first unplaced demand: " +
                                std::to_string(required_for_diag) + " more mPE(s)");
        mpes.push_back(place_for_slot(next_slot, cfg));
        ++next_slot;
        return static_cast<uint32_t>(mpes.size() - 1);
    }

    void close_open() { open_mpe = -1; }

    // Room left in the current NC after the open mPE (chains may not cross
    // NC boundaries: C_ext wires only exist inside a NeuroCell).
    uint32_t slots_left_in_nc() const
    {
        const uint32_t per_nc = cfg.nc_grid_w * cfg.nc_grid_h;
        return per_nc - next_slot % per_nc;
    }

    void skip_to_next_nc()
    {
        const uint32_t per_nc = cfg.nc_grid_w * cfg.nc_grid_h;
        next_slot = (next_slot + per_nc - 1) / per_nc * per_nc;
    }
};

} // namespace

MappingPlan assign_and_place(const std::vector<LayerInfo>& layer_info,
                             std::vector<LayerTiling> tilings, const ArchConfig& cfg,
                             const QuantConfig& quant)
{
    cfg.validate();
    quant.validate();
    MappingPlan plan;
    plan.arch = cfg;
    plan.quant = quant;
    plan.layers = layer_info;

    // Flatten tiles to global ids, layer by layer.
    std::vector<uint32_t> layer_tile_base(tilings.size(), 0);
    for (size_t l = 0; l < tilings.size(); ++l) {
        layer_tile_base[l] = static_cast<uint32_t>(plan.tiles.size());
        for (auto& t : tilings[l].tiles) {
            t.id += layer_tile_base[l];
            plan.tiles.push_back(std::move(t));
        }
        TimeMuxSchedule sched = std::move(tilings[l].schedule);
        for (auto& per_neuron : sched)
            for (auto& e : per_neuron)
                e.tile += layer_tile_base[l];
        plan.schedules.push_back(std::move(sched));
    }

    plan.tile_mpe.assign(plan.tiles.size(), 0);
    Allocator alloc(cfg, plan.mpes);

    for (size_t l = 0; l < tilings.size(); ++l) {
        alloc.close_open(); // layers never share an mPE
        // Collect groups in first-tile order. Tiles of one group are
        // consecutive in schedule order for split groups; dense groups are
        // ordered by row block already.
        const uint32_t t0 = layer_tile_base[l];
        const uint32_t t1 = (l + 1 < tilings.size())
                                ? layer_tile_base[l + 1]
                                : static_cast<uint32_t>(plan.tiles.size());
        std::vector<std::pair<uint32_t, std::vector<uint32_t>>> groups; // group -> tiles
        for (uint32_t t = t0; t < t1; ++t) {
            uint32_t g = plan.tiles[t].group;
            if (groups.empty() || groups.back().first != g)
                groups.push_back({g, {}});
            groups.back().second.push_back(t);
        }
        for (auto& [g, gtiles] : groups) {
            const auto cap = cfg.mcas_per_mpe;
            if (gtiles.size() <= cap) {
                if (alloc.open_mpe < 0 || alloc.open_free < gtiles.size()) {
                    alloc.open_mpe = static_cast<int32_t>(
                        alloc.fresh_mpe(static_cast<uint32_t>(gtiles.size())));
                    alloc.open_free = cap;
                }
                for (uint32_t t : gtiles)
                    plan.tile_mpe[t] = static_cast<uint32_t>(alloc.open_mpe);
                alloc.open_free -= static_cast<uint32_t>(gtiles.size());
                if (alloc.open_free == 0)
                    alloc.close_open();
            } else {
                // Spill chain over adjacent mPEs, entirely within one NC.
                alloc.close_open();
                const uint32_t need =
                    static_cast<uint32_t>((gtiles.size() + cap - 1) / cap);
                if (need > cfg.nc_grid_w * cfg.nc_grid_h)
                    throw CapacityError(
                        "group of " + std::to_string(gtiles.size()) +
                        " crossbars needs a chain of " + std::to_string(need) +
                        " mPEs, larger than one NeuroCell (" +
                        std::to_string(cfg.nc_grid_w * cfg.nc_grid_h) + ")");
                if (alloc.slots_left_in_nc() < need)
                    alloc.skip_to_next_nc();
                SpillChain chain;
                chain.layer = static_cast<uint32_t>(l);
                for (uint32_t m = 0; m < need; ++m) {
                    uint32_t mpe = alloc.fresh_mpe(need - m);
                    chain.mpes.push_back(mpe);
                    if (m > 0)
                        plan.cext_links.push_back({mpe, chain.mpes[m - 1]});
                }
                for (size_t i = 0; i < gtiles.size(); ++i)
                    plan.tile_mpe[gtiles[i]] = chain.mpes[i / cap];
                plan.chains.push_back(std::move(chain));
            }
        }
    }

    // Neuron homes: the mPE holding the first scheduled tile.
    plan.neuron_home.resize(plan.schedules.size());
    for (size_t l = 0; l < plan.schedules.size(); ++l) {
        plan.neuron_home[l].resize(plan.schedules[l].size());
        for (size_t j = 0; j < plan.schedules[l].size(); ++j) {
            if (plan.schedules[l][j].empty())
                throw InputError("layer " + std::to_string(l) + " output " +
                                 std::to_string(j) + " has no mapped synapses");
            plan.neuron_home[l][j] = plan.tile_mpe[plan.schedules[l][j][0].tile];
        }
    }

    // Consumers of layer l's spikes: mPEs holding layer l+1 tiles. Classify
    // same-NC routes; mark a bus segment when any pair crosses NCs.
    plan.layer_bus_segment.assign(plan.layers.size(), 0);
    for (size_t l = 0; l + 1 < plan.layers.size(); ++l) {
        std::set<uint32_t> producers(plan.neuron_home[l].begin(), plan.neuron_home[l].end());
        std::set<uint32_t> consumers;
        for (uint32_t t = 0; t < plan.tiles.size(); ++t)
            if (plan.tiles[t].layer == l + 1)
                consumers.insert(plan.tile_mpe[t]);
        for (uint32_t p : producers) {
            for (uint32_t c : consumers) {
                if (p == c)
                    continue;
                const MpePlace& a = plan.mpes[p];
                const MpePlace& b = plan.mpes[c];
                if (a.nc != b.nc) {
                    plan.layer_bus_segment[l] = 1;
                    continue;
                }
                RouteEntry route;
                const uint32_t dx = a.x > b.x ? a.x - b.x : b.x - a.x;
                const uint32_t dy = a.y > b.y ? a.y - b.y : b.y - a.y;
                if (dx + dy == 1) {
                    route.kind = RouteKind::SharedSwitch;
                    route.hops = 1;
                } else if (dy == 0) {
                    route.kind = RouteKind::SameRow;
                    route.hops = 2;
                } else if (dx == 0) {
                    route.kind = RouteKind::SameCol;
                    route.hops = 2;
                } else {
                    route.kind = RouteKind::RowThenCol;
                    route.hops = 3;
                }
                plan.routes[MappingPlan::route_key(p, c)] = route;
            }
        }
    }
    return plan;
}

uint32_t MappingPlan::ncs_used() const
{
    uint32_t n = 0;
    for (const auto& p : mpes)
        n = std::max(n, p.nc + 1);
    return n;
}

std::pair<uint32_t, uint32_t> MappingPlan::nc_tag(uint32_t nc) const
{
    uint32_t core_w = 1;
    while (core_w * core_w < arch.num_neurocells)
        ++core_w;
    return {nc % core_w, nc / core_w};
}

MappingPlan compile_topology(const SnnTopology& topology, const ArchConfig& cfg,
                             const QuantConfig& quant)
{
    topology.validate();
    cfg.validate();
    quant.validate();

    std::vector<LayerInfo> infos;
    std::vector<LayerTiling> tilings;
    for (size_t l = 0; l < topology.layers.size(); ++l) {
        ConnectivityMatrix conn = build_connectivity(topology.layers[l], topology.weights[l]);
        LevelMatrix lm = quantize_connectivity(conn, quant);
        LayerInfo info;
        info.kind = topology.layers[l].kind;
        info.fan_in = conn.rows;
        info.fan_out = conn.cols;
        info.threshold = topology.layers[l].threshold;
        info.w_max = lm.w_max;
        info.unit = lm.unit;
        infos.push_back(info);
        if (conn.dense)
            tilings.push_back(tile_dense(lm, static_cast<uint32_t>(l), cfg, quant));
        else
            tilings.push_back(
                pack_sparse(conn, lm, static_cast<uint32_t>(l), cfg, quant));
    }
    return assign_and_place(infos, std::move(tilings), cfg, quant);
}

UtilizationReport utilization(const MappingPlan& plan)
{
    UtilizationReport rep;
    const double cells = double(plan.arch.mca_rows) * plan.arch.mca_cols;
    const uint32_t mult = plan.quant.mode == SignedMode::Differential ? 2 : 1;
    std::vector<double> layer_sum(plan.layers.size(), 0.0);
    std::vector<uint32_t> layer_count(plan.layers.size(), 0);
    double total = 0.0;
    for (const auto& t : plan.tiles) {
        UtilizationReport::TileFill f;
        f.tile = t.id;
        f.layer = t.layer;
        f.rows_used = static_cast<uint32_t>(t.row_map.size());
        f.cols_used = static_cast<uint32_t>(t.col_map.size()) * mult;
        f.fill = double(t.mapped_cells * mult) / cells;
        rep.tiles.push_back(f);
        layer_sum[t.layer] += f.fill;
        ++layer_count[t.layer];
        total += f.fill;
    }
    rep.layer_mean_fill.resize(plan.layers.size(), 0.0);
    for (size_t l = 0; l < plan.layers.size(); ++l)
        if (layer_count[l])
            rep.layer_mean_fill[l] = layer_sum[l] / layer_count[l];
    rep.mean_fill = plan.tiles.empty() ? 0.0 : total / double(plan.tiles.size());
    rep.total_tiles = static_cast<uint32_t>(plan.tiles.size());
    rep.total_mpes = plan.mpes_used();
    rep.total_ncs = plan.ncs_used();
    return rep;
}

std::vector<LevelMatrix> reconstruct_levels(const MappingPlan& plan)
{
    std::vector<LevelMatrix> out(plan.layers.size());
    for (size_t l = 0; l < plan.layers.size(); ++l) {
        out[l].rows = plan.layers[l].fan_in;
        out[l].cols = plan.layers[l].fan_out;
        out[l].w_max = plan.layers[l].w_max;
        out[l].unit = plan.layers[l].unit;
        out[l].levels.assign(size_t(out[l].rows) * out[l].cols, 0);
    }
    for (const auto& t : plan.tiles) {
        LevelMatrix& m = out[t.layer];
        for (size_t r = 0; r < t.row_map.size(); ++r)
            for (size_t c = 0; c < t.col_map.size(); ++c)
                // += so that double coverage of a nonzero breaks the
                // equality check against the source matrix.
                m.levels[size_t(t.row_map[r]) * m.cols + t.col_map[c]] +=
                    t.level_at(r, c);
    }
    return out;
}

} // namespace resparc
