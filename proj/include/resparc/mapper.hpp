// The mapping compiler: partitions layer connectivity into crossbar tiles,
// packs tiles into mPEs and NeuroCells, builds time-multiplex schedules,
// routes inter-layer spike traffic through switches and the IO bus.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "resparc/quant.hpp"
#include "resparc/snn.hpp"

namespace resparc {

struct ArchConfig {
    uint32_t mca_rows = 64;
    uint32_t mca_cols = 64;
    uint32_t mcas_per_mpe = 4;
    uint32_t nc_grid_w = 4;
    uint32_t nc_grid_h = 4;
    uint32_t num_neurocells = 16;
    uint32_t packet_width = 32;
    uint32_t buffer_depth = 16;

    void validate() const;
    // Logical output columns one crossbar offers (differential pairs take 2
    // physical columns).
    uint32_t cols_effective(const QuantConfig& q) const
    {
        return q.mode == SignedMode::Differential ? mca_cols / 2 : mca_cols;
    }
};

struct CrossbarTile {
    uint32_t id = 0;
    uint32_t layer = 0;
    // Tiles with the same group id feed the same output neurons and must be
    // co-located (or chained over adjacent mPEs when the group exceeds one
    // mPE's crossbar count).
    uint32_t group = 0;
    std::vector<uint32_t> row_map; // global input indices, ascending
    std::vector<uint32_t> col_map; // global output indices, ascending
    std::vector<int16_t> levels;   // row_map.size() x col_map.size(), signed
    uint64_t mapped_cells = 0;     // logical synapse cells mapped in this tile

    int16_t level_at(size_t r, size_t c) const { return levels[r * col_map.size() + c]; }
    const int16_t* level_row(size_t r) const { return levels.data() + r * col_map.size(); }
};

struct ScheduleEntry {
    uint32_t tile = 0;
    uint32_t local_col = 0;
};

// Per output neuron: ordered partial-sum sources (ascending input coverage).
using TimeMuxSchedule = std::vector<std::vector<ScheduleEntry>>;

struct LayerTiling {
    std::vector<CrossbarTile> tiles; // tile.id is the index into this vector
    TimeMuxSchedule schedule;        // one list per output neuron
    uint32_t max_degree() const;
};

// Grid tiling for dense matrices: ceil(N_in/R) row blocks x ceil(N_out/C_eff)
// column blocks; every output's schedule walks its row blocks in ascending
// input order.
LayerTiling tile_dense(const LevelMatrix& levels, uint32_t layer, const ArchConfig& cfg,
                       const QuantConfig& quant);

// Greedy input-sharing packing for sparse matrices: columns are processed in
// ascending output index; a column joins the open tile when the union of its
// rows with the tile's rows fits in R and a physical column is free. Columns
// with more than R rows are split across dedicated tiles (time-multiplexed).
LayerTiling pack_sparse(const ConnectivityMatrix& pattern, const LevelMatrix& levels,
                        uint32_t layer, const ArchConfig& cfg, const QuantConfig& quant);

struct MpePlace {
    uint32_t nc = 0; // NeuroCell index
    uint32_t x = 0;  // grid coordinates within the NeuroCell
    uint32_t y = 0;
};

struct CextLink {
    uint32_t from_mpe = 0;
    uint32_t to_mpe = 0;
};

// A spill chain: the ordered mPEs holding one group's tiles; partial sums
// flow along the chain into the home (first) mPE.
struct SpillChain {
    uint32_t layer = 0;
    std::vector<uint32_t> mpes;
};

enum class RouteKind { Local, SharedSwitch, SameRow, SameCol, RowThenCol };

const char* route_kind_name(RouteKind k);

struct RouteEntry {
    RouteKind kind = RouteKind::Local;
    uint32_t hops = 0; // switch traversals
};

struct LayerInfo {
    LayerKind kind = LayerKind::Dense;
    uint32_t fan_in = 0;
    uint32_t fan_out = 0;
    double threshold = 1.0;
    double w_max = 0.0;
    double unit = 0.0; // w_max / (L-1)
};

struct MappingPlan {
    ArchConfig arch;
    QuantConfig quant;
    std::vector<LayerInfo> layers;
    std::vector<CrossbarTile> tiles;            // all layers, ids global
    std::vector<TimeMuxSchedule> schedules;     // per layer, entries use global tile ids
    std::vector<uint32_t> tile_mpe;             // tile id -> mPE id
    std::vector<MpePlace> mpes;                 // mPE id -> placement
    std::vector<std::vector<uint32_t>> neuron_home; // per layer, per output neuron
    std::vector<CextLink> cext_links;
    std::vector<SpillChain> chains;
    // Routing table for same-NC producer->consumer pairs, key = src * 2^32 | dst.
    std::unordered_map<uint64_t, RouteEntry> routes;
    // layer_bus_segment[l] is set when layer l's outputs reach layer l+1
    // through the SRAM/IO bus (some consumer lives in another NC).
    std::vector<uint8_t> layer_bus_segment;

    uint32_t mpes_used() const { return static_cast<uint32_t>(mpes.size()); }
    uint32_t ncs_used() const;
    uint32_t switches_used() const { return ncs_used() * arch.nc_grid_w * arch.nc_grid_h; }
    // NC tag (x, y) in the core's NC array.
    std::pair<uint32_t, uint32_t> nc_tag(uint32_t nc) const;

    static uint64_t route_key(uint32_t src, uint32_t dst)
    {
        return (uint64_t(src) << 32) | dst;
    }
};

// Places tiles onto mPEs/NeuroCells, assigns neuron homes, derives C_ext
// chains, routing tables and bus segments. Throws CapacityError when the
// configured core is too small.
MappingPlan assign_and_place(const std::vector<LayerInfo>& layer_info,
                             std::vector<LayerTiling> tilings, const ArchConfig& cfg,
                             const QuantConfig& quant);

// Full pipeline: connectivity -> quantize -> tile -> place.
MappingPlan compile_topology(const SnnTopology& topology, const ArchConfig& cfg,
                             const QuantConfig& quant);

struct UtilizationReport {
    struct TileFill {
        uint32_t tile = 0;
        uint32_t layer = 0;
        uint32_t rows_used = 0;
        uint32_t cols_used = 0; // physical columns
        double fill = 0.0;      // physical cross-points used / (R*C)
    };
    std::vector<TileFill> tiles;
    std::vector<double> layer_mean_fill;
    double mean_fill = 0.0;
    uint32_t total_tiles = 0;
    uint32_t total_mpes = 0;
    uint32_t total_ncs = 0;
};

UtilizationReport utilization(const MappingPlan& plan);

// Rebuilds each layer's signed-level matrix from the plan's tiles; the exact
// inverse of tiling (used by the coverage tests and plan verification).
std::vector<LevelMatrix> reconstruct_levels(const MappingPlan& plan);

} // namespace resparc
