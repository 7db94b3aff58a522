// File formats: topology JSON (+ sidecar float32 weight blobs), mapping-plan
// JSON, RFC-4180 CSV emitters, spike-train CSV, and static SVG charts.
#pragma once

#include <string>
#include <vector>

#include "resparc/archsim.hpp"
#include "resparc/mapper.hpp"
#include "resparc/snn.hpp"

namespace resparc {

// Topology JSON: {"layers": [...], "weights": {"inline": [[...]]}} or
// {"weights": {"file": "relative/path.bin"}}. The sidecar holds one blob per
// layer: two little-endian uint32 dims then rows*cols little-endian float32
// values in row-major (input-major) order.
SnnTopology load_topology(const std::string& json_path);
void save_topology(const SnnTopology& topology, const std::string& json_path,
                   const std::string& sidecar_name); // empty -> inline weights

// Reads a standalone sidecar blob (one dims+data record per layer).
std::vector<WeightMatrix> load_weights_file(const std::string& path, size_t nlayers);

MappingPlan load_plan(const std::string& path);
void save_plan(const MappingPlan& plan, const std::string& path);

// RFC-4180 CSV (CRLF line endings, minimal quoting).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void row(const std::vector<std::string>& fields);

private:
    void* out_;
};

std::string csv_num(double v);
std::string csv_num(uint64_t v);

void write_counters_csv(const SimCounters& c, const std::string& path);
void write_spike_csv(const SpikeTrain& train, const std::string& path);
void write_utilization_csv(const UtilizationReport& rep, const std::string& path);

// Static SVG 1.1 grouped/stacked bar chart; a pure function of its inputs.
struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<double> values; // one per category
};
void write_svg_bars(const std::string& path, const std::string& title,
                    const std::vector<std::string>& categories,
                    const std::vector<SvgSeries>& series, bool stacked);

} // namespace resparc
