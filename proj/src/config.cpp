#include "resparc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "resparc/errors.hpp"

namespace resparc {

namespace {

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& where)
{
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw InputError(where + ": expected a number, got '" + v + "'");
    return d;
}

uint32_t parse_u32(const std::string& v, const std::string& where)
{
    double d = parse_number(v, where);
    if (d < 0 || d != static_cast<double>(static_cast<uint64_t>(d)))
        throw InputError(where + ": expected a nonnegative integer, got '" + v + "'");
    return static_cast<uint32_t>(d);
}

std::string unquote(const std::string& v)
{
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

} // namespace

FullConfig parse_config_text(const std::string& text, const std::string& filename)
{
    FullConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = filename + ":" + std::to_string(lineno);
        if (size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InputError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "quant" && section != "arch" && section != "energy" &&
                section != "cmos")
                throw InputError(where + ": unknown section [" + section + "]");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = unquote(trim(line.substr(eq + 1)));

        if (section == "quant") {
            if (key == "bits")
                cfg.quant.bits = static_cast<int>(parse_u32(val, where));
            else if (key == "r_min")
                cfg.quant.r_min = parse_number(val, where);
            else if (key == "r_max")
                cfg.quant.r_max = parse_number(val, where);
            else if (key == "v_read")
                cfg.quant.v_read = parse_number(val, where);
            else if (key == "mode") {
                if (val == "differential")
                    cfg.quant.mode = SignedMode::Differential;
                else if (val == "unsigned")
                    cfg.quant.mode = SignedMode::Unsigned;
                else
                    throw InputError(where + ": mode must be differential or unsigned");
            } else
                throw InputError(where + ": unknown key '" + key + "' in [quant]");
        } else if (section == "arch") {
            if (key == "mca_rows")
                cfg.arch.mca_rows = parse_u32(val, where);
            else if (key == "mca_cols")
                cfg.arch.mca_cols = parse_u32(val, where);
            else if (key == "mcas_per_mpe")
                cfg.arch.mcas_per_mpe = parse_u32(val, where);
            else if (key == "nc_grid_w")
                cfg.arch.nc_grid_w = parse_u32(val, where);
            else if (key == "nc_grid_h")
                cfg.arch.nc_grid_h = parse_u32(val, where);
            else if (key == "num_neurocells")
                cfg.arch.num_neurocells = parse_u32(val, where);
            else if (key == "packet_width")
                cfg.arch.packet_width = parse_u32(val, where);
            else if (key == "buffer_depth")
                cfg.arch.buffer_depth = parse_u32(val, where);
            else
                throw InputError(where + ": unknown key '" + key + "' in [arch]");
        } else if (section == "energy") {
            if (key == "xbar_base")
                cfg.energy.xbar_base = parse_number(val, where);
            else if (key == "xbar_per_cell")
                cfg.energy.xbar_per_cell = parse_number(val, where);
            else if (key == "xbar_per_col")
                cfg.energy.xbar_per_col = parse_number(val, where);
            else if (key == "e_neuron_integrate")
                cfg.energy.e_neuron_integrate = parse_number(val, where);
            else if (key == "e_spike")
                cfg.energy.e_spike = parse_number(val, where);
            else if (key == "e_switch_hop")
                cfg.energy.e_switch_hop = parse_number(val, where);
            else if (key == "e_buffer_access")
                cfg.energy.e_buffer_access = parse_number(val, where);
            else if (key == "e_bus_broadcast")
                cfg.energy.e_bus_broadcast = parse_number(val, where);
            else if (key == "e_sram_read")
                cfg.energy.e_sram_read = parse_number(val, where);
            else if (key == "e_sram_write")
                cfg.energy.e_sram_write = parse_number(val, where);
            else if (key == "e_cext")
                cfg.energy.e_cext = parse_number(val, where);
            else if (key == "p_static_mpe")
                cfg.energy.p_static_mpe = parse_number(val, where);
            else if (key == "p_static_switch")
                cfg.energy.p_static_switch = parse_number(val, where);
            else if (key == "cycle_time")
                cfg.energy.cycle_time = parse_number(val, where);
            else
                throw InputError(where + ": unknown key '" + key + "' in [energy]");
        } else if (section == "cmos") {
            if (key == "e_mac")
                cfg.cmos.e_mac = parse_number(val, where);
            else if (key == "e_weight_fetch")
                cfg.cmos.e_weight_fetch = parse_number(val, where);
            else if (key == "e_buffer")
                cfg.cmos.e_buffer = parse_number(val, where);
            else if (key == "leakage_power")
                cfg.cmos.leakage_power = parse_number(val, where);
            else if (key == "cycle_time")
                cfg.cmos.cycle_time = parse_number(val, where);
            else if (key == "buffer_reuse_factor")
                cfg.cmos.buffer_reuse_factor = parse_number(val, where);
            else if (key == "macs_per_cycle")
                cfg.cmos.macs_per_cycle = parse_number(val, where);
            else if (key == "bits")
                cfg.cmos.bits = static_cast<int>(parse_u32(val, where));
            else
                throw InputError(where + ": unknown key '" + key + "' in [cmos]");
        } else {
            throw InputError(where + ": key outside any [section]");
        }
    }
    cfg.validate();
    return cfg;
}

FullConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace resparc
