// Global configuration file: TOML-style [section] key = value covering the
// quant/arch/energy/cmos sections. Missing keys keep their defaults; unknown
// keys are rejected.
#pragma once

#include <string>

#include "resparc/costmodel.hpp"
#include "resparc/mapper.hpp"
#include "resparc/quant.hpp"

namespace resparc {

struct FullConfig {
    QuantConfig quant;
    ArchConfig arch;
    EnergyConfig energy;
    CmosConfig cmos;

    void validate() const
    {
        quant.validate();
        arch.validate();
        energy.validate();
        cmos.validate();
    }
};

FullConfig parse_config_text(const std::string& text, const std::string& filename);
FullConfig load_config(const std::string& path);

} // namespace resparc
