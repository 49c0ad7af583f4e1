// Copyright 2026 The ire-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IRE_CONFIG_HPP
#define IRE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ire/angular_field.hpp"
#include "ire/retrieval.hpp"

namespace ire
{

// A rejected document: key path (block.key, or the block name) and a remedy.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string key, const std::string &problem, std::string hint);

    const std::string &key() const { return key_; }
    const std::string &hint() const { return hint_; }

private:
    std::string key_;
    std::string hint_;
};

enum class DensityKind
{
    peak_density, // cloud.n0_m3
    target_od,    // cloud.target_od
    atom_count    // cloud.n_atoms_override
};

// Interface units as written in the document (nm, Hz, degrees, microseconds).
struct RunConfig
{
    // [species]
    double wavelength_nm = 795.0;
    double delta_over_2pi_hz = 10e6;
    double omega_sg_over_2pi_hz = -6.8e9;
    double sigma0_m2 = 1.082e-13;
    double cg_sq = 1.0;
    double atom_mass_amu = 87.0;
    // [cloud]
    double r0_m = 0.75e-3;
    double temperature_k = 30e-6;
    DensityKind density_kind = DensityKind::target_od;
    double density_value = 24.7;
    // [beams]
    double w_write_m = 60e-6;
    double w_signal_m = 35e-6;
    double w_idler_m = 35e-6;
    // [run]
    double theta_deg = 0.0;
    double tm_us = 0.0;
    std::uint64_t seed = 1;
    Method method = Method::paraxial;
    Normalization normalization = Normalization::modal;
    int mode_order = 4;
    GridSpec grid;
};

RunConfig parse_config_text(const std::string &text);
RunConfig parse_config_file(const std::filesystem::path &path);

// Canonical document that parses back to the same RunConfig.
std::string to_config_text(const RunConfig &config);

struct ResolvedRun
{
    RunConfig config;
    Scenario scenario;
    double peak_density = 0.0; // m^-3
    double optical_depth = 0.0;
    double width_ratio = 0.0;  // W_i / W_w
    std::uint64_t n_atoms = 0;
    Metadata report;           // derived quantities, flat key/value
};

// Throws ConfigError for paraxiality and range violations.
ResolvedRun resolve(const RunConfig &config);

EstimatorOptions estimator_options(const RunConfig &config, unsigned threads);

} // namespace ire

#endif // IRE_CONFIG_HPP
