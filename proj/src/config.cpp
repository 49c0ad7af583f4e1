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

#include "ire/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "ire/constants.hpp"

namespace ire
{
namespace
{

namespace pt = boost::property_tree;

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double to_number(const std::string &key, const std::string &text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ConfigError(key, "expected a finite number, got '" + text + "'", "write a decimal value such as 1.5e-6");
    return v;
}

std::uint64_t to_unsigned(const std::string &key, const std::string &text)
{
    std::size_t used = 0;
    unsigned long long v = 0;
    const bool negative = !text.empty() && text.front() == '-';
    try {
        v = std::stoull(text, &used, 10);
    } catch (const std::exception &) {
        used = 0;
    }
    if (negative || used == 0 || used != text.size())
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'", "write digits only, e.g. 42");
    return v;
}

int to_int(const std::string &key, const std::string &text)
{
    const std::uint64_t v = to_unsigned(key, text);
    if (v > 1000000)
        throw ConfigError(key, "value " + text + " is out of range", "use a value below 1e6");
    return static_cast<int>(v);
}

using Setter = std::function<void(RunConfig &, const std::string &key, const std::string &value)>;
using Block = std::vector<std::pair<std::string, Setter>>;

Setter number(double RunConfig::*field)
{
    return [field](RunConfig &c, const std::string &k, const std::string &v) { c.*field = to_number(k, v); };
}

Setter density(DensityKind kind)
{
    return [kind](RunConfig &c, const std::string &k, const std::string &v) {
        c.density_kind = kind;
        c.density_value = kind == DensityKind::atom_count ? static_cast<double>(to_unsigned(k, v)) : to_number(k, v);
    };
}

const std::map<std::string, Block> &schema()
{
    static const std::map<std::string, Block> s = {
        {"species",
         {{"wavelength_nm", number(&RunConfig::wavelength_nm)},
          {"delta_over_2pi_hz", number(&RunConfig::delta_over_2pi_hz)},
          {"omega_sg_over_2pi_hz", number(&RunConfig::omega_sg_over_2pi_hz)},
          {"sigma0_m2", number(&RunConfig::sigma0_m2)},
          {"cg_sq", number(&RunConfig::cg_sq)},
          {"atom_mass_amu", number(&RunConfig::atom_mass_amu)}}},
        {"cloud",
         {{"r0_m", number(&RunConfig::r0_m)},
          {"temperature_k", number(&RunConfig::temperature_k)},
          {"n0_m3", density(DensityKind::peak_density)},
          {"target_od", density(DensityKind::target_od)},
          {"n_atoms_override", density(DensityKind::atom_count)}}},
        {"beams",
         {{"w_write_m", number(&RunConfig::w_write_m)},
          {"w_signal_m", number(&RunConfig::w_signal_m)},
          {"w_idler_m", number(&RunConfig::w_idler_m)}}},
        {"run",
         {{"theta_deg", number(&RunConfig::theta_deg)},
          {"tm_us", number(&RunConfig::tm_us)},
          {"seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.seed = to_unsigned(k, v); }},
          {"method",
           [](RunConfig &c, const std::string &k, const std::string &v) {
               try {
                   c.method = parse_method(v);
               } catch (const std::invalid_argument &e) {
                   throw ConfigError(k, e.what(), "use paraxial or angular");
               }
           }},
          {"normalization",
           [](RunConfig &c, const std::string &k, const std::string &v) {
               if (v == "modal")
                   c.normalization = Normalization::modal;
               else if (v == "incoherent")
                   c.normalization = Normalization::incoherent;
               else
                   throw ConfigError(k, "unknown normalization '" + v + "'", "use modal or incoherent");
           }},
          {"mode_order", [](RunConfig &c, const std::string &k, const std::string &v) { c.mode_order = to_int(k, v); }},
          {"grid_cap_nodes",
           [](RunConfig &c, const std::string &k, const std::string &v) { c.grid.cap_nodes = to_int(k, v); }},
          {"grid_rest_nodes",
           [](RunConfig &c, const std::string &k, const std::string &v) { c.grid.rest_nodes = to_int(k, v); }},
          {"grid_phi_nodes",
           [](RunConfig &c, const std::string &k, const std::string &v) { c.grid.phi_nodes = to_int(k, v); }},
          {"grid_cap_multiplier",
           [](RunConfig &c, const std::string &k, const std::string &v) { c.grid.cap_multiplier = to_number(k, v); }}}},
    };
    return s;
}

std::string key_list(const Block &block)
{
    std::string out;
    for (const auto &[name, setter] : block)
        out += (out.empty() ? "" : ", ") + name;
    return out;
}

void require_positive(const std::string &key, double v)
{
    if (!(v > 0.0))
        throw ConfigError(key, "must be positive (got " + g9(v) + ")", "give a value greater than zero");
}

} // namespace

ConfigError::ConfigError(std::string key, const std::string &problem, std::string hint)
    : std::runtime_error(key + ": " + problem + " (hint: " + hint + ")"), key_(std::move(key)),
      hint_(std::move(hint))
{
}

RunConfig parse_config_text(const std::string &text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError("<document>", "line " + std::to_string(e.line()) + ": " + e.message(),
                          "use '[block]' headers and 'key = value' lines; comments start with ';' or '#'");
    }

    RunConfig cfg;
    const auto &blocks = schema();
    for (const auto &[name, node] : tree) {
        if (node.empty() && !node.data().empty())
            throw ConfigError(name, "key outside any block", "move it under one of [species], [cloud], [beams], [run]");
        if (blocks.find(name) == blocks.end())
            throw ConfigError(name, "unknown block", "valid blocks are species, cloud, beams, run");
    }
    for (const auto &[name, block] : blocks)
        if (tree.find(name) == tree.not_found())
            throw ConfigError(name, "missing block [" + name + "]",
                              "add a [" + name + "] header (keys inside it may be omitted to use defaults)");

    int density_specs = 0;
    std::string density_keys;
    for (const auto &[name, block] : blocks) {
        for (const auto &[key, node] : tree.get_child(name)) {
            const std::string path = name + "." + key;
            const auto it = std::find_if(block.begin(), block.end(), [&](const auto &e) { return e.first == key; });
            if (it == block.end())
                throw ConfigError(path, "unknown key", "valid keys in [" + name + "] are " + key_list(block));
            it->second(cfg, path, node.data());
            if (name == "cloud" && (key == "n0_m3" || key == "target_od" || key == "n_atoms_override")) {
                ++density_specs;
                density_keys += (density_keys.empty() ? "" : ", ") + path;
            }
        }
    }
    if (density_specs == 0)
        throw ConfigError("cloud", "no density specifier", "set exactly one of n0_m3, target_od, n_atoms_override");
    if (density_specs > 1)
        throw ConfigError("cloud", "conflicting density specifiers (" + density_keys + ")",
                          "keep exactly one of n0_m3, target_od, n_atoms_override");
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<document>", "cannot read '" + path.string() + "'", "check the --config path");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string to_config_text(const RunConfig &c)
{
    std::ostringstream os;
    os << "[species]\n"
       << "wavelength_nm = " << g17(c.wavelength_nm) << '\n'
       << "delta_over_2pi_hz = " << g17(c.delta_over_2pi_hz) << '\n'
       << "omega_sg_over_2pi_hz = " << g17(c.omega_sg_over_2pi_hz) << '\n'
       << "sigma0_m2 = " << g17(c.sigma0_m2) << '\n'
       << "cg_sq = " << g17(c.cg_sq) << '\n'
       << "atom_mass_amu = " << g17(c.atom_mass_amu) << "\n\n"
       << "[cloud]\n"
       << "r0_m = " << g17(c.r0_m) << '\n'
       << "temperature_k = " << g17(c.temperature_k) << '\n';
    switch (c.density_kind) {
    case DensityKind::peak_density:
        os << "n0_m3 = " << g17(c.density_value) << '\n';
        break;
    case DensityKind::target_od:
        os << "target_od = " << g17(c.density_value) << '\n';
        break;
    case DensityKind::atom_count:
        os << "n_atoms_override = " << static_cast<std::uint64_t>(c.density_value) << '\n';
        break;
    }
    os << "\n[beams]\n"
       << "w_write_m = " << g17(c.w_write_m) << '\n'
       << "w_signal_m = " << g17(c.w_signal_m) << '\n'
       << "w_idler_m = " << g17(c.w_idler_m) << "\n\n"
       << "[run]\n"
       << "theta_deg = " << g17(c.theta_deg) << '\n'
       << "tm_us = " << g17(c.tm_us) << '\n'
       << "seed = " << c.seed << '\n'
       << "method = " << to_string(c.method) << '\n'
       << "normalization = " << (c.normalization == Normalization::modal ? "modal" : "incoherent") << '\n'
       << "mode_order = " << c.mode_order << '\n'
       << "grid_cap_nodes = " << c.grid.cap_nodes << '\n'
       << "grid_rest_nodes = " << c.grid.rest_nodes << '\n'
       << "grid_phi_nodes = " << c.grid.phi_nodes << '\n'
       << "grid_cap_multiplier = " << g17(c.grid.cap_multiplier) << '\n';
    return os.str();
}

ResolvedRun resolve(const RunConfig &c)
{
    require_positive("species.wavelength_nm", c.wavelength_nm);
    require_positive("species.sigma0_m2", c.sigma0_m2);
    require_positive("species.atom_mass_amu", c.atom_mass_amu);
    if (!(c.cg_sq > 0.0 && c.cg_sq <= 1.0))
        throw ConfigError("species.cg_sq", "must lie in (0, 1] (got " + g9(c.cg_sq) + ")", "squared Clebsch-Gordan factors do not exceed 1");
    require_positive("cloud.r0_m", c.r0_m);
    require_positive("cloud.temperature_k", c.temperature_k);
    require_positive("beams.w_write_m", c.w_write_m);
    require_positive("beams.w_signal_m", c.w_signal_m);
    require_positive("beams.w_idler_m", c.w_idler_m);
    if (!(std::abs(c.theta_deg) < 90.0))
        throw ConfigError("run.theta_deg", "|theta_deg| must be below 90 (got " + g9(c.theta_deg) + ")", "give the skew angle in degrees");
    if (!(c.tm_us >= 0.0))
        throw ConfigError("run.tm_us", "must be non-negative (got " + g9(c.tm_us) + ")", "give the storage time in microseconds");
    if (c.mode_order > 40)
        throw ConfigError("run.mode_order", "must not exceed 40", "orders near 8 are converged");

    SpeciesConstants species;
    species.transition_wavelength = c.wavelength_nm * 1e-9;
    species.detuning = constants::two_pi * c.delta_over_2pi_hz;
    species.hyperfine_omega_sg = constants::two_pi * c.omega_sg_over_2pi_hz;
    species.cross_section = c.sigma0_m2;
    species.cg_coefficient_sq = c.cg_sq;

    CloudSpec cloud;
    cloud.sigma = c.r0_m;
    cloud.temperature = c.temperature_k;
    cloud.atom_mass = c.atom_mass_amu * constants::atomic_mass_unit;

    const Wavenumbers k = wavenumbers(species);
    auto paraxial = [&](const char *key, double w, double kk) {
        if (kk * w < kMinParaxialProduct)
            throw ConfigError(key, "k*w0 = " + g9(kk * w) + " is below the paraxial limit " + g9(kMinParaxialProduct),
                              "use a waist of at least " + g9(kMinParaxialProduct / kk) + " m");
    };
    paraxial("beams.w_write_m", c.w_write_m, k.write);
    paraxial("beams.w_signal_m", c.w_signal_m, k.signal);
    paraxial("beams.w_idler_m", c.w_idler_m, k.idler);
    const BeamMode probe(c.w_write_m, k.write);

    const double volume = std::pow(constants::two_pi, 1.5) * c.r0_m * c.r0_m * c.r0_m;
    switch (c.density_kind) {
    case DensityKind::peak_density:
        require_positive("cloud.n0_m3", c.density_value);
        cloud.peak_density = c.density_value;
        break;
    case DensityKind::target_od:
        require_positive("cloud.target_od", c.density_value);
        cloud.peak_density = density_for_od(c.density_value, cloud, species, probe);
        break;
    case DensityKind::atom_count:
        if (!(c.density_value >= 1.0))
            throw ConfigError("cloud.n_atoms_override", "must be at least 1", "give a positive atom count");
        cloud.atom_count_override = static_cast<std::uint64_t>(c.density_value);
        cloud.peak_density = c.density_value / volume;
        break;
    }
    if (cloud.atom_count() < 1)
        throw ConfigError("cloud", "density and r0_m imply fewer than one atom", "raise the density or the cloud size");

    ResolvedRun out{c,
                    make_scenario(species, cloud, c.w_write_m, c.w_signal_m, c.w_idler_m,
                                  c.theta_deg * constants::pi / 180.0, c.tm_us * 1e-6, c.seed),
                    cloud.peak_density,
                    optical_depth(cloud, species, probe),
                    c.w_idler_m / c.w_write_m,
                    cloud.atom_count(),
                    {}};

    const double vs = cloud.velocity_sigma();
    out.report = {
        {"resolved.k_write_rad_per_m", g9(k.write)},
        {"resolved.k_signal_rad_per_m", g9(k.signal)},
        {"resolved.k_read_rad_per_m", g9(k.read)},
        {"resolved.k_idler_rad_per_m", g9(k.idler)},
        {"resolved.residual_mismatch_rad_per_m", g9(k.residual_mismatch())},
        {"resolved.n0_m3", g9(out.peak_density)},
        {"resolved.optical_depth", g9(out.optical_depth)},
        {"resolved.n_atoms", std::to_string(out.n_atoms)},
        {"resolved.n_atoms_physical", std::to_string(cloud.physical_atom_count())},
        {"resolved.width_ratio", g9(out.width_ratio)},
        {"resolved.velocity_sigma_m_per_s", g9(vs)},
        {"resolved.most_probable_speed_m_per_s", g9(std::sqrt(2.0) * vs)},
        {"resolved.rayleigh_write_m", g9(out.scenario.write.rayleigh_range())},
        {"resolved.rayleigh_signal_m", g9(out.scenario.signal.rayleigh_range())},
        {"resolved.rayleigh_idler_m", g9(out.scenario.idler.rayleigh_range())},
        {"resolved.theta_rad", g9(out.scenario.skew_theta)},
        {"resolved.tm_s", g9(out.scenario.storage_time)},
    };
    return out;
}

EstimatorOptions estimator_options(const RunConfig &config, unsigned threads)
{
    EstimatorOptions o;
    o.normalization = config.normalization;
    o.mode_order = config.mode_order;
    o.threads = threads;
    return o;
}

} // namespace ire
