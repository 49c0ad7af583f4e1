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

#include "ire/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ire/quadrature.hpp"

namespace ire
{
namespace
{

void require_positive(double v, const char *what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be positive and finite (got " << v << ")";
        throw std::invalid_argument(os.str());
    }
}

// OD per unit peak density; the integrand is linear in n0.
double optical_depth_per_density(const CloudSpec &cloud, const SpeciesConstants &species,
                                 const BeamMode &probe)
{
    const double w0 = probe.waist();
    const double zr = probe.rayleigh_range();
    const double r0 = cloud.sigma;
    const double pref = (2.0 / constants::pi) * 2.0 * constants::pi * species.cg_coefficient_sq *
                        species.cross_section;

    auto integrand = [&](double z) {
        const double w2 = w0 * w0 * (1.0 + (z * z) / (zr * zr));
        // int_0^inf r exp(-r^2/(2 r0^2)) exp(-2 r^2/w^2) dr
        const double radial = 1.0 / (2.0 * (1.0 / (2.0 * r0 * r0) + 2.0 / w2));
        return pref / w2 * std::exp(-(z * z) / (2.0 * r0 * r0)) * radial;
    };

    AdaptiveOptions opts;
    opts.rel_tol = 1e-12;
    const double half = 8.0 * r0;
    return integrate_adaptive(integrand, -half, half, opts);
}

} // namespace

void SpeciesConstants::validate() const
{
    require_positive(transition_wavelength, "species.wavelength");
    require_positive(cross_section, "species.sigma0");
    if (!(cg_coefficient_sq > 0.0 && cg_coefficient_sq <= 1.0))
        throw std::invalid_argument("species.cg_sq must lie in (0, 1]");
    if (!std::isfinite(detuning) || !std::isfinite(hyperfine_omega_sg))
        throw std::invalid_argument("species frequencies must be finite");
}

void CloudSpec::validate() const
{
    require_positive(peak_density, "cloud.n0");
    require_positive(sigma, "cloud.r0");
    require_positive(temperature, "cloud.temperature");
    require_positive(atom_mass, "cloud.atom_mass");
    if (atom_count_override && *atom_count_override == 0)
        throw std::invalid_argument("cloud.n_atoms_override must be at least 1");
    if (!atom_count_override && physical_atom_count() < 1)
        throw std::invalid_argument("cloud implies fewer than one atom");
}

std::uint64_t CloudSpec::physical_atom_count() const
{
    const double n = peak_density * std::pow(constants::two_pi, 1.5) * sigma * sigma * sigma;
    return static_cast<std::uint64_t>(std::llround(n));
}

std::uint64_t CloudSpec::atom_count() const
{
    return atom_count_override ? *atom_count_override : physical_atom_count();
}

double CloudSpec::velocity_sigma() const
{
    return std::sqrt(constants::boltzmann * temperature / atom_mass);
}

AtomStream::AtomStream(const CloudSpec &cloud, std::uint64_t seed)
    : seed_(seed), count_(cloud.atom_count()), sigma_(cloud.sigma),
      velocity_sigma_(cloud.velocity_sigma())
{
}

double AtomStream::radial_threshold(double rho) const
{
    return std::exp(-(rho * rho) / (2.0 * sigma_ * sigma_));
}

double AtomStream::radial_squared(const UniformPair &transverse) const
{
    return -2.0 * sigma_ * sigma_ * std::log(transverse.first);
}

double AtomStream::axial_position(const UniformPair &axial) const
{
    return sigma_ * std::sqrt(-2.0 * std::log(axial.first)) * std::cos(constants::two_pi * axial.second);
}

AtomSample AtomStream::complete(std::uint64_t index, const UniformPair &transverse, const UniformPair &b1) const
{
    constexpr double two_pi = constants::two_pi;
    AtomSample a;

    const double rho = sigma_ * std::sqrt(-2.0 * std::log(transverse.first));
    const double ang = two_pi * transverse.second;
    a.r_initial.x = rho * std::cos(ang);
    a.r_initial.y = rho * std::sin(ang);

    const double g1 = std::sqrt(-2.0 * std::log(b1.first));
    a.r_initial.z = sigma_ * g1 * std::cos(two_pi * b1.second);
    a.velocity.x = velocity_sigma_ * g1 * std::sin(two_pi * b1.second);

    const UniformPair b2 = uniform_pair(seed_, index, 2);
    const double g2 = std::sqrt(-2.0 * std::log(b2.first));
    a.velocity.y = velocity_sigma_ * g2 * std::cos(two_pi * b2.second);
    a.velocity.z = velocity_sigma_ * g2 * std::sin(two_pi * b2.second);

    a.r_drifted = a.r_initial;
    return a;
}

AtomSample sample_atom(const CloudSpec &cloud, std::uint64_t seed, std::uint64_t index)
{
    return AtomStream(cloud, seed).sample(index);
}

std::vector<AtomSample> sample_atoms(const CloudSpec &cloud, std::uint64_t seed,
                                     std::uint64_t chunk_index, std::uint64_t chunk_size)
{
    const AtomStream stream(cloud, seed);
    const std::uint64_t n = stream.size();
    std::vector<AtomSample> out;
    if (chunk_size == 0 || chunk_index >= (n + chunk_size - 1) / chunk_size)
        return out;
    const std::uint64_t begin = chunk_index * chunk_size;
    const std::uint64_t end = std::min(n, begin + chunk_size);
    out.reserve(end - begin);
    for (std::uint64_t i = begin; i < end; ++i)
        out.push_back(stream.sample(i));
    return out;
}

AtomSample drift(const AtomSample &sample, double t_m)
{
    if (t_m < 0.0)
        throw std::invalid_argument("drift: storage time must be non-negative");
    AtomSample out = sample;
    out.r_drifted = sample.r_initial + sample.velocity * t_m;
    return out;
}

double optical_depth(const CloudSpec &cloud, const SpeciesConstants &species, const BeamMode &probe)
{
    require_positive(cloud.peak_density, "cloud.n0");
    require_positive(cloud.sigma, "cloud.r0");
    species.validate();
    return cloud.peak_density * optical_depth_per_density(cloud, species, probe);
}

double density_for_od(double target_od, const CloudSpec &cloud_template,
                      const SpeciesConstants &species, const BeamMode &probe)
{
    if (!(target_od > 0.0) || !std::isfinite(target_od))
        throw std::domain_error("density_for_od: target OD must be positive");
    require_positive(cloud_template.sigma, "cloud.r0");
    species.validate();
    return target_od / optical_depth_per_density(cloud_template, species, probe);
}

} // namespace ire
