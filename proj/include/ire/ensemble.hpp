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

#ifndef IRE_ENSEMBLE_HPP
#define IRE_ENSEMBLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ire/beam_optics.hpp"
#include "ire/constants.hpp"
#include "ire/philox.hpp"
#include "ire/vec3.hpp"

namespace ire
{

struct SpeciesConstants
{
    double transition_wavelength = constants::rb87_d1_wavelength; // m
    double detuning = constants::default_detuning;                // Delta, rad/s
    double hyperfine_omega_sg = constants::rb87_hyperfine_splitting; // rad/s, signed
    double cross_section = constants::rb87_d1_cross_section;     // m^2
    double cg_coefficient_sq = 1.0;

    void validate() const;
};

// Isotropic Gaussian cloud with Maxwell-Boltzmann velocities.
struct CloudSpec
{
    double peak_density = 1e17;   // atoms/m^3
    double sigma = 0.75e-3;       // m, per-axis standard deviation
    double temperature = 30e-6;   // K
    double atom_mass = constants::rb87_mass; // kg
    // Non-physical: replaces the density-implied atom count. Meant for
    // small-instance oracle comparisons only.
    std::optional<std::uint64_t> atom_count_override;

    void validate() const;

    // round(n0 (2 pi)^{3/2} r0^3) unless overridden.
    std::uint64_t atom_count() const;
    std::uint64_t physical_atom_count() const;
    double velocity_sigma() const;
};

struct AtomSample
{
    Vec3 r_initial;
    Vec3 velocity;
    Vec3 r_drifted;
};

// Index-keyed generation. Atom i draws three Philox blocks under key = seed:
// block 0 gives the transverse position, block 1 gives z and v_x, block 2 gives
// v_y and v_z, each through one Box-Muller pair.
class AtomStream
{
public:
    AtomStream(const CloudSpec &cloud, std::uint64_t seed);

    std::uint64_t size() const { return count_; }

    UniformPair transverse_draw(std::uint64_t index) const { return uniform_pair(seed_, index, 0); }

    // An atom lies within radius rho of the z axis iff its radial uniform is
    // at least this value (the Box-Muller radius is monotone in that draw).
    double radial_threshold(double rho) const;

    double radial_squared(const UniformPair &transverse) const;

    UniformPair axial_draw(std::uint64_t index) const { return uniform_pair(seed_, index, 1); }
    double axial_position(const UniformPair &axial) const;

    AtomSample complete(std::uint64_t index, const UniformPair &transverse, const UniformPair &axial) const;
    AtomSample complete(std::uint64_t index, const UniformPair &transverse) const
    {
        return complete(index, transverse, axial_draw(index));
    }
    AtomSample sample(std::uint64_t index) const { return complete(index, transverse_draw(index)); }

private:
    std::uint64_t seed_;
    std::uint64_t count_;
    double sigma_;
    double velocity_sigma_;
};

AtomSample sample_atom(const CloudSpec &cloud, std::uint64_t seed, std::uint64_t index);

// Atoms [chunk_index*chunk_size, ...) clipped to the cloud's atom count.
std::vector<AtomSample> sample_atoms(const CloudSpec &cloud, std::uint64_t seed,
                                     std::uint64_t chunk_index, std::uint64_t chunk_size);

AtomSample drift(const AtomSample &sample, double t_m);

// Optical depth of the cloud seen by a Gaussian probe focused at the cloud
// centre, by nested quadrature (closed-form radial integral, adaptive z).
double optical_depth(const CloudSpec &cloud, const SpeciesConstants &species, const BeamMode &probe);

// Peak density that makes optical_depth() equal target_od; other fields of
// the template are kept.
double density_for_od(double target_od, const CloudSpec &cloud_template,
                      const SpeciesConstants &species, const BeamMode &probe);

} // namespace ire

#endif // IRE_ENSEMBLE_HPP
