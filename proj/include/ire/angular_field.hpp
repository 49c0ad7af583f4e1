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

#ifndef IRE_ANGULAR_FIELD_HPP
#define IRE_ANGULAR_FIELD_HPP

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ire/retrieval.hpp"
#include "ire/vec3.hpp"

namespace ire
{

struct GridSpec
{
    int cap_nodes = 256;   // Gauss-Legendre in theta on the backward cap
    int rest_nodes = 256;  // Gauss-Legendre in cos(theta) elsewhere
    int phi_nodes = 256;   // uniform
    double cap_multiplier = 20.0; // cap half-width in units of 1/(k_i W_i)
};

// Product grid stored ring by ring: node (r, l) sits at (theta[r], phi[l])
// with weight ring_weight[r] * phi_weight.
struct AngularGrid
{
    GridSpec spec;
    double cap_half_width = 0.0;
    double k = 0.0;
    double waist = 0.0;
    std::vector<double> theta;       // ascending
    std::vector<double> ring_weight; // integrates sin(theta) d(theta)
    std::vector<double> phi;
    double phi_weight = 0.0;

    std::size_t rings() const { return theta.size(); }
    std::size_t size() const { return theta.size() * phi.size(); }
    double weight(std::size_t node) const { return ring_weight[node / phi.size()] * phi_weight; }
    double total_weight() const;
};

// Rejects node counts that leave fewer than 10 cap nodes per angular width
// 2/(k W) or a cap narrower than 12/(k W).
AngularGrid build_grid(double k_i, double w_i, const GridSpec &spec = {});

struct AngularField
{
    std::vector<std::complex<double>> values;
    bool normalized = false;
};

// One source term of the emitted idler field: amplitude already includes the
// read-beam phase and the isotropic (4 pi)^{-1/2} factor.
struct Emitter
{
    std::complex<double> amplitude;
    Vec3 position;
};

struct EmitterSet
{
    std::vector<Emitter> emitters;
    double s2 = 0.0; // sum_j |A_j|^2, compensated
    std::uint64_t n_atoms = 0;
    std::uint64_t seed = 0;
};

// Same atom sample and transverse cutoff as eta_paraxial().
EmitterSet collect_emitters(const Scenario &scenario, const EstimatorOptions &opts = {});

// Explicit atoms (drift already applied).
EmitterSet emitters_from_atoms(const std::vector<AtomSample> &atoms, const Scenario &scenario);

// F(theta, phi) = sum_j b_j exp(-i k_i khat . r'_j), parallel over nodes with
// the emitter sum in input order.
AngularField angular_kernel(const EmitterSet &emitters, const Scenario &scenario,
                            const AngularGrid &grid, unsigned threads = 1);

double sphere_norm(const AngularField &field, const AngularGrid &grid);

// Throws std::domain_error for an all-zero field.
AngularField normalize(const AngularField &field, const AngularGrid &grid);

enum class FiberPointing
{
    backward,
    forward
};

// exp(-(k W sin theta)^2/4) on one hemisphere, scaled to unit grid norm.
std::vector<double> fiber_mode(const AngularGrid &grid, FiberPointing pointing = FiberPointing::backward);

// eta = |<g|F>|^2 / ||F||^2 on the grid. The field may be raw or normalized;
// s2 is carried through for the norm-reconciliation check.
EtaEstimate eta_reference(const AngularField &field, const AngularGrid &grid, const BeamMode &idler,
                          double s2, FiberPointing pointing = FiberPointing::backward);

struct AngularResult
{
    EtaEstimate estimate;
    AngularGrid grid;
    AngularField field; // unnormalized
};

AngularResult eta_angular(const Scenario &scenario, const GridSpec &grid_spec = {},
                          const EstimatorOptions &opts = {});

struct RasterSpec
{
    int theta_cells = 512;
    int phi_cells = 512;
    int cap_theta_cells = 256;
    int cap_phi_cells = 256;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Writes <base>.csv (full sphere), <base>_cap.csv (backward cap) and
// <base>.meta. The field must be normalized.
void export_heatmap(const AngularField &field, const AngularGrid &grid, const Metadata &metadata,
                    const std::filesystem::path &base, const RasterSpec &raster = {});

void write_metadata(const std::filesystem::path &path, const Metadata &metadata);

} // namespace ire

#endif // IRE_ANGULAR_FIELD_HPP
