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

#ifndef IRE_RETRIEVAL_HPP
#define IRE_RETRIEVAL_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ire/beam_optics.hpp"
#include "ire/ensemble.hpp"

namespace ire
{

struct Wavenumbers
{
    double write = 0.0;
    double signal = 0.0;
    double read = 0.0;
    double idler = 0.0;

    // (k_w - k_s) + (k_i - k_r)
    double residual_mismatch() const { return (write - signal) + (idler - read); }
};

Wavenumbers wavenumbers(const SpeciesConstants &species);

// Write beam on the skewed axis; signal (forward) and idler (backward) fiber
// modes on the lab axis. The read beam is a plane wave along the skewed -z axis.
struct Scenario
{
    SpeciesConstants species;
    CloudSpec cloud;
    Wavenumbers k;
    BeamMode write;
    BeamMode signal;
    BeamMode idler;
    double skew_theta = 0.0;   // rad
    double storage_time = 0.0; // s
    std::uint64_t seed = 1;
};

Scenario make_scenario(const SpeciesConstants &species, const CloudSpec &cloud, double write_waist,
                       double signal_waist, double idler_waist, double skew_theta,
                       double storage_time, std::uint64_t seed);

// Throws std::invalid_argument naming the offending field.
void validate(const Scenario &scenario);

// Spin-wave amplitude left on atom j by the write pulse (uses r_initial).
std::complex<double> spinwave_amplitude(const AtomSample &atom, const Scenario &scenario);

// Paraxial overlap of one drifted atom's read-out emission with the idler
// fiber mode (uses r_drifted).
std::complex<double> idler_projection(const AtomSample &atom, const Scenario &scenario);

// Same, onto the Hermite-Gauss mode (m, n) of the idler fiber's waist;
// (0, 0) equals idler_projection().
std::complex<double> idler_mode_projection(const AtomSample &atom, const Scenario &scenario,
                                           int m, int n);

// Single-atom value of |idler_projection|^2 at the origin: 2/(k_i W_i)^2.
double projection_calibration(const Scenario &scenario);

enum class Method
{
    paraxial,
    angular
};

std::string to_string(Method m);
Method parse_method(const std::string &s);

// How the collective emission norm is obtained for the denominator.
enum class Normalization
{
    // Sum_j |A_j|^2 plus the coherent cross-terms projected onto idler-waist
    // Hermite-Gauss modes up to mode_order.
    modal,
    // Sum_j |A_j|^2 only.
    incoherent
};

struct EtaEstimate
{
    double eta = 0.0;
    double numerator = 0.0;   // |sum_j A_j P_j|^2
    double denominator = 0.0; // emitted-photon norm, s2 + coherent_norm
    double s2 = 0.0;          // sum_j |A_j|^2
    double coherent_norm = 0.0;
    std::uint64_t n_atoms = 0;
    std::uint64_t n_contributing = 0; // atoms inside the transverse cutoff
    Method method = Method::paraxial;
    std::uint64_t seed = 0;
};

struct EstimatorOptions
{
    Normalization normalization = Normalization::modal;
    int mode_order = 4;
    std::uint64_t chunk_size = std::uint64_t{1} << 20;
    unsigned threads = 1;
    // Atoms farther from the z axis than this many local signal spot sizes
    // w_s(z) are skipped; they carry |A|^2 below exp(-2 cutoff_spots^2).
    double cutoff_spots = 4.5;
    bool transverse_cutoff = true;
};

EtaEstimate eta_paraxial(const Scenario &scenario, const EstimatorOptions &opts = {});

// One pass over the shared atom sample for several scenarios that differ only
// in beams, skew angle and storage time. Results are bit-identical to separate
// eta_paraxial() calls.
std::vector<EtaEstimate> eta_paraxial_batch(const std::vector<Scenario> &scenarios,
                                            const EstimatorOptions &opts = {});

// Which atoms a scenario's estimators visit. A coarse test on the radial
// uniform (cut radius at |z| = 6 r0) runs before any further draw; the fine
// test compares rho^2 with the local spot.
struct AtomFilter
{
    bool enabled = false;
    double radial_threshold = 0.0; // minimum radial uniform
    double cut2 = 0.0;             // (cutoff_spots W_s)^2
    double rayleigh2 = 1.0;        // z_s^2

    bool coarse(double radial_uniform) const { return !enabled || radial_uniform >= radial_threshold; }
    bool fine(double rho2, double z) const { return !enabled || rho2 <= cut2 * (1.0 + z * z / rayleigh2); }
};

AtomFilter atom_filter(const Scenario &scenario, const EstimatorOptions &opts);

} // namespace ire

#endif // IRE_RETRIEVAL_HPP
