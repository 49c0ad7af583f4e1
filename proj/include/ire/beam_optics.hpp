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

#ifndef IRE_BEAM_OPTICS_HPP
#define IRE_BEAM_OPTICS_HPP

#include <complex>

#include "ire/vec3.hpp"

namespace ire
{

enum class Direction
{
    plus_z,
    minus_z
};

// Whether a mode is defined on the lab axis (signal/idler fibers) or on the
// axis rotated about x by the skew angle (write/read beams).
enum class Frame
{
    lab,
    skewed
};

// Minimum k*w0 accepted at construction; every closed form in this library
// relies on the paraxial limit.
inline constexpr double kMinParaxialProduct = 50.0;

// One fundamental Gaussian beam or fiber mode.
class BeamMode
{
public:
    BeamMode(double waist_m, double wavenumber, Direction direction = Direction::plus_z,
             Frame frame = Frame::lab, double peak_amplitude = 1.0);

    double waist() const { return waist_; }
    double wavenumber() const { return wavenumber_; }
    Direction direction() const { return direction_; }
    Frame frame() const { return frame_; }
    double peak_amplitude() const { return peak_amplitude_; }

    // k*w0^2/2
    double rayleigh_range() const { return rayleigh_; }

    BeamMode with_peak_amplitude(double e0) const;

private:
    double waist_;
    double wavenumber_;
    Direction direction_;
    Frame frame_;
    double peak_amplitude_;
    double rayleigh_;
};

struct BeamGeometry
{
    double rayleigh_z = 0.0;
    // Signed wavefront radius R(z); +inf with flat == true at the focus.
    double curvature_radius = 0.0;
    bool flat = false;
    double gouy_psi = 0.0;
    double spot = 0.0;
};

BeamGeometry beam_geometry(const BeamMode &mode, double z);

// Log-magnitude and phase of the transverse amplitude, split so that hot loops
// can fold several modes into one exp() and one sincos().
struct EnvelopePhase
{
    double log_magnitude = 0.0;
    double phase = 0.0;
};

// Evaluated in the mode's own frame. The minus_z phase is the conjugate of the
// plus_z phase at the same z.
EnvelopePhase envelope_phase(const BeamMode &mode, const Vec3 &r);

std::complex<double> transverse_amplitude(const BeamMode &mode, const Vec3 &r);

// Lab coordinates to the frame rotated about x by theta:
// x' = x, y' = y cos(theta) - z sin(theta), z' = y sin(theta) + z cos(theta).
Vec3 skew_transform(const Vec3 &r, double theta);

} // namespace ire

#endif // IRE_BEAM_OPTICS_HPP
