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

#include "ire/beam_optics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ire
{

BeamMode::BeamMode(double waist_m, double wavenumber, Direction direction, Frame frame,
                   double peak_amplitude)
    : waist_(waist_m), wavenumber_(wavenumber), direction_(direction), frame_(frame),
      peak_amplitude_(peak_amplitude), rayleigh_(0.5 * wavenumber * waist_m * waist_m)
{
    if (!(waist_m > 0.0) || !std::isfinite(waist_m))
        throw std::invalid_argument("BeamMode: waist must be positive and finite");
    if (!(wavenumber > 0.0) || !std::isfinite(wavenumber))
        throw std::invalid_argument("BeamMode: wavenumber must be positive and finite");
    if (wavenumber * waist_m < kMinParaxialProduct) {
        std::ostringstream os;
        os << "BeamMode: k*w0 = " << wavenumber * waist_m << " is below the paraxial limit "
           << kMinParaxialProduct;
        throw std::invalid_argument(os.str());
    }
}

BeamMode BeamMode::with_peak_amplitude(double e0) const
{
    return BeamMode(waist_, wavenumber_, direction_, frame_, e0);
}

BeamGeometry beam_geometry(const BeamMode &mode, double z)
{
    BeamGeometry g;
    const double zr = mode.rayleigh_range();
    g.rayleigh_z = zr;
    if (z == 0.0) {
        g.curvature_radius = std::numeric_limits<double>::infinity();
        g.flat = true;
    } else {
        g.curvature_radius = z * (1.0 + (zr * zr) / (z * z));
    }
    g.gouy_psi = std::atan(z / zr);
    g.spot = mode.waist() * std::sqrt(1.0 + (z * z) / (zr * zr));
    return g;
}

EnvelopePhase envelope_phase(const BeamMode &mode, const Vec3 &r)
{
    const double zr = mode.rayleigh_range();
    const double w0 = mode.waist();
    const double k = mode.wavenumber();
    const double rho2 = r.x * r.x + r.y * r.y;
    const double q = 1.0 + (r.z * r.z) / (zr * zr);

    EnvelopePhase out;
    out.log_magnitude = -rho2 / (w0 * w0 * q) - 0.5 * std::log(q);
    // k rho^2 / (2 R(z)) without the 1/z singularity at the focus.
    const double phase = k * rho2 * r.z / (2.0 * (r.z * r.z + zr * zr)) - std::atan(r.z / zr);
    out.phase = mode.direction() == Direction::plus_z ? phase : -phase;
    return out;
}

std::complex<double> transverse_amplitude(const BeamMode &mode, const Vec3 &r)
{
    const EnvelopePhase ep = envelope_phase(mode, r);
    return mode.peak_amplitude() * std::polar(std::exp(ep.log_magnitude), ep.phase);
}

Vec3 skew_transform(const Vec3 &r, double theta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {r.x, r.y * c - r.z * s, r.y * s + r.z * c};
}

} // namespace ire
