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

#include "doctest.h"

#include <cmath>
#include <complex>

#include "ire/beam_optics.hpp"
#include "ire/constants.hpp"

using namespace ire;

namespace
{
const double k795 = constants::two_pi / 795e-9;
}

TEST_CASE("rayleigh range and geometry landmarks")
{
    const BeamMode m(35e-6, k795);
    CHECK(m.rayleigh_range() == doctest::Approx(0.5 * k795 * 35e-6 * 35e-6).epsilon(1e-15));
    CHECK(m.rayleigh_range() == doctest::Approx(4.841e-3).epsilon(1e-3));

    const BeamGeometry focus = beam_geometry(m, 0.0);
    CHECK(focus.flat);
    CHECK(std::isinf(focus.curvature_radius));
    CHECK(focus.gouy_psi == 0.0);
    CHECK(focus.spot == doctest::Approx(35e-6));

    const double zr = m.rayleigh_range();
    const BeamGeometry at_zr = beam_geometry(m, zr);
    CHECK_FALSE(at_zr.flat);
    CHECK(at_zr.curvature_radius == doctest::Approx(2.0 * zr));
    CHECK(at_zr.gouy_psi == doctest::Approx(constants::pi / 4));
    CHECK(at_zr.spot == doctest::Approx(std::sqrt(2.0) * 35e-6));
    CHECK(beam_geometry(m, -zr).curvature_radius == doctest::Approx(-2.0 * zr));
}

TEST_CASE("transverse amplitude against the textbook closed form")
{
    const BeamMode m(60e-6, k795, Direction::plus_z, Frame::lab, 2.5);
    CHECK(std::abs(transverse_amplitude(m, {0, 0, 0}) - std::complex<double>(2.5, 0.0)) < 1e-15);

    // 1/e^2 intensity radius at the focus
    const double i_w0 = std::norm(transverse_amplitude(m, {60e-6, 0, 0})) / 6.25;
    CHECK(i_w0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

    // w0/w exp(-rho^2/w^2) exp(i(k rho^2 / 2R - psi)) at a generic point
    const Vec3 r{20e-6, -35e-6, 3.1e-3};
    const BeamGeometry g = beam_geometry(m, r.z);
    const double rho2 = r.x * r.x + r.y * r.y;
    const std::complex<double> expect = 2.5 * (60e-6 / g.spot) * std::exp(-rho2 / (g.spot * g.spot)) *
                                        std::polar(1.0, k795 * rho2 / (2.0 * g.curvature_radius) - g.gouy_psi);
    CHECK(std::abs(transverse_amplitude(m, r) - expect) < 1e-13 * std::abs(expect));
}

TEST_CASE("reversed propagation conjugates the phase")
{
    const BeamMode plus(35e-6, k795, Direction::plus_z);
    const BeamMode minus(35e-6, k795, Direction::minus_z);
    for (double z : {-4e-3, -1e-4, 0.0, 2e-3, 7e-3}) {
        const Vec3 r{12e-6, 7e-6, z};
        const Vec3 mirrored{12e-6, 7e-6, -z};
        const auto p = transverse_amplitude(plus, r);
        CHECK(std::abs(transverse_amplitude(minus, r) - std::conj(p)) < 1e-15);
        CHECK(std::abs(transverse_amplitude(minus, r) - transverse_amplitude(plus, mirrored)) < 1e-15);
    }
}

TEST_CASE("envelope phase is finite through the focus")
{
    const BeamMode m(35e-6, k795);
    for (double z : {-1e-12, 0.0, 1e-12}) {
        const EnvelopePhase e = envelope_phase(m, {30e-6, 0, z});
        CHECK(std::isfinite(e.phase));
        CHECK(std::abs(e.phase) < 1e-6);
    }
}

TEST_CASE("non-paraxial and malformed modes are rejected")
{
    CHECK_THROWS_AS(BeamMode(1e-6, k795), std::invalid_argument);  // k w0 ~ 7.9
    CHECK_THROWS_AS(BeamMode(-35e-6, k795), std::invalid_argument);
    CHECK_THROWS_AS(BeamMode(35e-6, 0.0), std::invalid_argument);
    CHECK_NOTHROW(BeamMode(kMinParaxialProduct / k795 * 1.0001, k795));
}

TEST_CASE("skew transform is a rotation about x")
{
    const Vec3 r{1.0, 2.0, 3.0};
    CHECK(skew_transform(r, 0.0) == r);
    const double t = 2.0 * constants::pi / 180.0;
    const Vec3 s = skew_transform(r, t);
    CHECK(s.x == 1.0);
    CHECK(s.y == doctest::Approx(2.0 * std::cos(t) - 3.0 * std::sin(t)));
    CHECK(s.z == doctest::Approx(2.0 * std::sin(t) + 3.0 * std::cos(t)));
    CHECK(s.norm() == doctest::Approx(r.norm()).epsilon(1e-15));
    const Vec3 back = skew_transform(s, -t);
    CHECK((back - r).norm() < 1e-15);
    // the skewed z axis seen from the lab
    const Vec3 axis = skew_transform({0.0, std::sin(t), std::cos(t)}, t);
    CHECK(axis.z == doctest::Approx(1.0));
}
