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

#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ire/constants.hpp"
#include "ire/quadrature.hpp"
#include "ire/retrieval.hpp"

using namespace ire;

namespace
{

const double deg = constants::pi / 180.0;

Scenario small_scenario(double theta_deg, double tm_us, std::uint64_t n = 3000, double r0 = 100e-6,
                        double temperature = 30e-6)
{
    CloudSpec c;
    c.sigma = r0;
    c.temperature = temperature;
    c.atom_count_override = n;
    return make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, theta_deg * deg, tm_us * 1e-6, 5);
}

std::vector<AtomSample> all_atoms(const Scenario &sc)
{
    const AtomStream s(sc.cloud, sc.seed);
    std::vector<AtomSample> out;
    for (std::uint64_t i = 0; i < s.size(); ++i)
        out.push_back(drift(s.sample(i), sc.storage_time));
    return out;
}

// Direct sums from the per-atom reference functions.
struct DirectSums
{
    std::complex<double> s1;
    double s2 = 0.0;
    double cross = 0.0;
    double eta() const { return std::norm(s1) / (s2 + cross); }
};

DirectSums direct(const std::vector<AtomSample> &atoms, const Scenario &sc, int order)
{
    DirectSums d;
    std::vector<std::complex<double>> s;
    std::vector<double> dd;
    for (int t = 0; t <= order; ++t)
        for (int m = t; m >= 0; --m) {
            s.emplace_back(0.0, 0.0);
            dd.push_back(0.0);
        }
    for (const AtomSample &a : atoms) {
        const std::complex<double> amp = spinwave_amplitude(a, sc);
        d.s1 += amp * idler_projection(a, sc);
        d.s2 += std::norm(amp);
        std::size_t idx = 0;
        for (int t = 0; t <= order; ++t)
            for (int m = t; m >= 0; --m, ++idx) {
                const std::complex<double> v = amp * idler_mode_projection(a, sc, m, t - m);
                s[idx] += v;
                dd[idx] += std::norm(v);
            }
    }
    for (std::size_t i = 0; i < s.size(); ++i)
        d.cross += std::norm(s[i]) - dd[i];
    return d;
}

EstimatorOptions unfiltered(int order = 4)
{
    EstimatorOptions o;
    o.transverse_cutoff = false;
    o.mode_order = order;
    o.chunk_size = 512;
    return o;
}

} // namespace

TEST_CASE("wavenumbers from the level scheme")
{
    SpeciesConstants sp;
    const Wavenumbers k = wavenumbers(sp);
    const double c = constants::speed_of_light;
    CHECK(k.idler == doctest::Approx(constants::two_pi / 795e-9).epsilon(1e-14));
    CHECK(k.idler == doctest::Approx(7.903e6).epsilon(1e-3));
    CHECK(c * k.signal == doctest::Approx(c * k.write - sp.hyperfine_omega_sg).epsilon(1e-14));
    CHECK(c * k.idler == doctest::Approx(c * k.read + sp.hyperfine_omega_sg).epsilon(1e-14));
    // mismatch equals +2 omega_sg / c for these frequency relations
    CHECK(k.residual_mismatch() == doctest::Approx(2.0 * sp.hyperfine_omega_sg / c).epsilon(1e-6));
    const double lambda_sw = constants::two_pi / std::abs(k.residual_mismatch());
    CHECK(lambda_sw == doctest::Approx(22e-3).epsilon(0.01));

    SpeciesConstants flat;
    flat.hyperfine_omega_sg = 0.0;
    flat.detuning = 0.0;
    const Wavenumbers f = wavenumbers(flat);
    CHECK(f.write == f.signal);
    CHECK(f.read == f.idler);
    CHECK(f.write == f.read);
}

TEST_CASE("spin-wave amplitude landmarks")
{
    const Scenario sc = small_scenario(0.0, 0.0);
    AtomSample a;
    CHECK(std::abs(spinwave_amplitude(a, sc) - std::complex<double>(1.0, 0.0)) < 1e-15);

    for (double z : {-3e-3, 1e-3, 6e-3}) {
        a.r_initial = {0.0, 0.0, z};
        const double zs = sc.signal.rayleigh_range(), zw = sc.write.rayleigh_range();
        const double expect = 1.0 / std::sqrt((1 + z * z / (zs * zs)) * (1 + z * z / (zw * zw)));
        CHECK(std::abs(spinwave_amplitude(a, sc)) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("spin-wave amplitude against the pre-paraxial overlap integral")
{
    const Scenario sc = small_scenario(2.0, 0.0);
    AtomSample a;
    a.r_initial = {10e-6, -5e-6, 2e-3};
    const Vec3 &r = a.r_initial;
    const double ks = sc.signal.wavenumber(), ws = sc.signal.waist();
    const double rho = std::hypot(r.x, r.y);

    auto integrand = [&](double th, double z, double p, bool imag) {
        const double env = std::sin(th) * gsl_sf_bessel_J0(ks * p * std::sin(th)) *
                           std::exp(-std::pow(ks * ws * std::sin(th), 2) / 4.0);
        const double ph = -ks * z * std::cos(th);
        return env * (imag ? std::sin(ph) : std::cos(ph));
    };
    AdaptiveOptions o{1e-10, 1e-16, 4000};
    const double top = 0.06; // Gaussian factor below e^-69 beyond
    auto overlap = [&](double z, double p) {
        return std::complex<double>(
            integrate_adaptive([&](double t) { return integrand(t, z, p, false); }, 0.0, top, o),
            integrate_adaptive([&](double t) { return integrand(t, z, p, true); }, 0.0, top, o));
    };
    const std::complex<double> signal_factor = overlap(r.z, rho) / overlap(0.0, 0.0);
    const Vec3 rt = skew_transform(r, sc.skew_theta);
    const std::complex<double> oracle =
        transverse_amplitude(sc.write, rt) * std::polar(1.0, sc.write.wavenumber() * rt.z) * signal_factor;
    const std::complex<double> got = spinwave_amplitude(a, sc);
    CHECK(std::abs(got - oracle) < 1e-3 * std::abs(oracle));
}

TEST_CASE("idler projection of a single atom")
{
    const Scenario sc = small_scenario(0.0, 0.0);
    AtomSample a;
    const double expect = 2.0 / std::pow(sc.idler.wavenumber() * 35e-6, 2);
    CHECK(expect == doctest::Approx(2.61e-5).epsilon(2e-3));
    CHECK(std::norm(idler_projection(a, sc)) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(projection_calibration(sc) == doctest::Approx(expect).epsilon(1e-15));

    // sphere-quadrature oracle: |<g|(4 pi)^-1/2>|^2 with g normalized on the backward hemisphere
    const double kw = sc.idler.wavenumber() * 35e-6;
    AdaptiveOptions o{1e-12, 0, 4000};
    const double lin = integrate_adaptive([&](double t) { return std::sin(t) * std::exp(-std::pow(kw * std::sin(t), 2) / 4); }, 0.0, constants::pi / 2, o);
    const double sq = integrate_adaptive([&](double t) { return std::sin(t) * std::exp(-std::pow(kw * std::sin(t), 2) / 2); }, 0.0, constants::pi / 2, o);
    const double oracle = std::pow(constants::two_pi * lin, 2) / (4.0 * constants::pi * constants::two_pi * sq);
    CHECK(std::norm(idler_projection(a, sc)) == doctest::Approx(oracle).epsilon(1e-4));

    for (double th : {-3.0, 1.0, 2.0, 20.0})
        CHECK(std::abs(idler_projection(a, small_scenario(th, 0.0))) == doctest::Approx(std::sqrt(expect)).epsilon(1e-14));

    AtomSample moving;
    moving.r_initial = {3e-6, 4e-6, 1e-4};
    moving.velocity = {0.05, -0.07, 0.02};
    const AtomSample still = drift(moving, 0.0);
    AtomSample zero_v = moving;
    zero_v.velocity = {};
    CHECK(idler_projection(still, sc) == idler_projection(drift(zero_v, 0.0), sc));
}

TEST_CASE("Hermite-Gauss projections")
{
    const Scenario sc = small_scenario(1.0, 0.0);
    AtomSample a;
    a.r_initial = a.r_drifted = {12e-6, -20e-6, 1.5e-3};
    CHECK(idler_mode_projection(a, sc, 0, 0) == idler_projection(a, sc));
    // psi_2 / psi_0 = (2 t^2 - 1)/sqrt(2), with the extra Gouy factor exp(-2 i psi)
    const double zr = sc.idler.rayleigh_range();
    const double w = 35e-6 * std::sqrt(1 + std::pow(1.5e-3 / zr, 2));
    const double t = std::sqrt(2.0) * 12e-6 / w;
    const std::complex<double> ratio = idler_mode_projection(a, sc, 2, 0) / idler_projection(a, sc);
    const std::complex<double> expect = (2 * t * t - 1) / std::sqrt(2.0) * std::polar(1.0, -2.0 * std::atan(1.5e-3 / zr));
    CHECK(std::abs(ratio - expect) < 1e-12);
    CHECK_THROWS_AS(idler_mode_projection(a, sc, -1, 0), std::invalid_argument);
}

TEST_CASE("streaming estimator equals direct sums")
{
    for (auto [th, tm] : {std::pair{0.0, 0.0}, std::pair{2.0, 0.0}, std::pair{2.0, 100.0}}) {
        const Scenario sc = small_scenario(th, tm);
        const DirectSums d = direct(all_atoms(sc), sc, 4);
        const EtaEstimate e = eta_paraxial(sc, unfiltered(4));
        CHECK(e.s2 == doctest::Approx(d.s2).epsilon(1e-12));
        CHECK(e.numerator == doctest::Approx(std::norm(d.s1)).epsilon(1e-10));
        CHECK(e.coherent_norm == doctest::Approx(d.cross).epsilon(1e-9));
        CHECK(e.eta == doctest::Approx(d.eta()).epsilon(1e-10));
        CHECK(e.eta == doctest::Approx(e.numerator / e.denominator).epsilon(1e-15));
        CHECK(e.n_atoms == 3000);
        CHECK(e.method == Method::paraxial);
        CHECK(e.seed == 5);
    }
}

TEST_CASE("incoherent normalization is the plain ratio")
{
    const Scenario sc = small_scenario(0.0, 0.0);
    EstimatorOptions o = unfiltered();
    o.normalization = Normalization::incoherent;
    const DirectSums d = direct(all_atoms(sc), sc, 0);
    const EtaEstimate e = eta_paraxial(sc, o);
    CHECK(e.coherent_norm == 0.0);
    CHECK(e.eta == doctest::Approx(std::norm(d.s1) / d.s2).epsilon(1e-10));
}

TEST_CASE("transverse cutoff leaves the sums unchanged")
{
    CloudSpec c;
    c.atom_count_override = 200000;
    for (double th : {0.0, 2.0}) {
        const Scenario sc = make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, th * deg, 50e-6, 9);
        const EtaEstimate all = eta_paraxial(sc, unfiltered());
        const EtaEstimate cut = eta_paraxial(sc, EstimatorOptions{});
        CHECK(cut.n_contributing < all.n_contributing / 10);
        CHECK(cut.s2 == doctest::Approx(all.s2).epsilon(1e-12));
        CHECK(cut.eta == doctest::Approx(all.eta).epsilon(1e-10));
    }
}

TEST_CASE("thread count never changes a bit; batch equals single")
{
    CloudSpec c;
    c.atom_count_override = 300000;
    std::vector<Scenario> batch;
    for (double tm : {0.0, 50.0, 200.0})
        batch.push_back(make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, 2 * deg, tm * 1e-6, 4));
    batch.push_back(make_scenario(SpeciesConstants{}, c, 60e-6, 60e-6, 60e-6, 0.0, 0.0, 4));
    EstimatorOptions o;
    o.chunk_size = 10000;
    o.threads = 1;
    const std::vector<EtaEstimate> ref = eta_paraxial_batch(batch, o);
    for (unsigned t : {2u, 5u, 16u}) {
        o.threads = t;
        const std::vector<EtaEstimate> got = eta_paraxial_batch(batch, o);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            CHECK(got[i].eta == ref[i].eta);
            CHECK(got[i].denominator == ref[i].denominator);
        }
    }
    o.threads = 3;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const EtaEstimate single = eta_paraxial(batch[i], o);
        CHECK(single.eta == ref[i].eta);
        CHECK(single.n_contributing == ref[i].n_contributing);
    }
    // chunking regroups the compensated sums only
    o.chunk_size = 777;
    CHECK(eta_paraxial(batch[0], o).eta == doctest::Approx(ref[0].eta).epsilon(1e-12));

    std::vector<Scenario> mixed = batch;
    mixed.back().seed = 5;
    CHECK_THROWS_AS(eta_paraxial_batch(mixed, o), std::invalid_argument);
}

TEST_CASE("write amplitude cancels")
{
    Scenario sc = small_scenario(2.0, 50.0);
    const double ref = eta_paraxial(sc, unfiltered()).eta;
    for (double e0 : {1e-3, 7.5, -2.0}) {
        sc.write = sc.write.with_peak_amplitude(e0);
        CHECK(eta_paraxial(sc, unfiltered()).eta == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("mirror symmetry in y maps theta to -theta")
{
    const Scenario plus = small_scenario(2.0, 80.0);
    const Scenario minus = small_scenario(-2.0, 80.0);
    std::vector<AtomSample> atoms = all_atoms(plus), mirrored = atoms;
    for (AtomSample &a : mirrored) {
        a.r_initial.y = -a.r_initial.y;
        a.velocity.y = -a.velocity.y;
        a.r_drifted.y = -a.r_drifted.y;
    }
    CHECK(direct(mirrored, minus, 4).eta() == doctest::Approx(direct(atoms, plus, 4).eta()).epsilon(1e-12));
}

TEST_CASE("collinear geometry with frozen atoms does not dephase")
{
    const double frozen = 1e-30; // K
    const double ref = eta_paraxial(small_scenario(0.0, 0.0, 20000, 300e-6, frozen), unfiltered()).eta;
    for (double tm : {100.0, 1000.0})
        CHECK(eta_paraxial(small_scenario(0.0, tm, 20000, 300e-6, frozen), unfiltered()).eta ==
              doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("an empty spin wave is an explicit failure")
{
    CloudSpec c;
    c.sigma = 1.0; // one atom in a metre-sized cloud misses the beams
    c.atom_count_override = 1;
    const Scenario sc = make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, 0.0, 0.0, 1);
    CHECK_THROWS_AS(eta_paraxial(sc), std::runtime_error);
}

TEST_CASE("scenario validation")
{
    CloudSpec c;
    c.atom_count_override = 10;
    CHECK_THROWS_AS(make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, 1.6, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_scenario(SpeciesConstants{}, c, 60e-6, 35e-6, 35e-6, 0.0, -1e-6, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_scenario(SpeciesConstants{}, c, 60e-6, 1e-6, 35e-6, 0.0, 0.0, 1), std::invalid_argument);
    CHECK(parse_method("angular") == Method::angular);
    CHECK_THROWS_AS(parse_method("exact"), std::invalid_argument);
}
