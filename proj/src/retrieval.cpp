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

#include "ire/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ire/constants.hpp"
#include "ire/parallel.hpp"
#include "ire/summation.hpp"

namespace ire
{
namespace
{

constexpr double kCutoffZSigmas = 6.0;

constexpr int kMaxModeOrder = 40;

struct HermiteCoefficients
{
    double a[kMaxModeOrder + 1];
    double b[kMaxModeOrder + 1];
    HermiteCoefficients()
    {
        for (int m = 0; m <= kMaxModeOrder; ++m) {
            a[m] = std::sqrt(2.0 / (m + 1));
            b[m] = std::sqrt(static_cast<double>(m) / (m + 1));
        }
    }
};

const HermiteCoefficients kHermite;

// Normalized Hermite functions without the Gaussian factor:
// h_0 = 1, h_1 = sqrt(2) t, h_{m+1} = sqrt(2/(m+1)) t h_m - sqrt(m/(m+1)) h_{m-1}.
void hermite_polynomials(double t, int order, double *h)
{
    h[0] = 1.0;
    if (order >= 1)
        h[1] = kHermite.a[0] * t;
    for (int m = 1; m < order; ++m)
        h[m + 1] = kHermite.a[m] * t * h[m] - kHermite.b[m] * h[m - 1];
}

double hermite_polynomial(double t, int m)
{
    std::vector<double> h(static_cast<std::size_t>(m) + 1);
    hermite_polynomials(t, m, h.data());
    return h[static_cast<std::size_t>(m)];
}

// Per-scenario constants for the streaming loop.
struct Kernel
{
    double cos_t = 1.0, sin_t = 0.0, tm = 0.0;
    double kw = 0.0, ks = 0.0, kr = 0.0, ki = 0.0;
    double zr_w = 0.0, inv_w2_w = 0.0;
    double zr_s = 0.0, inv_w2_s = 0.0;
    double zr_i = 0.0, inv_w2_i = 0.0;
    double log_e0 = 0.0, phase_e0 = 0.0;
    double log_cp = 0.0;
    AtomFilter filter;
    int order = 0;
    bool modal = true;
};

struct ModeSums
{
    CompensatedComplexSum s1;
    CompensatedSum s2;
    std::vector<double> s_re;
    std::vector<double> s_im;
    std::vector<double> d;
    std::uint64_t contributing = 0;
};

int mode_count(int order) { return (order + 1) * (order + 2) / 2; }

Kernel make_kernel(const Scenario &sc, const EstimatorOptions &opts)
{
    Kernel k;
    k.cos_t = std::cos(sc.skew_theta);
    k.sin_t = std::sin(sc.skew_theta);
    k.tm = sc.storage_time;
    k.kw = sc.write.wavenumber();
    k.ks = sc.signal.wavenumber();
    k.kr = sc.k.read;
    k.ki = sc.idler.wavenumber();
    k.zr_w = sc.write.rayleigh_range();
    k.inv_w2_w = 1.0 / (sc.write.waist() * sc.write.waist());
    k.zr_s = sc.signal.rayleigh_range();
    k.inv_w2_s = 1.0 / (sc.signal.waist() * sc.signal.waist());
    k.zr_i = sc.idler.rayleigh_range();
    k.inv_w2_i = 1.0 / (sc.idler.waist() * sc.idler.waist());
    const double e0 = sc.write.peak_amplitude();
    k.log_e0 = std::log(std::abs(e0));
    k.phase_e0 = e0 < 0.0 ? constants::pi : 0.0;
    k.log_cp = 0.5 * std::log(projection_calibration(sc));
    k.filter = atom_filter(sc, opts);
    k.modal = opts.normalization == Normalization::modal;
    k.order = k.modal ? opts.mode_order : 0;
    return k;
}

// The Gouy phasors and 1/sqrt(q) prefactors of the three Gaussian factors
// combine into 1/((1 + i a_w)(1 - i a_s)(1 + i a_i)) with a = z/z_R, which
// keeps log() and atan() out of the loop.
void accumulate(const Kernel &k, const AtomSample &a, ModeSums &out, double *hx, double *hy)
{
    const Vec3 &r = a.r_initial;

    // write beam, skewed frame
    const double yt = r.y * k.cos_t - r.z * k.sin_t;
    const double zt = r.y * k.sin_t + r.z * k.cos_t;
    const double rho2_t = r.x * r.x + yt * yt;
    const double aw = zt / k.zr_w;
    const double qw = 1.0 + aw * aw;
    const double g_w = -rho2_t * k.inv_w2_w / qw;
    const double ph_w = k.kw * rho2_t * zt / (2.0 * (zt * zt + k.zr_w * k.zr_w));

    // signal mode, lab frame, conjugated
    const double rho2 = r.x * r.x + r.y * r.y;
    const double as = r.z / k.zr_s;
    const double qs = 1.0 + as * as;
    const double g_s = -rho2 * k.inv_w2_s / qs;
    const double ph_s = k.ks * rho2 * r.z / (2.0 * (r.z * r.z + k.zr_s * k.zr_s));

    // idler projection at the drifted position
    const double xp = r.x + a.velocity.x * k.tm;
    const double yp = r.y + a.velocity.y * k.tm;
    const double zp = r.z + a.velocity.z * k.tm;
    const double rho2_p = xp * xp + yp * yp;
    const double ai = zp / k.zr_i;
    const double qi = 1.0 + ai * ai;
    const double g_i = -rho2_p * k.inv_w2_i / qi;
    const double ph_i = k.ki * rho2_p * zp / (2.0 * (zp * zp + k.zr_i * k.zr_i));

    const double env_a = std::exp(k.log_e0 + g_w + g_s);
    out.s2.add(env_a * env_a / (qw * qs));
    ++out.contributing;

    const double mag = env_a * std::exp(k.log_cp + g_i);
    const double ph = k.phase_e0 + k.kw * zt - k.ks * r.z + ph_w - ph_s + k.ki * zp -
                      k.kr * (yp * k.sin_t + zp * k.cos_t) + ph_i;
    // denominator (1 + i aw)(1 - i as)(1 + i ai)
    const double d1_re = 1.0 + aw * as, d1_im = aw - as;
    const double d_re = d1_re - d1_im * ai, d_im = d1_im + d1_re * ai;
    const double inv_d2 = 1.0 / (d_re * d_re + d_im * d_im);
    const double c = std::cos(ph), sn = std::sin(ph);
    const double t_re = mag * (c * d_re + sn * d_im) * inv_d2;
    const double t_im = mag * (sn * d_re - c * d_im) * inv_d2;
    out.s1.add({t_re, t_im});
    if (!k.modal)
        return;

    const double mag2 = t_re * t_re + t_im * t_im;
    if (mag2 == 0.0)
        return;
    const double inv_spot = std::sqrt(2.0 * k.inv_w2_i / qi);
    hermite_polynomials(xp * inv_spot, k.order, hx);
    hermite_polynomials(yp * inv_spot, k.order, hy);
    // exp(-i psi_i) = (1 - i a_i) / sqrt(q_i)
    const double inv_sq = 1.0 / std::sqrt(qi);
    const double gouy_re = inv_sq;
    const double gouy_im = -ai * inv_sq;

    double *s_re = out.s_re.data();
    double *s_im = out.s_im.data();
    double *dd = out.d.data();
    double sh_re = t_re, sh_im = t_im;
    std::size_t idx = 0;
    for (int s = 0; s <= k.order; ++s) {
        for (int m = s; m >= 0; --m, ++idx) {
            const double h = hx[m] * hy[s - m];
            s_re[idx] += sh_re * h;
            s_im[idx] += sh_im * h;
            dd[idx] += mag2 * h * h;
        }
        const double re = sh_re * gouy_re - sh_im * gouy_im;
        sh_im = sh_re * gouy_im + sh_im * gouy_re;
        sh_re = re;
    }
}

void check_batch(const std::vector<Scenario> &scenarios)
{
    const Scenario &f = scenarios.front();
    for (const Scenario &s : scenarios) {
        validate(s);
        const bool same = s.seed == f.seed && s.cloud.atom_count() == f.cloud.atom_count() &&
                          s.cloud.sigma == f.cloud.sigma &&
                          s.cloud.velocity_sigma() == f.cloud.velocity_sigma();
        if (!same)
            throw std::invalid_argument("eta_paraxial_batch: scenarios must share cloud and seed");
    }
}

std::complex<double> idler_mode_value(const AtomSample &atom, const Scenario &sc, int m, int n)
{
    const Vec3 &rp = atom.r_drifted;
    const double zr = sc.idler.rayleigh_range();
    const double w0 = sc.idler.waist();
    const double q = 1.0 + (rp.z * rp.z) / (zr * zr);
    const double spot = w0 * std::sqrt(q);
    // Mode matching uses the conjugate of the backward-propagating fiber mode.
    const std::complex<double> base = std::conj(transverse_amplitude(sc.idler.with_peak_amplitude(1.0), rp));
    const double h = hermite_polynomial(std::sqrt(2.0) * rp.x / spot, m) *
                     hermite_polynomial(std::sqrt(2.0) * rp.y / spot, n);
    const double psi = std::atan(rp.z / zr);
    const double phase = sc.k.idler * rp.z -
                         sc.k.read * (rp.y * std::sin(sc.skew_theta) + rp.z * std::cos(sc.skew_theta)) -
                         (m + n) * psi;
    return std::sqrt(projection_calibration(sc)) * base * h * std::polar(1.0, phase);
}

} // namespace

Wavenumbers wavenumbers(const SpeciesConstants &species)
{
    const double c = constants::speed_of_light;
    const double w_eg = constants::two_pi * c / species.transition_wavelength;
    const double w_write = w_eg - species.detuning;
    const double w_read = w_eg - species.hyperfine_omega_sg;
    Wavenumbers k;
    k.write = w_write / c;
    k.signal = (w_write - species.hyperfine_omega_sg) / c;
    k.read = w_read / c;
    k.idler = (w_read + species.hyperfine_omega_sg) / c;
    return k;
}

Scenario make_scenario(const SpeciesConstants &species, const CloudSpec &cloud, double write_waist,
                       double signal_waist, double idler_waist, double skew_theta,
                       double storage_time, std::uint64_t seed)
{
    species.validate();
    const Wavenumbers k = wavenumbers(species);
    Scenario sc{species,
                cloud,
                k,
                BeamMode(write_waist, k.write, Direction::plus_z, Frame::skewed),
                BeamMode(signal_waist, k.signal, Direction::plus_z, Frame::lab),
                BeamMode(idler_waist, k.idler, Direction::minus_z, Frame::lab),
                skew_theta,
                storage_time,
                seed};
    validate(sc);
    return sc;
}

void validate(const Scenario &sc)
{
    sc.species.validate();
    sc.cloud.validate();
    if (!std::isfinite(sc.skew_theta) || std::abs(sc.skew_theta) >= constants::pi / 2)
        throw std::invalid_argument("scenario.skew_theta must lie in (-90, 90) degrees");
    if (!(sc.storage_time >= 0.0) || !std::isfinite(sc.storage_time))
        throw std::invalid_argument("scenario.storage_time must be non-negative");
    if (sc.write.frame() != Frame::skewed || sc.signal.frame() != Frame::lab || sc.idler.frame() != Frame::lab)
        throw std::invalid_argument("scenario: write must use the skewed frame, signal and idler the lab frame");
    if (sc.write.peak_amplitude() == 0.0 || !std::isfinite(sc.write.peak_amplitude()))
        throw std::invalid_argument("scenario.write peak amplitude must be nonzero");
}

std::complex<double> spinwave_amplitude(const AtomSample &atom, const Scenario &sc)
{
    const Vec3 &r = atom.r_initial;
    const Vec3 rt = skew_transform(r, sc.skew_theta);
    const std::complex<double> q_w = transverse_amplitude(sc.write, rt);
    const std::complex<double> m_s = transverse_amplitude(sc.signal.with_peak_amplitude(1.0), r);
    return q_w * std::conj(m_s) * std::polar(1.0, sc.write.wavenumber() * rt.z - sc.signal.wavenumber() * r.z);
}

std::complex<double> idler_projection(const AtomSample &atom, const Scenario &sc)
{
    return idler_mode_value(atom, sc, 0, 0);
}

std::complex<double> idler_mode_projection(const AtomSample &atom, const Scenario &sc, int m, int n)
{
    if (m < 0 || n < 0 || m > kMaxModeOrder || n > kMaxModeOrder)
        throw std::invalid_argument("idler_mode_projection: mode indices must lie in [0, 40]");
    return idler_mode_value(atom, sc, m, n);
}

double projection_calibration(const Scenario &sc)
{
    const double kw = sc.idler.wavenumber() * sc.idler.waist();
    return 2.0 / (kw * kw);
}

std::string to_string(Method m) { return m == Method::paraxial ? "paraxial" : "angular"; }

Method parse_method(const std::string &s)
{
    if (s == "paraxial")
        return Method::paraxial;
    if (s == "angular")
        return Method::angular;
    throw std::invalid_argument("unknown method '" + s + "' (expected paraxial or angular)");
}

AtomFilter atom_filter(const Scenario &sc, const EstimatorOptions &opts)
{
    AtomFilter f;
    if (!opts.transverse_cutoff)
        return f;
    f.enabled = true;
    const double zr = sc.signal.rayleigh_range();
    const double w = opts.cutoff_spots * sc.signal.waist();
    f.cut2 = w * w;
    f.rayleigh2 = zr * zr;
    const double zmax = kCutoffZSigmas * sc.cloud.sigma;
    const double rho2_max = f.cut2 * (1.0 + zmax * zmax / f.rayleigh2);
    f.radial_threshold = std::exp(-rho2_max / (2.0 * sc.cloud.sigma * sc.cloud.sigma));
    return f;
}

EtaEstimate eta_paraxial(const Scenario &scenario, const EstimatorOptions &opts)
{
    return eta_paraxial_batch({scenario}, opts).front();
}

std::vector<EtaEstimate> eta_paraxial_batch(const std::vector<Scenario> &scenarios,
                                            const EstimatorOptions &opts)
{
    if (scenarios.empty())
        return {};
    check_batch(scenarios);
    if (opts.chunk_size == 0)
        throw std::invalid_argument("chunk_size must be positive");
    if (opts.normalization == Normalization::modal && (opts.mode_order < 0 || opts.mode_order > kMaxModeOrder))
        throw std::invalid_argument("mode_order must lie in [0, 40]");
    if (opts.transverse_cutoff && !(opts.cutoff_spots > 0.0))
        throw std::invalid_argument("cutoff_spots must be positive");

    const Scenario &first = scenarios.front();
    const AtomStream stream(first.cloud, first.seed);
    const std::uint64_t n = stream.size();
    const std::uint64_t n_chunks = (n + opts.chunk_size - 1) / opts.chunk_size;

    std::vector<Kernel> kernels;
    bool any_unfiltered = false;
    double global_threshold = 1.0;
    for (const Scenario &s : scenarios) {
        kernels.push_back(make_kernel(s, opts));
        any_unfiltered = any_unfiltered || !kernels.back().filter.enabled;
        global_threshold = std::min(global_threshold, kernels.back().filter.radial_threshold);
    }
    if (any_unfiltered)
        global_threshold = 0.0;
    const std::size_t n_modes = static_cast<std::size_t>(mode_count(kernels.front().order));

    auto fresh = [&] {
        std::vector<ModeSums> v(kernels.size());
        for (auto &p : v) {
            p.s_re.assign(n_modes, 0.0);
            p.s_im.assign(n_modes, 0.0);
            p.d.assign(n_modes, 0.0);
        }
        return v;
    };

    auto compute = [&](std::uint64_t c) {
        std::vector<ModeSums> part = fresh();
        std::vector<double> hx(n_modes + 1), hy(n_modes + 1);
        std::vector<char> visit(kernels.size());
        const std::uint64_t begin = c * opts.chunk_size;
        const std::uint64_t end = std::min(n, begin + opts.chunk_size);
        for (std::uint64_t i = begin; i < end; ++i) {
            const UniformPair tp = stream.transverse_draw(i);
            if (tp.first < global_threshold)
                continue;
            const UniformPair ax = stream.axial_draw(i);
            const double rho2 = stream.radial_squared(tp);
            const double z = stream.axial_position(ax);
            bool any = false;
            for (std::size_t s = 0; s < kernels.size(); ++s) {
                const AtomFilter &f = kernels[s].filter;
                visit[s] = f.coarse(tp.first) && f.fine(rho2, z);
                any = any || visit[s];
            }
            if (!any)
                continue;
            const AtomSample a = stream.complete(i, tp, ax);
            for (std::size_t s = 0; s < kernels.size(); ++s)
                if (visit[s])
                    accumulate(kernels[s], a, part[s], hx.data(), hy.data());
        }
        return part;
    };

    struct Total
    {
        CompensatedComplexSum s1;
        CompensatedSum s2;
        std::vector<CompensatedComplexSum> s;
        std::vector<CompensatedSum> d;
        std::uint64_t contributing = 0;
    };
    std::vector<Total> totals(kernels.size());
    for (auto &t : totals) {
        t.s.resize(n_modes);
        t.d.resize(n_modes);
    }
    auto merge = [&](std::uint64_t, std::vector<ModeSums> part) {
        for (std::size_t s = 0; s < part.size(); ++s) {
            totals[s].s1.merge(part[s].s1);
            totals[s].s2.merge(part[s].s2);
            totals[s].contributing += part[s].contributing;
            for (std::size_t m = 0; m < n_modes; ++m) {
                totals[s].s[m].add({part[s].s_re[m], part[s].s_im[m]});
                totals[s].d[m].add(part[s].d[m]);
            }
        }
    };
    ordered_chunk_reduce<std::vector<ModeSums>>(n_chunks, opts.threads, compute, merge);

    std::vector<EtaEstimate> out;
    for (std::size_t s = 0; s < kernels.size(); ++s) {
        const Total &t = totals[s];
        EtaEstimate e;
        e.s2 = t.s2.value();
        if (!(e.s2 > 0.0))
            throw std::runtime_error("eta_paraxial: no atom carries spin-wave amplitude (S2 = 0)");
        const std::complex<double> s1 = t.s1.value();
        e.numerator = std::norm(s1);
        if (kernels[s].modal) {
            CompensatedSum cross;
            for (std::size_t m = 0; m < n_modes; ++m) {
                // the (0,0) entry is S1 itself; use the compensated value
                const double sq = m == 0 ? e.numerator : std::norm(t.s[m].value());
                cross.add(sq - t.d[m].value());
            }
            e.coherent_norm = cross.value();
        }
        e.denominator = e.s2 + e.coherent_norm;
        e.eta = e.numerator / e.denominator;
        e.n_atoms = n;
        e.n_contributing = t.contributing;
        e.method = Method::paraxial;
        e.seed = scenarios[s].seed;
        out.push_back(e);
    }
    return out;
}

} // namespace ire
