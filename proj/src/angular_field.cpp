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

#include "ire/angular_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ire/constants.hpp"
#include "ire/parallel.hpp"
#include "ire/quadrature.hpp"
#include "ire/summation.hpp"
#include "ire/version.hpp"

namespace ire
{
namespace
{

constexpr double kMinNodesPerWidth = 10.0;
constexpr double kMinCapWidths = 12.0; // cap half-width in units of 1/(k W)

// Branch-free sincos for the kernel's inner loop: Cody-Waite reduction by
// pi/2 and Taylor polynomials on [-pi/4, pi/4] (truncation below 1e-16).
inline void kernel_sincos(double x, double &s, double &c)
{
    constexpr double two_over_pi = 0.63661977236758134308;
    constexpr double pio2_hi = 1.5707963267341256e+00;
    constexpr double pio2_lo = 6.0771005065061922e-11;
    const double n = std::nearbyint(x * two_over_pi);
    const double r = (x - n * pio2_hi) - n * pio2_lo;
    const double r2 = r * r;
    const double sp =
        r * (1.0 + r2 * (-1.0 / 6 + r2 * (1.0 / 120 + r2 * (-1.0 / 5040 + r2 * (1.0 / 362880 +
             r2 * (-1.0 / 39916800 + r2 * (1.0 / 6227020800.0 + r2 * (-1.0 / 1307674368000.0))))))));
    const double cp =
        1.0 + r2 * (-0.5 + r2 * (1.0 / 24 + r2 * (-1.0 / 720 + r2 * (1.0 / 40320 + r2 * (-1.0 / 3628800 +
              r2 * (1.0 / 479001600.0 + r2 * (-1.0 / 87178291200.0 + r2 * (1.0 / 20922789888000.0))))))));
    const long q = static_cast<long>(n) & 3;
    const double s0 = (q & 1) ? cp : sp;
    const double c0 = (q & 1) ? sp : cp;
    s = (q & 2) ? -s0 : s0;
    c = ((q + 1) & 2) ? -c0 : c0;
}

void check_cap_resolution(const AngularGrid &grid, double k, double w)
{
    const double width = 2.0 / (k * w);
    const double per_width = grid.spec.cap_nodes * width / grid.cap_half_width;
    if (per_width < kMinNodesPerWidth || grid.cap_half_width * k * w < kMinCapWidths) {
        std::ostringstream os;
        os << "angular grid does not resolve the idler cap: " << per_width
           << " nodes per width 2/(k W) (need " << kMinNodesPerWidth << ") and cap half-width "
           << grid.cap_half_width * k * w << "/(k W) (need " << kMinCapWidths << ")";
        throw std::invalid_argument(os.str());
    }
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::size_t nearest_ring(const std::vector<double> &theta, double t)
{
    const auto it = std::lower_bound(theta.begin(), theta.end(), t);
    if (it == theta.begin())
        return 0;
    if (it == theta.end())
        return theta.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - theta.begin());
    return (t - theta[hi - 1] <= theta[hi] - t) ? hi - 1 : hi;
}

void write_raster(const AngularField &field, const AngularGrid &grid, const std::filesystem::path &path,
                  double theta_lo, double theta_hi, int nt, int np)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open heatmap file '" + path.string() + "' for writing");
    out << "theta_rad,phi_rad,re,im\n";
    const std::size_t nphi = grid.phi.size();
    for (int a = 0; a < nt; ++a) {
        const double t = theta_lo + (a + 0.5) * (theta_hi - theta_lo) / nt;
        const std::size_t ring = nearest_ring(grid.theta, t);
        for (int b = 0; b < np; ++b) {
            const double p = (b + 0.5) * constants::two_pi / np;
            const auto l = static_cast<std::size_t>(std::llround(p / (constants::two_pi / nphi))) % nphi;
            const std::complex<double> v = field.values[ring * nphi + l];
            out << fmt(t) << ',' << fmt(p) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
        }
    }
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for heatmap file '" + path.string() + "'");
}

} // namespace

double AngularGrid::total_weight() const
{
    CompensatedSum s;
    for (double w : ring_weight)
        s.add(w);
    return s.value() * phi_weight * static_cast<double>(phi.size());
}

AngularGrid build_grid(double k_i, double w_i, const GridSpec &spec)
{
    if (!(k_i > 0.0) || !(w_i > 0.0) || k_i * w_i < kMinParaxialProduct)
        throw std::invalid_argument("build_grid: idler mode must be paraxial (k W >= 50)");
    if (spec.cap_nodes < 1 || spec.rest_nodes < 1 || spec.phi_nodes < 1)
        throw std::invalid_argument("build_grid: node counts must be positive");

    AngularGrid g;
    g.spec = spec;
    g.k = k_i;
    g.waist = w_i;
    g.cap_half_width = spec.cap_multiplier / (k_i * w_i);
    if (!(g.cap_half_width > 0.0) || g.cap_half_width >= constants::pi / 2)
        throw std::invalid_argument("build_grid: cap half-width must lie in (0, pi/2)");
    check_cap_resolution(g, k_i, w_i);

    // Remaining sphere, theta in [0, pi - cap], ascending theta = descending cos.
    const double u_lo = -std::cos(g.cap_half_width);
    const QuadratureRule rest = gauss_legendre(static_cast<std::size_t>(spec.rest_nodes), u_lo, 1.0);
    for (std::size_t i = rest.nodes.size(); i-- > 0;) {
        g.theta.push_back(std::acos(rest.nodes[i]));
        g.ring_weight.push_back(rest.weights[i]);
    }
    const QuadratureRule cap =
        gauss_legendre(static_cast<std::size_t>(spec.cap_nodes), constants::pi - g.cap_half_width, constants::pi);
    for (std::size_t i = 0; i < cap.nodes.size(); ++i) {
        g.theta.push_back(cap.nodes[i]);
        g.ring_weight.push_back(cap.weights[i] * std::sin(cap.nodes[i]));
    }

    g.phi_weight = constants::two_pi / spec.phi_nodes;
    for (int l = 0; l < spec.phi_nodes; ++l)
        g.phi.push_back(l * g.phi_weight);
    return g;
}

EmitterSet collect_emitters(const Scenario &sc, const EstimatorOptions &opts)
{
    validate(sc);
    const AtomStream stream(sc.cloud, sc.seed);
    const AtomFilter filter = atom_filter(sc, opts);

    std::vector<AtomSample> atoms;
    for (std::uint64_t i = 0; i < stream.size(); ++i) {
        const UniformPair tp = stream.transverse_draw(i);
        if (!filter.coarse(tp.first))
            continue;
        const UniformPair ax = stream.axial_draw(i);
        if (!filter.fine(stream.radial_squared(tp), stream.axial_position(ax)))
            continue;
        atoms.push_back(drift(stream.complete(i, tp, ax), sc.storage_time));
    }
    EmitterSet set = emitters_from_atoms(atoms, sc);
    set.n_atoms = stream.size();
    return set;
}

EmitterSet emitters_from_atoms(const std::vector<AtomSample> &atoms, const Scenario &sc)
{
    EmitterSet set;
    set.n_atoms = atoms.size();
    set.seed = sc.seed;
    set.emitters.reserve(atoms.size());
    const double iso = 1.0 / std::sqrt(4.0 * constants::pi);
    const double st = std::sin(sc.skew_theta);
    const double ct = std::cos(sc.skew_theta);
    CompensatedSum s2;
    for (const AtomSample &a : atoms) {
        const std::complex<double> amp = spinwave_amplitude(a, sc);
        s2.add(std::norm(amp));
        const Vec3 &rp = a.r_drifted;
        const double read_phase = -sc.k.read * (rp.y * st + rp.z * ct);
        set.emitters.push_back({iso * amp * std::polar(1.0, read_phase), rp});
    }
    set.s2 = s2.value();
    return set;
}

AngularField angular_kernel(const EmitterSet &set, const Scenario &sc, const AngularGrid &grid,
                            unsigned threads)
{
    const double k = sc.idler.wavenumber();
    const std::size_t n = set.emitters.size();
    std::vector<double> xs(n), ys(n), zs(n), br(n), bi(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Emitter &e = set.emitters[j];
        xs[j] = e.position.x;
        ys[j] = e.position.y;
        zs[j] = e.position.z;
        br[j] = e.amplitude.real();
        bi[j] = e.amplitude.imag();
    }

    AngularField field;
    field.values.assign(grid.size(), {0.0, 0.0});
    const std::size_t nphi = grid.phi.size();
    std::vector<double> cphi(nphi), sphi(nphi);
    for (std::size_t l = 0; l < nphi; ++l) {
        cphi[l] = std::cos(grid.phi[l]);
        sphi[l] = std::sin(grid.phi[l]);
    }

    parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t node = begin; node < end; ++node) {
            const std::size_t ring = node / nphi;
            const std::size_t l = node % nphi;
            const double st = std::sin(grid.theta[ring]);
            const double ax = -k * st * cphi[l];
            const double ay = -k * st * sphi[l];
            const double az = -k * std::cos(grid.theta[ring]);
            double re = 0.0, im = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double s, c;
                kernel_sincos(ax * xs[j] + ay * ys[j] + az * zs[j], s, c);
                re += br[j] * c - bi[j] * s;
                im += br[j] * s + bi[j] * c;
            }
            field.values[node] = {re, im};
        }
    });
    return field;
}

double sphere_norm(const AngularField &field, const AngularGrid &grid)
{
    if (field.values.size() != grid.size())
        throw std::invalid_argument("field does not match the grid");
    CompensatedSum s;
    for (std::size_t i = 0; i < field.values.size(); ++i)
        s.add(grid.weight(i) * std::norm(field.values[i]));
    return s.value();
}

AngularField normalize(const AngularField &field, const AngularGrid &grid)
{
    const double norm = sphere_norm(field, grid);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::domain_error("cannot normalize an angular field with zero norm");
    AngularField out = field;
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &v : out.values)
        v *= scale;
    out.normalized = true;
    return out;
}

std::vector<double> fiber_mode(const AngularGrid &grid, FiberPointing pointing)
{
    const double kw = grid.k * grid.waist;
    std::vector<double> ring(grid.rings(), 0.0);
    CompensatedSum norm;
    for (std::size_t r = 0; r < grid.rings(); ++r) {
        const double t = grid.theta[r];
        const bool inside = pointing == FiberPointing::backward ? t >= constants::pi / 2 : t <= constants::pi / 2;
        if (!inside)
            continue;
        const double s = kw * std::sin(t);
        ring[r] = std::exp(-s * s / 4.0);
        norm.add(grid.ring_weight[r] * ring[r] * ring[r]);
    }
    const double scale = 1.0 / std::sqrt(norm.value() * grid.phi_weight * static_cast<double>(grid.phi.size()));
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = ring[i / grid.phi.size()] * scale;
    return g;
}

EtaEstimate eta_reference(const AngularField &field, const AngularGrid &grid, const BeamMode &idler,
                          double s2, FiberPointing pointing)
{
    check_cap_resolution(grid, idler.wavenumber(), idler.waist());
    if (grid.k != idler.wavenumber() || grid.waist != idler.waist())
        throw std::invalid_argument("eta_reference: grid was built for a different idler mode");
    const double norm = sphere_norm(field, grid);
    if (!(norm > 0.0))
        throw std::domain_error("eta_reference: field has zero norm");

    const std::vector<double> g = fiber_mode(grid, pointing);
    CompensatedComplexSum overlap;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] != 0.0)
            overlap.add(grid.weight(i) * g[i] * field.values[i]);

    EtaEstimate e;
    e.numerator = std::norm(overlap.value());
    e.denominator = norm;
    e.s2 = s2;
    e.coherent_norm = norm - s2;
    e.eta = e.numerator / e.denominator;
    e.method = Method::angular;
    return e;
}

AngularResult eta_angular(const Scenario &sc, const GridSpec &grid_spec, const EstimatorOptions &opts)
{
    AngularResult res{{}, build_grid(sc.idler.wavenumber(), sc.idler.waist(), grid_spec), {}};
    const EmitterSet set = collect_emitters(sc, opts);
    if (!(set.s2 > 0.0))
        throw std::runtime_error("eta_angular: no atom carries spin-wave amplitude (S2 = 0)");
    res.field = angular_kernel(set, sc, res.grid, opts.threads);
    res.estimate = eta_reference(res.field, res.grid, sc.idler, set.s2);
    res.estimate.n_atoms = set.n_atoms;
    res.estimate.n_contributing = set.emitters.size();
    res.estimate.seed = sc.seed;
    return res;
}

void write_metadata(const std::filesystem::path &path, const Metadata &metadata)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open metadata file '" + path.string() + "' for writing");
    for (const auto &[key, value] : metadata)
        out << key << " = " << value << '\n';
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for metadata file '" + path.string() + "'");
}

void export_heatmap(const AngularField &field, const AngularGrid &grid, const Metadata &metadata,
                    const std::filesystem::path &base, const RasterSpec &raster)
{
    if (!field.normalized)
        throw std::invalid_argument("export_heatmap: field must be normalized first");
    if (field.values.size() != grid.size())
        throw std::invalid_argument("export_heatmap: field does not match the grid");
    if (std::abs(sphere_norm(field, grid) - 1.0) > 1e-8)
        throw std::domain_error("export_heatmap: field is not unit-normalized");
    if (raster.theta_cells < 1 || raster.phi_cells < 1 || raster.cap_theta_cells < 1 || raster.cap_phi_cells < 1)
        throw std::invalid_argument("export_heatmap: raster sizes must be positive");

    const std::filesystem::path dir = base.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
    }
    const std::string stem = base.string();
    write_raster(field, grid, stem + ".csv", 0.0, constants::pi, raster.theta_cells, raster.phi_cells);
    write_raster(field, grid, stem + "_cap.csv", constants::pi - grid.cap_half_width, constants::pi,
                 raster.cap_theta_cells, raster.cap_phi_cells);

    Metadata meta = metadata;
    meta.emplace_back("grid.cap_nodes", std::to_string(grid.spec.cap_nodes));
    meta.emplace_back("grid.rest_nodes", std::to_string(grid.spec.rest_nodes));
    meta.emplace_back("grid.phi_nodes", std::to_string(grid.spec.phi_nodes));
    meta.emplace_back("grid.cap_multiplier", fmt(grid.spec.cap_multiplier));
    meta.emplace_back("grid.cap_half_width_rad", fmt(grid.cap_half_width));
    meta.emplace_back("raster.theta_cells", std::to_string(raster.theta_cells));
    meta.emplace_back("raster.phi_cells", std::to_string(raster.phi_cells));
    meta.emplace_back("raster.cap_theta_cells", std::to_string(raster.cap_theta_cells));
    meta.emplace_back("raster.cap_phi_cells", std::to_string(raster.cap_phi_cells));
    meta.emplace_back("version", kVersion);
    write_metadata(stem + ".meta", meta);
}

} // namespace ire
