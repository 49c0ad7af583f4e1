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

#include "ire/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ire/summation.hpp"

namespace ire
{
namespace
{

std::string g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct Job
{
    std::size_t row;
    Scenario scenario;
};

} // namespace

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::width_ratio:
        return "width_ratio";
    case SweepAxis::optical_depth:
        return "optical_depth";
    case SweepAxis::storage_time:
        return "storage_time";
    case SweepAxis::skew_angle:
        return "skew_angle";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string &s)
{
    for (SweepAxis a : {SweepAxis::width_ratio, SweepAxis::optical_depth, SweepAxis::storage_time, SweepAxis::skew_angle})
        if (s == to_string(a))
            return a;
    throw std::invalid_argument("unknown sweep axis '" + s +
                                "' (expected width_ratio, optical_depth, storage_time or skew_angle)");
}

std::pair<double, double> aggregate(const std::vector<double> &etas)
{
    if (etas.empty())
        throw std::invalid_argument("aggregate: no replicate values");
    CompensatedSum sum;
    for (double v : etas)
        sum.add(v);
    const double n = static_cast<double>(etas.size());
    const double mean = sum.value() / n;
    if (etas.size() == 1)
        return {mean, 0.0};
    CompensatedSum ss;
    for (double v : etas)
        ss.add((v - mean) * (v - mean));
    const double sd = std::sqrt(ss.value() / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

RunConfig apply_axis(const RunConfig &base, SweepAxis axis, double value)
{
    RunConfig c = base;
    switch (axis) {
    case SweepAxis::width_ratio:
        if (!(value > 0.0))
            throw ConfigError("sweep.width_ratio", "values must be positive", "give W_i/W_w ratios such as 0.58");
        c.w_signal_m = value * base.w_write_m;
        c.w_idler_m = value * base.w_write_m;
        break;
    case SweepAxis::optical_depth:
        if (base.density_kind == DensityKind::atom_count)
            throw ConfigError("cloud.n_atoms_override", "an optical-depth sweep needs a physical density",
                              "replace n_atoms_override by n0_m3 or target_od");
        c.density_kind = DensityKind::target_od;
        c.density_value = value;
        break;
    case SweepAxis::storage_time:
        c.tm_us = value;
        break;
    case SweepAxis::skew_angle:
        c.theta_deg = value;
        break;
    }
    return c;
}

void validate(const SweepSpec &spec)
{
    if (spec.values.empty())
        throw std::invalid_argument("sweep: value list is empty");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (!std::isfinite(spec.values[i]))
            throw std::invalid_argument("sweep: values must be finite");
        if (i > 0 && !(spec.values[i] > spec.values[i - 1]))
            throw std::invalid_argument("sweep: values must be strictly increasing");
    }
    if (spec.replicates < 1)
        throw std::invalid_argument("sweep: replicates must be at least 1");
}

std::vector<SweepRow> run_sweep(const SweepSpec &spec, unsigned threads)
{
    validate(spec);
    std::vector<SweepRow> rows(spec.values.size());
    std::vector<std::optional<ResolvedRun>> resolved(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        SweepRow &row = rows[i];
        row.method = spec.method;
        row.replicates = spec.replicates;
        row.seed_base = spec.base.seed;
        try {
            RunConfig c = apply_axis(spec.base, spec.axis, spec.values[i]);
            c.method = spec.method;
            resolved[i] = resolve(c);
            row.od = resolved[i]->optical_depth;
            row.wr = resolved[i]->width_ratio;
            row.theta_deg = c.theta_deg;
            row.tm_us = c.tm_us;
            row.n_atoms = resolved[i]->n_atoms;
        } catch (const std::exception &e) {
            row.error = e.what();
        }
    }

    std::vector<std::vector<double>> etas(rows.size(), std::vector<double>(static_cast<std::size_t>(spec.replicates)));
    const EstimatorOptions opts = estimator_options(spec.base, threads);

    for (int r = 0; r < spec.replicates; ++r) {
        const std::uint64_t seed = spec.base.seed + static_cast<std::uint64_t>(r);
        std::vector<Job> jobs;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!resolved[i])
                continue;
            Scenario sc = resolved[i]->scenario;
            sc.seed = seed;
            jobs.push_back({i, sc});
        }

        if (spec.method == Method::angular) {
            for (const Job &job : jobs) {
                if (rows[job.row].error)
                    continue;
                try {
                    etas[job.row][static_cast<std::size_t>(r)] =
                        eta_angular(job.scenario, spec.base.grid, opts).estimate.eta;
                } catch (const std::exception &e) {
                    rows[job.row].error = e.what();
                }
            }
            continue;
        }

        // Points that share the atom sample go through one streaming pass.
        using Key = std::tuple<std::uint64_t, double, double>;
        std::vector<std::pair<Key, std::vector<const Job *>>> groups;
        for (const Job &job : jobs) {
            const CloudSpec &cl = job.scenario.cloud;
            const Key key{cl.atom_count(), cl.sigma, cl.velocity_sigma()};
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto &g) { return g.first == key; });
            if (it == groups.end()) {
                groups.push_back({key, {}});
                it = groups.end() - 1;
            }
            it->second.push_back(&job);
        }
        for (const auto &[key, members] : groups) {
            std::vector<Scenario> batch;
            for (const Job *j : members)
                batch.push_back(j->scenario);
            try {
                const std::vector<EtaEstimate> est = eta_paraxial_batch(batch, opts);
                for (std::size_t m = 0; m < members.size(); ++m)
                    etas[members[m]->row][static_cast<std::size_t>(r)] = est[m].eta;
            } catch (const std::exception &e) {
                for (const Job *j : members)
                    rows[j->row].error = e.what();
            }
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].error)
            continue;
        rows[i].etas = etas[i];
        std::tie(rows[i].eta_mean, rows[i].eta_stderr) = aggregate(etas[i]);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows)
{
    std::ostringstream os;
    os << "od,wr,theta_deg,tm_us,n_atoms,method,replicates,eta_mean,eta_stderr,etas_json,seed_base\n";
    for (const SweepRow &r : rows) {
        std::string etas = "[";
        for (std::size_t i = 0; i < r.etas.size(); ++i)
            etas += (i ? "," : "") + g9(r.etas[i]);
        etas += "]";
        const bool bad = r.error.has_value();
        os << g9(r.od) << ',' << g9(r.wr) << ',' << g9(r.theta_deg) << ',' << g9(r.tm_us) << ',' << r.n_atoms << ','
           << to_string(r.method) << ',' << r.replicates << ',' << (bad ? "nan" : g9(r.eta_mean)) << ','
           << (bad ? "nan" : g9(r.eta_stderr)) << ",\"" << etas << "\"," << r.seed_base << '\n';
    }
    return os.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text)
{
    if (const auto dir = path.parent_path(); !dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace ire
