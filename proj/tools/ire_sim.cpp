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

// ire-sim: command-line driver for retrieval-efficiency runs, sweeps and
// angular heatmaps. See README.md for the config grammar and output schemas.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ire/angular_field.hpp"
#include "ire/config.hpp"
#include "ire/experiments.hpp"
#include "ire/parallel.hpp"
#include "ire/version.hpp"

namespace fs = std::filesystem;

namespace
{

struct CommonFlags
{
    std::string config;
    std::string out = "ire_out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> method;
};

std::string g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

ire::RunConfig load(const CommonFlags &f)
{
    ire::RunConfig c = ire::parse_config_file(f.config);
    if (f.seed)
        c.seed = *f.seed;
    if (f.method)
        c.method = ire::parse_method(*f.method);
    return c;
}

ire::Metadata scenario_metadata(const ire::ResolvedRun &run)
{
    const ire::RunConfig &c = run.config;
    ire::Metadata m = {
        {"version", ire::kVersion},
        {"seed", std::to_string(c.seed)},
        {"method", ire::to_string(c.method)},
        {"species.wavelength_nm", g9(c.wavelength_nm)},
        {"species.delta_over_2pi_hz", g9(c.delta_over_2pi_hz)},
        {"species.omega_sg_over_2pi_hz", g9(c.omega_sg_over_2pi_hz)},
        {"species.sigma0_m2", g9(c.sigma0_m2)},
        {"species.cg_sq", g9(c.cg_sq)},
        {"species.atom_mass_amu", g9(c.atom_mass_amu)},
        {"cloud.r0_m", g9(c.r0_m)},
        {"cloud.temperature_k", g9(c.temperature_k)},
        {"beams.w_write_m", g9(c.w_write_m)},
        {"beams.w_signal_m", g9(c.w_signal_m)},
        {"beams.w_idler_m", g9(c.w_idler_m)},
        {"run.theta_deg", g9(c.theta_deg)},
        {"run.tm_us", g9(c.tm_us)},
        {"run.normalization", c.normalization == ire::Normalization::modal ? "modal" : "incoherent"},
        {"run.mode_order", std::to_string(c.mode_order)},
        {"od", g9(run.optical_depth)},
        {"wr", g9(run.width_ratio)},
    };
    m.insert(m.end(), run.report.begin(), run.report.end());
    return m;
}

// Everything needed to re-run the job, plus a timestamp kept out of the data files.
void write_run_metadata(const fs::path &dir, const ire::ResolvedRun &run, const std::string &command,
                        unsigned threads, const ire::Metadata &extra = {})
{
    ire::write_text_file(dir / "config.cfg", ire::to_config_text(run.config));
    ire::Metadata m = scenario_metadata(run);
    m.emplace_back("command", command);
    m.insert(m.end(), extra.begin(), extra.end());
    m.emplace_back("threads", std::to_string(threads));
    m.emplace_back("created_utc", utc_now());
    ire::write_metadata(dir / "metadata.txt", m);
}

std::string eta_csv(const ire::ResolvedRun &run, const ire::EtaEstimate &e)
{
    std::ostringstream os;
    os << "od,wr,theta_deg,tm_us,n_atoms,method,seed,eta,numerator,denominator,s2,coherent_norm,n_contributing\n"
       << g9(run.optical_depth) << ',' << g9(run.width_ratio) << ',' << g9(run.config.theta_deg) << ','
       << g9(run.config.tm_us) << ',' << e.n_atoms << ',' << ire::to_string(e.method) << ',' << e.seed << ','
       << g9(e.eta) << ',' << g9(e.numerator) << ',' << g9(e.denominator) << ',' << g9(e.s2) << ','
       << g9(e.coherent_norm) << ',' << e.n_contributing << '\n';
    return os.str();
}

int cmd_eta(const CommonFlags &f)
{
    const ire::ResolvedRun run = ire::resolve(load(f));
    const unsigned threads = ire::resolve_threads(f.threads);
    const ire::EstimatorOptions opts = ire::estimator_options(run.config, threads);
    const ire::EtaEstimate e = run.config.method == ire::Method::paraxial
                                   ? ire::eta_paraxial(run.scenario, opts)
                                   : ire::eta_angular(run.scenario, run.config.grid, opts).estimate;
    const std::string csv = eta_csv(run, e);
    std::cout << csv;
    const fs::path dir(f.out);
    ire::write_text_file(dir / "eta.csv", csv);
    write_run_metadata(dir, run, "eta", threads);
    return 0;
}

int cmd_od(const CommonFlags &f)
{
    const ire::ResolvedRun run = ire::resolve(load(f));
    std::cout << "optical_depth = " << g17(run.optical_depth) << '\n'
              << "n0_m3 = " << g17(run.peak_density) << '\n'
              << "n_atoms = " << run.n_atoms << '\n';
    return 0;
}

int cmd_angular(const CommonFlags &f)
{
    ire::RunConfig cfg = load(f);
    cfg.method = ire::Method::angular;
    const ire::ResolvedRun run = ire::resolve(cfg);
    const unsigned threads = ire::resolve_threads(f.threads);
    const ire::EstimatorOptions opts = ire::estimator_options(run.config, threads);
    const ire::AngularResult res = ire::eta_angular(run.scenario, run.config.grid, opts);
    const fs::path dir(f.out);
    ire::export_heatmap(ire::normalize(res.field, res.grid), res.grid, scenario_metadata(run), dir / "heatmap");
    const std::string csv = eta_csv(run, res.estimate);
    std::cout << csv;
    ire::write_text_file(dir / "eta.csv", csv);
    write_run_metadata(dir, run, "angular", threads);
    return 0;
}

std::vector<double> parse_values(const std::string &list)
{
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw CLI::ValidationError("--values", "'" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty())
        throw CLI::ValidationError("--values", "empty value list");
    return out;
}

int cmd_sweep(const CommonFlags &f, const std::string &axis, const std::string &values, int replicates)
{
    ire::SweepSpec spec;
    spec.base = load(f);
    spec.axis = ire::parse_sweep_axis(axis);
    spec.values = parse_values(values);
    spec.replicates = replicates;
    spec.method = spec.base.method;
    ire::validate(spec);
    const ire::ResolvedRun base = ire::resolve(spec.base);

    const unsigned threads = ire::resolve_threads(f.threads);
    const std::vector<ire::SweepRow> rows = ire::run_sweep(spec, threads);
    const std::string csv = ire::sweep_csv(rows);
    std::cout << csv;

    const fs::path dir(f.out);
    ire::write_text_file(dir / "sweep.csv", csv);
    ire::Metadata extra = {{"sweep.axis", axis}, {"sweep.values", values},
                           {"sweep.replicates", std::to_string(replicates)}};
    int failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].error) {
            extra.emplace_back("sweep.error." + std::to_string(i), *rows[i].error);
            std::cerr << "error: sweep point " << spec.values[i] << ": " << *rows[i].error << '\n';
            ++failed;
        }
    write_run_metadata(dir, base, "sweep", threads, extra);
    return failed ? 3 : 0;
}

void add_common(CLI::App *sub, CommonFlags &f, bool with_output, bool with_method)
{
    sub->add_option("--config", f.config, "Config document (INI-style blocks)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Override run.seed");
    if (with_output) {
        sub->add_option("--out", f.out, "Output directory")->capture_default_str();
        sub->add_option("--threads", f.threads, "Worker threads (default: IRE_SIM_THREADS, then all cores)")
            ->check(CLI::PositiveNumber);
    }
    if (with_method)
        sub->add_option("--method", f.method, "Estimator")->check(CLI::IsMember({"paraxial", "angular"}));
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Monte Carlo intrinsic retrieval efficiency of an atomic-ensemble memory"};
    app.set_version_flag("--version", std::string(ire::kVersion));
    app.require_subcommand(1);

    CommonFlags f;
    auto *eta = app.add_subcommand("eta", "Estimate the retrieval efficiency for one scenario");
    add_common(eta, f, true, true);

    auto *sweep = app.add_subcommand("sweep", "Sweep one axis with seeded replicates");
    add_common(sweep, f, true, true);
    std::string axis, values;
    int replicates = 5;
    sweep->add_option("--sweep", axis, "width_ratio | optical_depth | storage_time | skew_angle")
        ->required()
        ->check(CLI::IsMember({"width_ratio", "optical_depth", "storage_time", "skew_angle"}));
    sweep->add_option("--values", values, "Comma-separated, strictly increasing")->required();
    sweep->add_option("--replicates", replicates, "Independent seeds per point")->capture_default_str()->check(CLI::PositiveNumber);

    auto *angular = app.add_subcommand("angular", "Sample the angular idler mode and write heatmaps");
    add_common(angular, f, true, false);

    auto *od = app.add_subcommand("od", "Print optical depth and resolved density");
    add_common(od, f, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        if (*eta)
            return cmd_eta(f);
        if (*sweep)
            return cmd_sweep(f, axis, values, replicates);
        if (*angular)
            return cmd_angular(f);
        return cmd_od(f);
    } catch (const ire::ConfigError &e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const CLI::Error &e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
