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

#ifndef IRE_EXPERIMENTS_HPP
#define IRE_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ire/config.hpp"

namespace ire
{

enum class SweepAxis
{
    width_ratio,   // W_s = W_i = value * W_w, W_w fixed
    optical_depth, // density via density_for_od, beams fixed
    storage_time,  // microseconds
    skew_angle     // degrees
};

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string &s);

struct SweepSpec
{
    RunConfig base;
    SweepAxis axis = SweepAxis::storage_time;
    std::vector<double> values; // strictly increasing
    int replicates = 5;
    Method method = Method::paraxial;
};

struct SweepRow
{
    double od = 0.0;
    double wr = 0.0;
    double theta_deg = 0.0;
    double tm_us = 0.0;
    std::uint64_t n_atoms = 0;
    Method method = Method::paraxial;
    int replicates = 0;
    double eta_mean = 0.0;
    double eta_stderr = 0.0;
    std::vector<double> etas;
    std::uint64_t seed_base = 0;
    std::optional<std::string> error;
};

// Arithmetic mean and sample standard deviation / sqrt(n); throws on empty input.
std::pair<double, double> aggregate(const std::vector<double> &etas);

// The base config with the swept axis set to value; throws ConfigError.
RunConfig apply_axis(const RunConfig &base, SweepAxis axis, double value);

void validate(const SweepSpec &spec);

// One row per value in spec order. Replicate r uses seed base + r. A point that
// fails records its message in SweepRow::error and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec &spec, unsigned threads = 1);

std::string sweep_csv(const std::vector<SweepRow> &rows);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace ire

#endif // IRE_EXPERIMENTS_HPP
