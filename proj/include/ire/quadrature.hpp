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

#ifndef IRE_QUADRATURE_HPP
#define IRE_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ire
{

class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string &what, double estimate, double abs_error,
                    std::size_t intervals)
        : std::runtime_error(what), estimate_(estimate), abs_error_(abs_error),
          intervals_(intervals)
    {
    }

    double estimate() const { return estimate_; }
    double abs_error() const { return abs_error_; }
    std::size_t intervals() const { return intervals_; }

private:
    double estimate_;
    double abs_error_;
    std::size_t intervals_;
};

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule mapped onto [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

struct AdaptiveOptions
{
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_intervals = 4000;
};

// Adaptive 21-point Gauss-Kronrod on [a, b]; throws QuadratureError when the
// requested tolerance is not met.
double integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          const AdaptiveOptions &opts = {});

} // namespace ire

#endif // IRE_QUADRATURE_HPP
