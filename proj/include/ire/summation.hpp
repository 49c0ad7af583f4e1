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

#ifndef IRE_SUMMATION_HPP
#define IRE_SUMMATION_HPP

#include <cmath>
#include <complex>

namespace ire
{

// Neumaier's variant of Kahan summation; order of add() calls fixes the result.
class CompensatedSum
{
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    void merge(const CompensatedSum &o)
    {
        add(o.sum_);
        add(o.comp_);
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum
{
public:
    void add(std::complex<double> v)
    {
        re_.add(v.real());
        im_.add(v.imag());
    }

    void merge(const CompensatedComplexSum &o)
    {
        re_.merge(o.re_);
        im_.merge(o.im_);
    }

    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

} // namespace ire

#endif // IRE_SUMMATION_HPP
