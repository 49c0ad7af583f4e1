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

#include "ire/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <sstream>

namespace ire
{
namespace
{

// GSL aborts on error by default; status codes are checked explicitly here.
struct DisableGslAbort
{
    DisableGslAbort() { gsl_set_error_handler_off(); }
};
const DisableGslAbort disable_gsl_abort;

struct GlTableDeleter
{
    void operator()(gsl_integration_glfixed_table *t) const { gsl_integration_glfixed_table_free(t); }
};

struct WorkspaceDeleter
{
    void operator()(gsl_integration_workspace *w) const { gsl_integration_workspace_free(w); }
};

double trampoline(double x, void *params)
{
    return (*static_cast<const std::function<double(double)> *>(params))(x);
}

} // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b)
{
    if (n == 0)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    std::unique_ptr<gsl_integration_glfixed_table, GlTableDeleter> table(
        gsl_integration_glfixed_table_alloc(n));
    if (!table)
        throw std::runtime_error("gauss_legendre: table allocation failed");

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (gsl_integration_glfixed_point(a, b, i, &rule.nodes[i], &rule.weights[i], table.get()) !=
            GSL_SUCCESS)
            throw std::runtime_error("gauss_legendre: node evaluation failed");
    }
    return rule;
}

double integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          const AdaptiveOptions &opts)
{
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(opts.max_intervals));
    if (!ws)
        throw std::runtime_error("integrate_adaptive: workspace allocation failed");

    gsl_function fn;
    fn.function = &trampoline;
    fn.params = const_cast<std::function<double(double)> *>(&f);

    double result = 0.0;
    double abserr = 0.0;
    const int status = gsl_integration_qag(&fn, a, b, opts.abs_tol, opts.rel_tol, opts.max_intervals,
                                           GSL_INTEG_GAUSS21, ws.get(), &result, &abserr);
    if (status != GSL_SUCCESS) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] did not converge ("
           << gsl_strerror(status) << "): estimate " << result << ", abs error " << abserr
           << " after " << ws->size << " intervals";
        throw QuadratureError(os.str(), result, abserr, ws->size);
    }
    return result;
}

} // namespace ire
