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

#include "ire/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ire
{

unsigned resolve_threads(std::optional<unsigned> requested)
{
    if (requested) {
        if (*requested == 0)
            throw std::invalid_argument("thread count must be at least 1");
        return *requested;
    }
    if (const char *env = std::getenv("IRE_SIM_THREADS"); env && *env) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(env, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != std::string(env).size() || v < 1)
            throw std::invalid_argument(std::string("IRE_SIM_THREADS must be a positive integer (got '") +
                                        env + "')");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace ire
