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

#ifndef IRE_VERSION_HPP
#define IRE_VERSION_HPP

#ifndef IRE_SIM_VERSION
#define IRE_SIM_VERSION "unknown"
#endif

namespace ire
{
inline constexpr const char *kVersion = IRE_SIM_VERSION;
}

#endif // IRE_VERSION_HPP
