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

#ifndef IRE_CONSTANTS_HPP
#define IRE_CONSTANTS_HPP

#include <numbers>

namespace ire::constants
{

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double boltzmann = 1.380649e-23;          // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

// Rb-87 D1 line parameters used by the default experiment.
inline constexpr double rb87_mass = 87.0 * atomic_mass_unit;
inline constexpr double rb87_d1_wavelength = 795e-9;       // m
inline constexpr double rb87_hyperfine_splitting = -two_pi * 6.8e9; // rad/s, omega_s - omega_g
inline constexpr double default_detuning = two_pi * 10e6;  // rad/s
// Off-resonant D1 cross-section, 1.082e-9 cm^2 expressed in m^2.
inline constexpr double rb87_d1_cross_section = 1.082e-13;

} // namespace ire::constants

#endif // IRE_CONSTANTS_HPP
