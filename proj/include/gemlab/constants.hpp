#pragma once

#include <complex>

namespace gem {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

namespace constants {

inline constexpr double k_boltzmann = 1.380649e-23;      // J/K
inline constexpr double speed_of_light = 2.99792458e8;   // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// Rb-87 values used throughout: D1 line, ground hyperfine splitting.
inline constexpr double rb87_mass = 86.9091805310 * atomic_mass_unit;  // kg
inline constexpr double rb87_d1_wavelength = 794.978851e-9;            // m
inline constexpr double rb87_d1_linewidth = two_pi * 5.7500e6;         // rad/s
inline constexpr double rb87_hyperfine_splitting = two_pi * 6.834682611e9;  // rad/s

// Ground-state Zeeman splitting between the F=1 and F=2 sublevels of the
// same m_F, per gauss per unit m_F: (g_F2 - g_F1) mu_B ~ 1.4 MHz/G.
inline constexpr double rb87_zeeman_shift_per_gauss = two_pi * 1.3996e6;  // rad/s/G

}  // namespace constants

}  // namespace gem
