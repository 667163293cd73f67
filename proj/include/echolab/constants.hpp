#pragma once

namespace echolab::consts {

// CODATA 2018 / SI exact values.
inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double h_planck = 6.62607015e-34; // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace echolab::consts
