#pragma once

#include <stdexcept>

#include "gemlab/constants.hpp"

namespace gem {

// The atomic medium as the memory sees it: everything upstream (trap,
// pumping, compression) is folded into these numbers.
struct EnsembleParams {
    double optical_depth = 488.0;  // resonant OD on the working Zeeman line
    double length = 0.05;          // m
    double excited_linewidth = constants::rb87_d1_linewidth;       // rad/s
    double ground_decoherence = 0.0;                               // rad/s
    double raman_detuning = two_pi * 325e6;                        // rad/s, blue
    double temperature = 100e-6;                                   // K
    double probe_waist = 110e-6;                                   // m
    double atom_mass = constants::rb87_mass;                       // kg

    // True when Delta >> Gamma holds well enough for the adiabatic model.
    bool adiabatic_ok() const { return raman_detuning >= 10.0 * excited_linewidth; }

    void validate() const {
        if (!(optical_depth >= 0.0)) throw std::invalid_argument("ensemble: OD must be >= 0");
        if (!(length > 0.0)) throw std::invalid_argument("ensemble: length must be > 0");
        if (!(excited_linewidth > 0.0))
            throw std::invalid_argument("ensemble: excited linewidth must be > 0");
        if (ground_decoherence < 0.0)
            throw std::invalid_argument("ensemble: ground decoherence must be >= 0");
        if (!(raman_detuning > 0.0)) throw std::invalid_argument("ensemble: detuning must be > 0");
        if (!(temperature > 0.0)) throw std::invalid_argument("ensemble: temperature must be > 0");
        if (!(probe_waist > 0.0)) throw std::invalid_argument("ensemble: waist must be > 0");
        if (!(atom_mass > 0.0)) throw std::invalid_argument("ensemble: mass must be > 0");
    }
};

}  // namespace gem
