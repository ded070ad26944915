#pragma once

#include "gemlab/constants.hpp"

namespace gem {

// Error function of a complex argument.
//
// Evaluation strategy: a confluent-hypergeometric series for small |z|, a
// rational Faddeeva approximation at intermediate radii, and the Laplace
// continued fraction asymptotics for large |z|. Relative accuracy is better
// than 1e-12 for |z| <= 10 (away from the isolated complex zeros of erf,
// where relative error is meaningless). Arguments with |z| >= 50 saturate to
// the sector limit; NaN input throws std::invalid_argument.
cplx complex_erf(cplx z);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz), any z.
cplx faddeeva_w(cplx z);

}  // namespace gem
