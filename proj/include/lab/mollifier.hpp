#pragma once
#include "lab/spectrum.hpp"

namespace lab {

// Fourier-side mollifier profile built as the self-convolution of the radial bump
//   psi(s) = exp(-1/(1-s^2)) for |s| < 1, 0 otherwise,
// normalized so the profile equals 1 at the origin:
//   shape(r) = (psi * psi)(r) / (psi * psi)(0)   (3d radial convolution).
// Self-convolution makes the profile nonnegative with support in {r <= 2}, and
// shape(0) = 1 means the physical-side kernel integrates to one. The physical
// kernel is itself nonnegative (a squared modulus), so smoothing by it is an
// average over translates: every translation-invariant norm can only shrink.
double mollifier_shape(double r);

// multiply u's modes by shape(eps * |n|); eps > 0, eps -> 0 is the identity
void apply_mollifier(SpectralField& u, double eps);

// the multiplier applied to a single mode
double mollifier_multiplier(const Index3& n, double eps);

} // namespace lab
