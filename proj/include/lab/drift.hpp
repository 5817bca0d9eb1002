#pragma once
#include "lab/spectrum.hpp"
#include "lab/wiener.hpp"

#include <vector>

namespace lab {

inline constexpr double kQuinticEps = 0.1;

// Time-indexed drift trajectory: snapshots at t_k = k/L for k = 0..L plus the
// kinetic energy dt sum_k ||rate_k||_{H^1}^2 accumulated by whoever built the
// path. Discrete Cauchy-Schwarz in time gives ||path(1)||_{H^1}^2 <= kinetic
// for every produced path, so cm_gap() is nonnegative.
struct DriftPath {
    int N = 0, L = 0;
    std::vector<SpectralField> s, w;  // L+1 snapshots per family
    double kinetic = 0;
    double max_h1 = 0;  // solver diagnostic: peak pair H^1 energy along the path

    DriftPath(int N_, int L_);
    double endpoint_h1() const;  // ||(s(1), w(1))||_{H^1}^2
    double cm_gap() const { return kinetic - endpoint_h1(); }
};

DriftPath zero_drift(int N, int L);

// linear ramp t -> t * (target_s, target_w); kinetic equals the pair H^1
// energy of the target, the Cameron-Martin equality case
DriftPath constant_drift(const SpectralField& target_s, const SpectralField& target_w, int L);

// Explicit Euler for the coupled shift system along one bundle path:
//   dTheta_S = [ lambda (1-Lap)^-1 P_N(<1>_S Theta_W + <1>_W Theta_S + Theta_S Theta_W)
//                - Q_N(<1>_S + Theta_S) + Upsdot_S ] dt
//   dTheta_W = [ lambda (1-Lap)^-1 P_N(2 Theta_S <1>_S + Theta_S^2)
//                - Q_N(<1>_W + Theta_W) + Upsdot_W ] dt,   Theta(0) = 0,
// with the coercive quintic drift
//   Q_N(v) = (1-Lap)^-1 P_N <grad>^{-1/2-eps} ( (<grad>^{-1/2-eps} v_N)^5 ).
// The pair H^1 energy of Theta is monitored; exceeding energy_guard aborts
// with a diagnostic (step-size instability).
DriftPath solve_shift_drift(const PathBundle& b, const DriftPath& upsilon, double lambda, int N,
                            double energy_guard = 1e8);

// defect of a solved path against trapezoidal quadrature of the same
// right-hand side, max over grid nodes of the pair L^2 norm; O(1/L) on
// smooth-in-time inputs, so halving under refinement flags scheme bugs
double shift_residual(const PathBundle& b, const DriftPath& upsilon, const DriftPath& theta,
                      double lambda);

} // namespace lab
