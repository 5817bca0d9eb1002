#pragma once
#include "lab/spectrum.hpp"
#include <string>
#include <utility>
#include <vector>

namespace lab {

// Exact lattice sums behind every renormalization constant and second-moment
// target used by the Monte Carlo layers. Conventions:
//   sigma_N   = sum_{|n_j|<=N} <n>^-2                       (linear in N)
//   c_N(n)    = sum_{n=n1+n2, both in cube N} <n1>^-2 <n2>^-2
//   sunset_N  = sum_{cube N} <n>^-2 c_N(n)                  (log in N)
// Counter-process kernels: the S-side relaxation integrates (1/2)(1-Delta)^-1
// of the Wick square, the W-side (1-Delta)^-1 of the mixed product; both are
// coupling-free and enter observables with explicit lambda factors.

struct FMoments {
    double l2;          // int f_M^2
    double h_neg_alpha; // int (<grad>^-alpha f_M)^2
    double l3;          // int f_M^3
};

double tadpole(int N);

// c_N on the frequency cube 2N (values are real; field returned for band access)
SpectralField pair_correlation(int N);

double sunset(int N);

// sum_{cube N} <n>^-4 c_N(n): the convergent quartic companion of the sunset
double quartic_sunset(int N);

// sum over the full cube 2N of <n>^-2 c_N(n): the H^-1 mass of a two-factor
// product. Wide bands (N > 64) always take a two-grid float reduction that
// fits in RAM; the flag forces that path at small N for cross-checks.
double product_band_energy(int N, bool lean_float = false);

// E || wick square (t) ||^2 in H^-1 over the full product band 2N, = 2 t^2 S(N);
// the mixed two-family product has a single pairing: t^2 S(N)
double wick_square_variance_profile(int N, double t);
double mixed_pair_variance_profile(int N, double t);

// energy counterterms: delta(N, lambda) = lambda^2 (1/12 + 1/6) sunset_N
double delta_counterterm(int N, double lambda);
std::pair<double, double> delta_counterterm_components(int N, double lambda);  // (S, W)

// E[H_N^2] for the cubic interaction energy at coupling lambda: (lambda^2/2) sunset_N
double cubic_variance(int N, double lambda);

// cross energies of the counter processes at cutoffs N <= M: ( sunset_N/6, sunset_N/3 );
// M enters only through projectors that are identities on the support
std::pair<double, double> cross_log_sum(int N, int M);

// concentrated low-frequency profile: f_M = M^{-3/2} sum_n psi(|n|/M)/C e_n,
// psi a fixed smooth bump on (1/2,1), C making the continuum L2 mass 1
SpectralField f_profile(int M);
FMoments f_moments(int M, double alpha = 1.0);

// centering scale of the cutoff mass statistic:
//   alpha(M,N,lambda) * int f_M^2 = sigma_N - E int (A_N - Z_M)^2(1)
// evaluated in closed form through the per-mode relaxation integrals
double alpha_coefficient(int M, int N, double lambda);

// tabulated emission for the CLI
struct DiagramRow {
    std::string kind;
    int N, M;
    double lambda, value;
};
std::vector<DiagramRow> diagram_table(const std::vector<int>& Ns, const std::vector<int>& Ms,
                                      const std::vector<double>& lambdas);

} // namespace lab
