#pragma once
#include "lab/spectrum.hpp"

namespace lab {

// Sobolev H^s: sum over the full cube of <n>^{2s} |a(n)|^2
double h_norm_sq(const SpectralField& u, double s);
inline double l2_norm_sq(const SpectralField& u) { return h_norm_sq(u, 0.0); }

// L^p norm by grid quadrature at resolution P (0 = pick a dealiased-cubic grid);
// exact for p = 2, a documented quadrature for other p (|u|^p is not band-limited)
double lp_norm(const SpectralField& u, double p, int P = 0);

// || heat(t) u ||_{L^3} with the multiplier e^{-t|n|^2}
double heat_l3(const SpectralField& u, double t, int P = 0);

// sup_{0 < t <= 1} t^{3/8} || heat(t) u ||_{L^3}, the sup taken over a geometric
// t-grid from 1 down past the field's smallest smoothing scale ~ N^-2. The grid
// sup underestimates the true sup by at most the grid's resolution in log t;
// both sides of every comparison here are evaluated on the same grid.
double a_norm(const SpectralField& u, int n_t = 24);

// taming functional of a pair: ||u||_A^p + ||w||_A^p
double vec_a_pow(const SpectralField& u, const SpectralField& w, double p = 20.0, int n_t = 24);

// coefficientwise heat flow e^{-t|n|^2}; rejects t <= 0
SpectralField heat_smooth(const SpectralField& u, double t);

// Dyadic frequency block j: multiplier chi(|n|/2^{j+1}) - chi(|n|/2^j), with
// j = -1 the low bump chi(|n|) itself. The plateau chi is 1 on r <= 5/4,
// vanishes past r = 13/8, and ramps as exp(1 - 1/(1-s^2)), s = (r-5/4)/(3/8).
// Blocks -1..max_block(N) telescope to 1 on every represented mode.
SpectralField lp_block(const SpectralField& u, int j);
int max_block(int N);

// ell^q over j of 2^{js} ||block_j u||_{L^p}; q = inf takes the sup over j,
// and (p, q) = (inf, inf) is the Holder norm
double besov_norm(const SpectralField& u, double s, double p, double q);

// low-high / resonant / high-low splitting of the pointwise product uv:
//   lo        sum over j < k-2   of block_j(u) block_k(v)
//   resonant  sum over |j-k| <= 2
//   hi        sum over k < j-2
// the three parts add back to multiply(u, v) on the full product band
struct ParaProduct {
    SpectralField lo, resonant, hi;
};
ParaProduct paraproduct_decompose(const SpectralField& u, const SpectralField& v);

} // namespace lab
