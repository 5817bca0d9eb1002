#include "lab/norms.hpp"
#include "lab/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lab {

double h_norm_sq(const SpectralField& u, double s) {
    return u.reduce([s](const Index3& n, std::complex<double> v) {
        double b2 = bracket2(n);
        return std::pow(b2, s) * std::norm(v);
    });
}

namespace {

int quad_grid(const SpectralField& u, int P) {
    if (P > 0) {
        if (P < 2 * u.N + 1) throw std::invalid_argument("quadrature grid under the field band");
        return P;
    }
    return good_fft_size(3 * u.N + 1);
}

double grid_lp(const std::vector<double>& g, double p) {
    double acc = 0;
    if (std::isinf(p)) {
        for (double v : g) acc = std::max(acc, std::fabs(v));
        return acc;
    }
    if (p == 2.0) {
        for (double v : g) acc += v * v;
    } else if (p == 3.0) {
        for (double v : g) acc += std::fabs(v) * v * v;
    } else {
        for (double v : g) acc += std::pow(std::fabs(v), p);
    }
    return std::pow(acc / double(g.size()), 1.0 / p);
}

} // namespace

double lp_norm(const SpectralField& u, double p, int P) {
    P = quad_grid(u, P);
    std::vector<double> g;
    synth(u, P, g);
    return grid_lp(g, p);
}

double heat_l3(const SpectralField& u, double t, int P) {
    SpectralField v = u;
    v.scale_modes([t](const Index3& n) { return std::exp(-t * double(norm2(n))); });
    return lp_norm(v, 3.0, P);
}

double a_norm(const SpectralField& u, int n_t) {
    if (n_t < 2) throw std::invalid_argument("a_norm needs at least 2 grid times");
    const int P = quad_grid(u, 0);
    const double t_min = std::min(1.0, 0.5 / (1.0 + double(u.N) * u.N)) / 8.0;
    const double ratio = std::pow(t_min, 1.0 / (n_t - 1));
    std::vector<double> g;
    double best = 0, t = 1.0;
    for (int j = 0; j < n_t; ++j, t *= ratio) {
        SpectralField v = u;
        v.scale_modes([t](const Index3& n) { return std::exp(-t * double(norm2(n))); });
        synth(v, P, g);
        best = std::max(best, std::pow(t, 0.375) * grid_lp(g, 3.0));
    }
    return best;
}

double vec_a_pow(const SpectralField& u, const SpectralField& w, double p, int n_t) {
    return std::pow(a_norm(u, n_t), p) + std::pow(a_norm(w, n_t), p);
}

SpectralField heat_smooth(const SpectralField& u, double t) {
    if (t <= 0.0) throw std::invalid_argument("heat time must be positive");
    SpectralField v = u;
    v.scale_modes([t](const Index3& n) { return std::exp(-t * double(norm2(n))); });
    return v;
}

namespace {

double lp_plateau(double r) {
    if (r <= 1.25) return 1.0;
    if (r >= 1.625) return 0.0;
    double s = (r - 1.25) / 0.375;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// scaling by exact powers of two keeps the shared plateau evaluations of
// neighbouring blocks bit-identical, so the telescoping sum closes cleanly
double block_weight(const Index3& n, int j) {
    double r = std::sqrt(double(norm2(n)));
    if (j < 0) return lp_plateau(r);
    double h = std::ldexp(r, -j);
    return lp_plateau(0.5 * h) - lp_plateau(h);
}

void acc_field(SpectralField& dst, const SpectralField& src) {
    for (std::int64_t i = 0; i < dst.hc.size; ++i) dst.a[i] += src.a[i];
}

} // namespace

int max_block(int N) {
    double top = std::sqrt(3.0) * N;
    int j = 0;
    while (std::ldexp(1.25, j + 1) < top) ++j;
    return j;
}

SpectralField lp_block(const SpectralField& u, int j) {
    if (j < -1) throw std::invalid_argument("block index starts at -1");
    SpectralField v = u;
    v.scale_modes([j](const Index3& n) { return block_weight(n, j); });
    return v;
}

double besov_norm(const SpectralField& u, double s, double p, double q) {
    const int J = max_block(u.N);
    double acc = 0, top = 0;
    for (int j = -1; j <= J; ++j) {
        double wj = std::pow(2.0, s * j) * lp_norm(lp_block(u, j), p);
        if (std::isinf(q))
            top = std::max(top, wj);
        else
            acc += std::pow(wj, q);
    }
    return std::isinf(q) ? top : std::pow(acc, 1.0 / q);
}

ParaProduct paraproduct_decompose(const SpectralField& u, const SpectralField& v) {
    const int J = std::max(max_block(u.N), max_block(v.N));
    const int band = u.N + v.N;
    std::vector<SpectralField> bu, bv;
    bu.reserve(J + 2);
    bv.reserve(J + 2);
    for (int j = -1; j <= J; ++j) {
        bu.push_back(lp_block(u, j));
        bv.push_back(lp_block(v, j));
    }
    ParaProduct out{SpectralField(band), SpectralField(band), SpectralField(band)};
    out.lo.zero();
    out.resonant.zero();
    out.hi.zero();
    SpectralField prod(band);
    SpectralField low_u(u.N), low_v(v.N);
    low_u.zero();
    low_v.zero();
    for (int k = -1; k <= J; ++k) {
        if (k - 3 >= -1) {
            acc_field(low_u, bu[k - 2]);  // running S_{k-3} u
            multiply(low_u, bv[k + 1], prod);
            acc_field(out.lo, prod);
        }
        for (int j = std::max(-1, k - 2); j <= std::min(J, k + 2); ++j) {
            multiply(bu[j + 1], bv[k + 1], prod);
            acc_field(out.resonant, prod);
        }
        if (k - 3 >= -1) {
            acc_field(low_v, bv[k - 2]);
            multiply(bu[k + 1], low_v, prod);
            acc_field(out.hi, prod);
        }
    }
    return out;
}

} // namespace lab
