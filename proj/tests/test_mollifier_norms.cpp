#include "doctest.h"
#include "lab/fft.hpp"
#include "lab/mollifier.hpp"
#include "lab/norms.hpp"

#include <cmath>

using namespace lab;

TEST_CASE("mollifier shape: normalization, support, positivity") {
    CHECK(mollifier_shape(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mollifier_shape(2.0) == 0.0);
    CHECK(mollifier_shape(5.0) == 0.0);
    for (int i = 0; i <= 400; ++i) {
        double r = 2.0 * i / 400;
        double v = mollifier_shape(r);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
    // decay well inside the support: the overlap of the two bumps shrinks with r
    CHECK(mollifier_shape(1.0) < mollifier_shape(0.25));
    CHECK(mollifier_shape(1.9) < 1e-4);
}

TEST_CASE("mollifier shape matches a direct 3d convolution quadrature") {
    // midpoint cubature of (psi*psi)(r e_z) / (psi*psi)(0) on [-1,1]^3
    auto bump = [](double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; };
    auto conv = [&](double r) {
        const int m = 48;
        const double h = 2.0 / m;
        double acc = 0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double x = -1 + (i + 0.5) * h, y = -1 + (j + 0.5) * h, z = -1 + (k + 0.5) * h;
                    double zz = z - r;
                    acc += bump(x * x + y * y + z * z) * bump(x * x + y * y + zz * zz);
                }
        return acc * h * h * h;
    };
    double c0 = conv(0.0);
    for (double r : {0.3, 0.8, 1.4}) {
        CHECK(mollifier_shape(r) == doctest::Approx(conv(r) / c0).epsilon(2e-3));
    }
}

TEST_CASE("mollifier on fields: mean preserved, contraction, eps -> 0 identity") {
    Rng rng(stream_key(123, 7, 7, 0));
    const int N = 6;
    SpectralField u(N);
    draw_free_field(u, rng);
    double mean0 = u.at({0, 0, 0}).real();

    SpectralField v = u;
    apply_mollifier(v, 0.3);
    CHECK(v.at({0, 0, 0}).real() == doctest::Approx(mean0).epsilon(1e-15));
    CHECK(l2_norm_sq(v) <= l2_norm_sq(u) * (1 + 1e-12));
    CHECK(h_norm_sq(v, 1.0) <= h_norm_sq(u, 1.0) * (1 + 1e-12));
    CHECK(a_norm(v) <= a_norm(u) * (1 + 1e-10));

    SpectralField w = u;
    apply_mollifier(w, 1e-10);
    double diff = 0;
    for (std::size_t i = 0; i < u.a.size(); ++i) diff = std::max(diff, std::abs(u.a[i] - w.a[i]));
    CHECK(diff < 1e-12);
}

TEST_CASE("L2 grid norm equals the Parseval mode sum") {
    Rng rng(stream_key(99, 7, 7, 1));
    SpectralField u(5);
    draw_free_field(u, rng);
    double par = l2_norm_sq(u);
    double grid = lp_norm(u, 2.0);
    CHECK(grid * grid == doctest::Approx(par).epsilon(1e-12));
}

TEST_CASE("Lp norms on explicit fields") {
    // u = 2 cos(x0): |u|^3 has mean 32/(3 pi), |u|^2 has mean 2
    SpectralField u(2);
    u.zero();
    u.set({1, 0, 0}, {1.0, 0.0});
    CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(lp_norm(u, 3.0, 54) == doctest::Approx(std::cbrt(32.0 / (3.0 * M_PI))).epsilon(1e-6));
    // constant field: every norm is the constant
    SpectralField c(2);
    c.zero();
    c.set({0, 0, 0}, {1.5, 0.0});
    CHECK(lp_norm(c, 3.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(a_norm(c) == doctest::Approx(1.5).epsilon(1e-12));  // sup at t = 1, heat fixes constants
}

TEST_CASE("a_norm on a single high mode: scale selection") {
    // u = 2 cos(n.x): t^{3/8} e^{-t|n|^2} ||2 cos||_3 maximized near t = 3/(8|n|^2)
    for (int k : {3, 6}) {
        SpectralField u(k);
        u.zero();
        u.set({k, 0, 0}, {1.0, 0.0});
        double l3 = std::cbrt(32.0 / (3.0 * M_PI));
        double topt = 3.0 / (8.0 * k * k);
        double expect = std::pow(topt, 0.375) * std::exp(-0.375) * l3;
        // grid sup sits a hair under the analytic sup
        double got = a_norm(u, 48);
        CHECK(got <= expect * (1 + 1e-9));
        CHECK(got >= expect * 0.98);
    }
}

TEST_CASE("a_norm is controlled by H^{-1/4} on free-field draws") {
    // operator bound with a measured constant: ratio stays under 2.0 on GFF
    // draws and under 1.1 on pure modes (margin documented by the checks below)
    Rng rng(stream_key(7, 7, 7, 2));
    for (int rep = 0; rep < 8; ++rep) {
        SpectralField u(8);
        draw_free_field(u, rng);
        double ratio = a_norm(u) / std::sqrt(h_norm_sq(u, -0.25));
        CHECK(ratio < 2.0);
    }
    for (int k : {1, 4, 8}) {
        SpectralField u(8);
        u.zero();
        u.set({0, k, 0}, {0.7, 0.0});
        CHECK(a_norm(u) / std::sqrt(h_norm_sq(u, -0.25)) < 1.1);
    }
}

TEST_CASE("vec taming functional") {
    SpectralField u(2), w(2);
    u.zero();
    w.zero();
    u.set({0, 0, 0}, {1.1, 0.0});
    w.set({0, 0, 0}, {0.9, 0.0});
    double v = vec_a_pow(u, w, 20.0);
    CHECK(v == doctest::Approx(std::pow(1.1, 20) + std::pow(0.9, 20)).epsilon(1e-9));
}

TEST_CASE("heat smoothing: multiplier law and rejection") {
    SpectralField u(3);
    u.zero();
    u.set({2, -1, 0}, {1.0, 0.5});
    SpectralField v = heat_smooth(u, 0.3);
    auto c = v.at({2, -1, 0});
    CHECK(c.real() == doctest::Approx(std::exp(-0.3 * 5.0)).epsilon(1e-14));
    CHECK(c.imag() == doctest::Approx(0.5 * std::exp(-0.3 * 5.0)).epsilon(1e-14));
    CHECK_THROWS(heat_smooth(u, 0.0));
}

TEST_CASE("dyadic blocks: partition of unity, single-shell support") {
    Rng rng(stream_key(41, 7, 7, 2));
    const int N = 8;
    SpectralField u(N);
    draw_free_field(u, rng);
    SpectralField sum(N);
    sum.zero();
    for (int j = -1; j <= max_block(N); ++j) {
        SpectralField b = lp_block(u, j);
        for (std::int64_t i = 0; i < b.hc.size; ++i) sum.a[i] += b.a[i];
    }
    for (std::int64_t i = 0; i < u.hc.size; ++i)
        CHECK(std::abs(sum.a[i] - u.a[i]) < 1e-13 * (1.0 + std::abs(u.a[i])));

    // |n| = 8 sits in the plateau of exactly one block (j = 2)
    SpectralField d(8);
    d.zero();
    d.set({8, 0, 0}, {1.0, 0.0});
    for (int j = -1; j <= max_block(8); ++j) {
        double mass = l2_norm_sq(lp_block(d, j));
        if (j == 2)
            CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));  // both conjugate modes
        else
            CHECK(mass == 0.0);
    }
}

TEST_CASE("besov norms: constant field, GFF regularity trend") {
    SpectralField c(2);
    c.zero();
    c.set({0, 0, 0}, {0.7, 0.0});
    CHECK(besov_norm(c, 1.5, 2.0, INFINITY) == doctest::Approx(0.7 * std::pow(2.0, -1.5)).epsilon(1e-12));

    // free field: C^{-1/2-eps} norms stay flat in N while C^0 norms grow
    double low[3], zero[3];
    int idx = 0;
    for (int N : {8, 16, 32}) {
        double accl = 0, accz = 0;
        const int reps = 12;
        for (int r = 0; r < reps; ++r) {
            SpectralField u(N);
            Rng rng(stream_key(77, 7, 7, 100 * N + r));
            draw_free_field(u, rng);
            accl += besov_norm(u, -0.6, INFINITY, INFINITY);
            accz += besov_norm(u, 0.0, INFINITY, INFINITY);
        }
        low[idx] = accl / reps;
        zero[idx] = accz / reps;
        ++idx;
    }
    CHECK(low[2] < 2.0 * low[0]);
    CHECK(zero[2] > 1.5 * zero[0]);
}

TEST_CASE("paraproduct trichotomy reassembles the product") {
    for (int N : {3, 8}) {
        SpectralField u(N), v(N);
        Rng rng(stream_key(55, 7, 7, N));
        draw_free_field(u, rng);
        draw_free_field(v, rng);
        ParaProduct pp = paraproduct_decompose(u, v);
        SpectralField full(2 * N);
        multiply(u, v, full);
        double num = 0, den = 0;
        for (std::int64_t i = 0; i < full.hc.size; ++i) {
            std::complex<double> s = pp.lo.a[i] + pp.resonant.a[i] + pp.hi.a[i];
            num += std::norm(s - full.a[i]);
            den += std::norm(full.a[i]);
        }
        CHECK(std::sqrt(num / den) < 1e-12);
    }

    // widely separated frequencies land entirely in the low-high part
    SpectralField lo_f(48), hi_f(48);
    lo_f.zero();
    hi_f.zero();
    lo_f.set({1, 0, 0}, {1.0, 0.0});
    hi_f.set({40, 0, 0}, {1.0, 0.0});
    ParaProduct pp = paraproduct_decompose(lo_f, hi_f);
    CHECK(l2_norm_sq(pp.resonant) == 0.0);
    CHECK(l2_norm_sq(pp.hi) == 0.0);
    CHECK(l2_norm_sq(pp.lo) > 0.5);
}
