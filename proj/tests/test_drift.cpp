#include "doctest.h"

#include "lab/drift.hpp"
#include "lab/norms.hpp"
#include "lab/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace lab;

namespace {

SpectralField random_target(int N, std::uint64_t seed, double scale) {
    Rng r(stream_key(seed, tag::gff, tag::auxiliary, 0));
    SpectralField f(N);
    draw_free_field(f, r);
    f.scale_modes([scale](const Index3&) { return scale; });
    return f;
}

double endpoint_l2_diff(const DriftPath& a, const DriftPath& b) {
    SpectralField d = a.s[a.L];
    for (std::int64_t i = 0; i < d.hc.size; ++i) d.a[i] -= b.s[b.L].a[i];
    double out = l2_norm_sq(d);
    d = a.w[a.L];
    for (std::int64_t i = 0; i < d.hc.size; ++i) d.a[i] -= b.w[b.L].a[i];
    return out + l2_norm_sq(d);
}

} // namespace

TEST_CASE("shift solver: zero drift and zero noise stay at the fixed point") {
    const int N = 4, L = 16;
    PathBundle b(N, L, 3, 0, true);
    DriftPath th = solve_shift_drift(b, zero_drift(N, L), 1.0, N);
    for (int k = 0; k <= L; ++k) {
        CHECK(l2_norm_sq(th.s[k]) == 0.0);
        CHECK(l2_norm_sq(th.w[k]) == 0.0);
    }
    CHECK(th.kinetic == 0.0);
    CHECK(th.cm_gap() == 0.0);

    CHECK_THROWS_AS(solve_shift_drift(b, zero_drift(N, L + 1), 1.0, N), std::invalid_argument);
    CHECK_THROWS_AS(solve_shift_drift(b, zero_drift(N + 1, L), 1.0, N), std::invalid_argument);
    CHECK_THROWS_AS(solve_shift_drift(b, zero_drift(N, L), 1.0, N + 1), std::invalid_argument);
}

TEST_CASE("shift solver: pure zero-mode input reduces to the scalar quintic ODE") {
    const int N = 3, L = 256;
    const double c = 0.8;
    SpectralField ts(N), tw(N);
    ts.zero();
    tw.zero();
    ts.set({0, 0, 0}, c);
    PathBundle b(N, L, 1, 0, true);
    DriftPath th = solve_shift_drift(b, constant_drift(ts, tw, L), 0.0, N);

    // theta' = -theta^5 + c, theta(0) = 0, via RK4 on a fine grid
    double y = 0;
    const int steps = 20000;
    const double h = 1.0 / steps;
    auto f = [c](double v) { return c - v * v * v * v * v; };
    for (int k = 0; k < steps; ++k) {
        const double k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2),
                     k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK(th.s[L].at({0, 0, 0}).real() == doctest::Approx(y).epsilon(2e-3));
    CHECK(l2_norm_sq(th.w[L]) == 0.0);
    // no other mode is excited from pure zero-mode data (up to FFT roundoff)
    const std::int64_t zf = th.s[L].hc.flat({0, 0, 0});
    double offmode = 0;
    for (std::int64_t i = 0; i < th.s[L].hc.size; ++i)
        if (i != zf) offmode = std::max(offmode, std::abs(th.s[L].a[i]));
    CHECK(offmode <= 1e-13);
}

TEST_CASE("shift solver: first-order refinement against a 10x finer grid") {
    const int N = 4;
    SpectralField ts = random_target(N, 21, 0.4), tw = random_target(N, 22, 0.4);
    auto solve_at = [&](int L) {
        PathBundle b(N, L, 1, 0, true);
        return solve_shift_drift(b, constant_drift(ts, tw, L), 0.0, N);
    };
    const double e32 = endpoint_l2_diff(solve_at(32), solve_at(320));
    const double e64 = endpoint_l2_diff(solve_at(64), solve_at(640));
    CHECK(e64 < e32);
    // endpoint differences are squared norms: first order in 1/L means ratio ~ 4
    const double ratio = e32 / e64;
    CHECK(ratio > 2.2);
    CHECK(ratio < 7.5);
}

TEST_CASE("shift solver: trapezoidal residual halves under refinement") {
    const int N = 4;
    SpectralField ts = random_target(N, 31, 0.5), tw = random_target(N, 32, 0.5);
    auto residual_at = [&](int L) {
        PathBundle b(N, L, 1, 0, true);
        DriftPath ups = constant_drift(ts, tw, L);
        DriftPath th = solve_shift_drift(b, ups, 0.0, N);
        return shift_residual(b, ups, th, 0.0);
    };
    const double r16 = residual_at(16), r32 = residual_at(32);
    CHECK(r32 < r16);
    CHECK(r16 / r32 > 1.6);
    CHECK(r16 / r32 < 2.6);
}

TEST_CASE("shift solver: coupling and noise move the solution, CM bound holds") {
    // noisy quintic right-hand sides need the default fine grid: explicit Euler
    // on coarse grids trips the energy guard by design
    const int N = 4, L = 256;
    SpectralField ts = random_target(N, 41, 0.3), tw = random_target(N, 42, 0.3);
    PathBundle b(N, L, 99, 0);
    DriftPath ups = constant_drift(ts, tw, L);
    CHECK(ups.cm_gap() >= -1e-12 * ups.kinetic);
    CHECK(ups.cm_gap() <= 1e-12 * ups.kinetic);  // ramp attains the equality case

    DriftPath th0 = solve_shift_drift(b, ups, 0.0, N);
    DriftPath th1 = solve_shift_drift(b, ups, 1.0, N);
    CHECK(th0.kinetic > 0);
    CHECK(th1.kinetic > 0);
    CHECK(th0.cm_gap() >= -1e-9 * th0.kinetic);
    CHECK(th1.cm_gap() >= -1e-9 * th1.kinetic);
    CHECK(endpoint_l2_diff(th0, th1) > 0);
    CHECK(th1.max_h1 > 0);
    CHECK(th1.max_h1 < 1e8);
}

TEST_CASE("shift solver: energy guard aborts unstable runs") {
    const int N = 4, L = 8;
    SpectralField ts(N), tw(N);
    ts.zero();
    tw.zero();
    ts.set({0, 0, 0}, 1.0);
    PathBundle b(N, L, 7, 0, true);
    CHECK_THROWS_AS(solve_shift_drift(b, constant_drift(ts, tw, L), 0.0, N, 1e-6),
                    std::runtime_error);
}
