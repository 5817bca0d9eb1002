#include "doctest.h"
#include "lab/lattice.hpp"
#include "lab/rng.hpp"
#include "lab/spectrum.hpp"
#include "lab/accum.hpp"
#include <cmath>
#include <set>

using namespace lab;

TEST_CASE("canonical half covers each conjugate pair once") {
    const int N = 3;
    long canon = 0, total = 0;
    for (int n2 = -N; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0) {
                Index3 n{n0, n1, n2};
                ++total;
                bool cn = is_canonical(n);
                bool cm = is_canonical({-n0, -n1, -n2});
                if (norm2(n) == 0)
                    CHECK(cn);
                else
                    CHECK(cn != cm);  // exactly one of n, -n
                if (cn) ++canon;
            }
    CHECK(total == 343);
    CHECK(canon == (343 - 1) / 2 + 1);
}

TEST_CASE("mode list weights tile the cube and the ball") {
    for (int N : {2, 4}) {
        auto modes = canonical_modes(N);
        double wsum = 0;
        for (auto& m : modes) wsum += m.w;
        CHECK(wsum == doctest::Approx((2 * N + 1) * (2 * N + 1) * (2 * N + 1)).epsilon(1e-15));
    }
    // ball count vs direct enumeration
    int N = 4, M = 3;
    auto modes = canonical_modes(N, M);
    double wsum = 0;
    for (auto& m : modes) wsum += m.w;
    long direct = 0;
    for (int n2 = -N; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0)
                if (in_ball({n0, n1, n2}, M)) ++direct;
    CHECK(wsum == doctest::Approx((double)direct).epsilon(1e-15));
}

TEST_CASE("half-cube flat index roundtrip") {
    HalfCube hc(5);
    for (std::int64_t i = 0; i < hc.size; i += 7) {
        auto n = hc.unflat(i);
        CHECK(hc.flat(n) == i);
        CHECK(n.n2 >= 0);
    }
    CHECK(bracket2({0, 0, 0}) == 1.0);
    CHECK(bracket2({1, 0, 0}) == 2.0);
    CHECK(bracket2({-2, 1, 3}) == 15.0);
}

TEST_CASE("transform-friendly sizes") {
    CHECK(good_fft_size(11) == 12);
    CHECK(good_fft_size(50) == 50);
    CHECK(good_fft_size(97) == 98);
    CHECK(good_fft_size(193) == 196);
    CHECK(good_fft_size(257) == 270);
}

TEST_CASE("splitmix64 reference vector") {
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xE220A8397B1DCDAFull);
    CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("rng determinism and stream separation") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
    bool differ = false;
    for (int i = 0; i < 16; ++i) differ |= (a.next() != c.next());
    CHECK(differ);

    CHECK(stream_key(1, tag::wave, tag::gff, 0) != stream_key(1, tag::wave, tag::gff, 1));
    CHECK(stream_key(1, tag::wave, tag::gff, 0) != stream_key(1, tag::schrodinger, tag::gff, 0));
}

TEST_CASE("normal moments") {
    Rng r(7);
    const int n = 200000;
    std::vector<double> x(n);
    r.fill_normal(x.data(), n);
    double m1 = 0, m2 = 0, m4 = 0;
    for (double v : x) {
        m1 += v;
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m1 /= n; m2 /= n; m4 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt((double)n));          // 5 sigma
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
    for (double v : x) CHECK(std::isfinite(v));
}

TEST_CASE("float normal path: moments, tail mass, determinism") {
    Rng r(19);
    const int n = 1000000;
    std::vector<float> x(n);
    r.fill_normal(x.data(), n);
    double m1 = 0, m2 = 0, m4 = 0;
    int beyond3 = 0;
    for (float v : x) {
        m1 += v;
        m2 += double(v) * v;
        m4 += double(v) * v * v * v;
        if (std::abs(v) > 3.0f) ++beyond3;
        CHECK(std::isfinite(v));
    }
    m1 /= n; m2 /= n; m4 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt((double)n));
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
    // P(|Z| > 3) = 2.6998e-3; binomial 5 sigma
    double p3 = double(beyond3) / n;
    CHECK(std::abs(p3 - 2.6998e-3) < 5.0 * std::sqrt(2.6998e-3 / n));

    Rng r2(19);
    std::vector<float> y(256);
    r2.fill_normal(y.data(), y.size());
    for (int i = 0; i < 256; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("free field: symmetry exact, per-mode variance matches weight") {
    const int N = 2;
    const int reps = 20000;
    SpectralField u(N);
    Rng r(11);
    std::vector<double> v00(reps), v110(reps), v012(reps);
    for (int k = 0; k < reps; ++k) {
        draw_free_field(u, r);
        if (k == 0) CHECK(u.max_asymmetry() == 0.0);
        v00[k] = std::norm(u.at({0, 0, 0}));
        v110[k] = std::norm(u.at({1, 1, 0}));
        v012[k] = std::norm(u.at({0, 1, 2}));
    }
    auto m0 = mean_stderr(v00), m1 = mean_stderr(v110), m2 = mean_stderr(v012);
    CHECK(std::abs(m0.mean - 1.0) < 5 * m0.stderr_);
    CHECK(std::abs(m1.mean - 1.0 / 3.0) < 5 * m1.stderr_);
    CHECK(std::abs(m2.mean - 1.0 / 6.0) < 5 * m2.stderr_);
    // conjugate access
    draw_free_field(u, r);
    auto z = u.at({1, -2, 1});
    auto zc = u.at({-1, 2, -1});
    CHECK(z.real() == zc.real());
    CHECK(z.imag() == -zc.imag());
}

TEST_CASE("reduce matches brute-force full-cube sum") {
    const int N = 3;
    SpectralField u(N);
    Rng r(5);
    draw_free_field(u, r);
    double brute = 0;
    for (int n2 = -N; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0)
                brute += bracket2({n0, n1, n2}) * std::norm(u.at({n0, n1, n2}));
    double red = u.reduce([](Index3 n, std::complex<double> a) { return bracket2(n) * std::norm(a); });
    CHECK(red == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("pairwise mean/stderr on a known sequence") {
    std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto m = mean_stderr(x);
    CHECK(m.mean == doctest::Approx(5.5).epsilon(1e-15));
    CHECK(m.stderr_ == doctest::Approx(std::sqrt(55.0 / 6.0 / 10.0)).epsilon(1e-12));
}
