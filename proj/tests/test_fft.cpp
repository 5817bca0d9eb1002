#include "doctest.h"
#include "lab/fft.hpp"
#include "lab/rng.hpp"
#include <cmath>
#include <complex>

using namespace lab;

TEST_CASE("synth/analyze roundtrip is exact to roundoff") {
    const int N = 5;
    SpectralField u(N), back(N);
    Rng r(100);
    draw_free_field(u, r);
    std::vector<double> grid;
    synth(u, 16, grid);
    analyze(grid, 16, back);
    double worst = 0;
    for (std::int64_t i = 0; i < u.hc.size; ++i) worst = std::max(worst, std::abs(u.a[i] - back.a[i]));
    CHECK(worst < 1e-13);
}

TEST_CASE("grid values match direct Fourier sum") {
    const int N = 3, P = 9;
    SpectralField u(N);
    Rng r(101);
    draw_free_field(u, r);
    std::vector<double> grid;
    synth(u, P, grid);
    for (int j : {0, 1, 5}) {
        int i0 = j, i1 = (2 * j) % P, i2 = (j + 3) % P;
        std::complex<double> s = 0;
        for (int n2 = -N; n2 <= N; ++n2)
            for (int n1 = -N; n1 <= N; ++n1)
                for (int n0 = -N; n0 <= N; ++n0) {
                    double ph = 2.0 * M_PI / P * (n0 * i0 + n1 * i1 + n2 * i2);
                    s += u.at({n0, n1, n2}) * std::polar(1.0, ph);
                }
        CHECK(std::abs(s.imag()) < 1e-12);
        CHECK(grid[((std::size_t)i0 * P + i1) * P + i2] == doctest::Approx(s.real()).epsilon(1e-11));
    }
}

TEST_CASE("normalized quadrature = Parseval") {
    const int N = 4, P = 12;  // P >= 2N+1 makes the square alias-free in the mean
    SpectralField u(N);
    Rng r(102);
    draw_free_field(u, r);
    std::vector<double> grid;
    synth(u, P, grid);
    double q = 0;
    for (double v : grid) q += v * v;
    q /= grid.size();
    double p = u.reduce([](Index3, std::complex<double> a) { return std::norm(a); });
    CHECK(q == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("band-exact product equals brute-force convolution") {
    const int Nf = 3, Ng = 2, No = 4;
    SpectralField f(Nf), g(Ng), prod(No);
    Rng r(103);
    draw_free_field(f, r);
    draw_free_field(g, r);
    multiply(f, g, prod);
    for (Index3 k : {Index3{0, 0, 0}, Index3{1, -2, 0}, Index3{4, 4, 4}, Index3{-3, 0, 2}}) {
        std::complex<double> s = 0;
        for (int n2 = -Nf; n2 <= Nf; ++n2)
            for (int n1 = -Nf; n1 <= Nf; ++n1)
                for (int n0 = -Nf; n0 <= Nf; ++n0) {
                    Index3 m{k.n0 - n0, k.n1 - n1, k.n2 - n2};
                    if (!in_cube(m, Ng)) continue;
                    s += f.at({n0, n1, n2}) * g.at(m);
                }
        CHECK(std::abs(prod.at(k) - s) < 1e-12);
    }
}

TEST_CASE("float pipeline roundtrip") {
    const int N = 4;
    SpectralFieldF u(N), back(N);
    Rng r(104);
    draw_free_field(u, r);
    std::vector<float> grid;
    synth(u, 12, grid);
    analyze(grid, 12, back);
    double worst = 0;
    for (std::int64_t i = 0; i < u.hc.size; ++i) worst = std::max(worst, (double)std::abs(u.a[i] - back.a[i]));
    CHECK(worst < 1e-5);
}

TEST_CASE("packed cubic transform matches the double product path") {
    const int N = 4;
    const int P = good_fft_size(3 * N + 1);
    SpectralFieldF uf(N), wf(N);
    SpectralField ud(N), wd(N);
    Rng r(2024);
    draw_free_field(uf, r);
    draw_free_field(wf, r);
    for (std::int64_t i = 0; i < uf.hc.size; ++i) {
        ud.a[i] = {uf.a[i].real(), uf.a[i].imag()};
        wd.a[i] = {wf.a[i].real(), wf.a[i].imag()};
    }
    std::vector<double> gu, gw;
    synth(ud, P, gu);
    synth(wd, P, gw);
    double ref = 0;
    for (std::size_t i = 0; i < gu.size(); ++i) ref += gu[i] * gu[i] * gw[i];
    ref /= (double)gu.size();

    PackedCubic pc(N, P);
    pc.load(uf, wf);
    double got = pc.mean_re2_im();
    CHECK(std::abs(got - ref) < 1e-4 * (1.0 + std::abs(ref)));
    CHECK(pc.u0() == doctest::Approx(ud.at({0, 0, 0}).real()).epsilon(1e-6));
    CHECK(pc.w0() == doctest::Approx(wd.at({0, 0, 0}).real()).epsilon(1e-6));

    // the loaded spectrum must survive execution so reloads are incremental
    double again = pc.mean_re2_im();
    CHECK(again == got);
}

TEST_CASE("packed random load draws an independent free-field pair") {
    // E[(int u^2 w)^2] = 2 sunset + tadpole^2 for independent unit-mass pairs;
    // checked at N = 2 where both lattice sums are cheap to enumerate
    const int N = 2;
    const int P = good_fft_size(3 * N + 1);
    double sun = 0, tad = 0;
    for (int a2 = -N; a2 <= N; ++a2)
        for (int a1 = -N; a1 <= N; ++a1)
            for (int a0 = -N; a0 <= N; ++a0) {
                tad += 1.0 / bracket2({a0, a1, a2});
                for (int b2 = -N; b2 <= N; ++b2)
                    for (int b1 = -N; b1 <= N; ++b1)
                        for (int b0 = -N; b0 <= N; ++b0) {
                            Index3 c{-a0 - b0, -a1 - b1, -a2 - b2};
                            if (!in_cube(c, N)) continue;
                            sun += 1.0 / (bracket2({a0, a1, a2}) * bracket2({b0, b1, b2}) * bracket2(c));
                        }
            }
    PackedCubic pc(N, P);
    Rng rng(stream_key(31, tag::wave, tag::gff, 0));
    const int reps = 20000;
    double m2 = 0, m4 = 0;
    for (int r = 0; r < reps; ++r) {
        pc.load_random(rng);
        double v = pc.mean_re2_im();
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m2 /= reps;
    m4 /= reps;
    double expect = 2.0 * sun + tad * tad;
    double se = std::sqrt((m4 - m2 * m2) / reps);
    CHECK(std::abs(m2 - expect) < 5.0 * se);
}
