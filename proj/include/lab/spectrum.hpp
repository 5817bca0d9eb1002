#pragma once
#include "lab/lattice.hpp"
#include "lab/rng.hpp"
#include <complex>
#include <vector>

namespace lab {

// Fourier coefficients of a real field on T^3, frequency cube |n_j| <= N.
// Stored on the half cube n2 >= 0; the n2 = 0 plane is kept in full with
// a(-n) = conj(a(n)) maintained on every write, so FFT placement is branch-free
// and full-cube reductions use weight 2 for n2 > 0 and weight 1 on the plane.
template <class T>
struct SpectralFieldT {
    using C = std::complex<T>;
    int N = 0;
    HalfCube hc;
    std::vector<C> a;

    explicit SpectralFieldT(int N_ = 0) : N(N_), hc(N_), a(hc.size) {}

    void zero() { std::fill(a.begin(), a.end(), C{}); }

    C at(Index3 n) const {
        if (n.n2 >= 0) return a[hc.flat(n)];
        return std::conj(a[hc.flat({-n.n0, -n.n1, -n.n2})]);
    }

    // write a canonical mode (n2 > 0, or n2 = 0 with its plane mirror kept consistent)
    void set(Index3 n, C v) {
        a[hc.flat(n)] = v;
        if (n.n2 == 0 && (n.n0 != 0 || n.n1 != 0))
            a[hc.flat({-n.n0, -n.n1, 0})] = std::conj(v);
    }

    // re-impose the plane symmetry after an external fill (canonical entry wins)
    void resymmetrize_plane() {
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0) {
                Index3 n{n0, n1, 0};
                if (!is_canonical(n) || (n0 == 0 && n1 == 0)) continue;
                a[hc.flat({-n0, -n1, 0})] = std::conj(a[hc.flat(n)]);
            }
        // zero mode of a real field is real
        auto& z = a[hc.flat({0, 0, 0})];
        z = C(z.real(), 0);
    }

    // multiply every mode by an even scalar function of n
    template <class F>
    void scale_modes(F&& f) {
        for (std::int64_t i = 0; i < hc.size; ++i) a[i] *= (T)f(hc.unflat(i));
    }

    // sum over the FULL cube of f(n, a(n)) for f with f(-n, conj) = f(n, .)
    template <class F>
    double reduce(F&& f) const {
        double plane = 0, rest = 0;
        for (std::int64_t i = 0; i < hc.plane; ++i) plane += f(hc.unflat(i), a[i]);
        for (std::int64_t i = hc.plane; i < hc.size; ++i) rest += f(hc.unflat(i), a[i]);
        return plane + 2.0 * rest;
    }

    double max_asymmetry() const {  // plane-consistency diagnostic
        double m = 0;
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0) {
                auto d = a[hc.flat({n0, n1, 0})] - std::conj(a[hc.flat({-n0, -n1, 0})]);
                m = std::max(m, (double)std::abs(d));
            }
        return m;
    }
};

using SpectralField = SpectralFieldT<double>;
using SpectralFieldF = SpectralFieldT<float>;

// free field draw: a(n) = g_n / <n>, E|g_n|^2 = 1, g_0 real standard normal
template <class T>
void draw_free_field(SpectralFieldT<T>& u, Rng& rng) {
    const int N = u.N;
    const T half = (T)std::sqrt(0.5);
    for (int n2 = 0; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0) {
                Index3 n{n0, n1, n2};
                if (!is_canonical(n)) continue;
                T s = (T)(1.0 / bracket(n));
                if (n0 == 0 && n1 == 0 && n2 == 0)
                    u.set(n, {(T)rng.normal() * s, 0});
                else
                    u.set(n, {(T)rng.normal() * half * s, (T)rng.normal() * half * s});
            }
}

} // namespace lab
