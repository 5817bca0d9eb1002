#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace lab {

// Frequency index n in Z^3. Storage order everywhere: flat = (n2+off)*W^2 + (n1+off)*W + (n0+off)
// with n0 the fastest axis, matching the FFT layout (n2 is the half axis).
struct Index3 {
    int n0 = 0, n1 = 0, n2 = 0;
    friend bool operator==(const Index3&, const Index3&) = default;
};

inline long norm2(Index3 n) {
    return (long)n.n0 * n.n0 + (long)n.n1 * n.n1 + (long)n.n2 * n.n2;
}

// <n>^2 = 1 + |n|^2
inline double bracket2(Index3 n) { return 1.0 + (double)norm2(n); }
inline double bracket(Index3 n) { return std::sqrt(bracket2(n)); }

inline bool in_cube(Index3 n, int N) {
    return std::abs(n.n0) <= N && std::abs(n.n1) <= N && std::abs(n.n2) <= N;
}
inline bool in_ball(Index3 n, int M) { return norm2(n) <= (long)M * M; }

// Canonical half of Z^3: n = 0, or the last nonzero coordinate (in order n2, n1, n0) positive.
// A field is determined by its canonical modes via u(-n) = conj(u(n)).
inline bool is_canonical(Index3 n) {
    if (n.n2 != 0) return n.n2 > 0;
    if (n.n1 != 0) return n.n1 > 0;
    return n.n0 >= 0;
}

// Precomputed canonical mode list for a frequency region (cube N, optionally cut to ball M).
// weight = 1 for n = 0, else 2: sum over the full region of F(|u(n)|) equals
// sum over modes of weight * F, for any F depending on |u| only.
struct Mode {
    Index3 n;
    std::int64_t flat;   // index into the owning half-cube array
    double w;            // multiplicity weight
    double br2;          // <n>^2
};

// Half-cube storage: n2 in [0,N], n1,n0 in [-N,N]; the n2=0 plane is stored in full
// (both halves, kept conjugate-consistent) so grid placement needs no branches.
struct HalfCube {
    int N = 0;
    int W = 0;               // 2N+1
    std::int64_t plane = 0;  // W*W
    std::int64_t size = 0;   // (N+1)*W*W

    explicit HalfCube(int N_) : N(N_), W(2 * N_ + 1), plane((std::int64_t)W * W), size((std::int64_t)(N_ + 1) * W * W) {}

    std::int64_t flat(Index3 n) const {
        return (std::int64_t)n.n2 * plane + (std::int64_t)(n.n1 + N) * W + (n.n0 + N);
    }
    Index3 unflat(std::int64_t i) const {
        int n2 = (int)(i / plane);
        int r = (int)(i % plane);
        return {r % W - N, r / W - N, n2};
    }
    bool stored(Index3 n) const { return n.n2 >= 0 && in_cube(n, N); }
};

// Canonical modes of the cube (ball_M < 0) or of cube ∩ ball(ball_M).
inline std::vector<Mode> canonical_modes(int N, int ball_M = -1) {
    HalfCube hc(N);
    std::vector<Mode> out;
    for (int n2 = 0; n2 <= N; ++n2)
        for (int n1 = -N; n1 <= N; ++n1)
            for (int n0 = -N; n0 <= N; ++n0) {
                Index3 n{n0, n1, n2};
                if (!is_canonical(n)) continue;
                if (ball_M >= 0 && !in_ball(n, ball_M)) continue;
                double w = (norm2(n) == 0) ? 1.0 : 2.0;
                out.push_back({n, hc.flat(n), w, bracket2(n)});
            }
    return out;
}

// smallest P >= lo with only factors 2,3,5,7 (transform-friendly size)
inline int good_fft_size(int lo) {
    for (int P = lo;; ++P) {
        int r = P;
        for (int f : {2, 3, 5, 7})
            while (r % f == 0) r /= f;
        if (r == 1) return P;
    }
}

} // namespace lab
