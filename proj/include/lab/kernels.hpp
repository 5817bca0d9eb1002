#pragma once
#include <cmath>

namespace lab {

// Relaxation kernel K(s) = e^{-a(1-s)} on [0,1] with rate a = M/<n> (always >= ~0.7,
// so the expressions below are well conditioned; no small-a expansions needed).
//
// J1  = int K                          = (1 - e^-a)/a
// J2  = int K^2                        = (1 - e^-2a)/(2a)
// I1K = int int K(s') min(s,s')^2      = 1/(3a) - 2/a^3 + 4/a^4 - e^-a (2/a^3 + 4/a^4)
// IKK = int int K(s)K(s') min(s,s')^2  = 1/a^2 - 3/a^3 + 7/(2a^4) - 4 e^-a /a^4 + e^-2a /(2a^4)
// int int min(s,s')^2 ds ds' = 1/6 (the a -> 0 limit of both I1K and IKK)

inline double relax_J1(double a) { return (1.0 - std::exp(-a)) / a; }
inline double relax_J2(double a) { return (1.0 - std::exp(-2.0 * a)) / (2.0 * a); }

inline double relax_I1K(double a) {
    double e = std::exp(-a);
    double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    return 1.0 / (3.0 * a) - 2.0 / a3 + 4.0 / a4 - e * (2.0 / a3 + 4.0 / a4);
}

inline double relax_IKK(double a) {
    double e = std::exp(-a), e2 = e * e;
    double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    return 1.0 / a2 - 3.0 / a3 + 3.5 / a4 - 4.0 * e / a4 + 0.5 * e2 / a4;
}

// drift-energy density of the relaxation update at rate a, time horizon 1:
// int_0^1 a^2 E|driven - state|^2 dt for a unit-rate driver = a/2 - (1 - e^-2a)/4
inline double relax_energy(double a) { return 0.5 * a - 0.25 * (1.0 - std::exp(-2.0 * a)); }

// IE  = a^2 int_0^1 int_0^t int_0^t e^{-a(2t-s-s')} min(s,s')^2 ds ds' dt
//     = 1/3 - 3/(2a) + 7/(2a^2) - 15/(4a^3) + 4 e^-a /a^3 - e^-2a /(4a^3)
// (a -> infinity limit is 1/3: the relaxed state tracks the smooth part of the
// driver, and int_0^1 t^2 dt = 1/3). Drift-energy density of the smooth-driven
// part of the relaxation update.
inline double relax_IE(double a) {
    double e = std::exp(-a), e2 = e * e;
    double a2 = a * a, a3 = a2 * a;
    return 1.0 / 3.0 - 1.5 / a + 3.5 / a2 - 3.75 / a3 + 4.0 * e / a3 - 0.25 * e2 / a3;
}

} // namespace lab
