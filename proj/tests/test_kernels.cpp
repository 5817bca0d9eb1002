#include "doctest.h"
#include "lab/kernels.hpp"
#include <cmath>
#include <initializer_list>

using namespace lab;

namespace {

// independent quadrature oracle for the double integrals (Simpson x Simpson)
template <class F>
double simpson2(F&& f, int m) {
    auto w1 = [m](int i) { return (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double h = 1.0 / m, s = 0;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) s += w1(i) * w1(j) * f(i * h, j * h);
    return s * h * h / 9.0;
}

} // namespace

TEST_CASE("kernel integrals match 30-digit references") {
    // references computed offline with adaptive quadrature at 30 digits
    const double as[] = {0.7, 1, 2, 5, 10, 32};
    const double i1k[] = {0.13649601357651792556, 0.12605668630467940376, 0.09899902504836032072,
                          0.056915736653887152204, 0.03173322437350190337, 0.010359446207682290845};
    const double ikk[] = {0.1122751637033118686, 0.096149876932537059565, 0.060488542906119770161,
                          0.021556913459149662998, 0.0073499818401311526872, 0.00088834762573242182669};
    const double ie[] = {0.0117355904185707665235, 0.0210172772099494467419, 0.0566786112363667361462,
                         0.143548856837444543311, 0.214583514932537094867, 0.289761861165364584879};
    for (int i = 0; i < 6; ++i) {
        CHECK(relax_I1K(as[i]) == doctest::Approx(i1k[i]).epsilon(1e-14));
        CHECK(relax_IKK(as[i]) == doctest::Approx(ikk[i]).epsilon(1e-14));
        CHECK(relax_IE(as[i]) == doctest::Approx(ie[i]).epsilon(1e-13));
    }
}

TEST_CASE("relax_IE matches triple-quadrature and its tracking limit") {
    // IE = a^2 int_0^1 [int_0^t int_0^t e^{-a(2t-s-s')} min(s,s')^2] dt, Simpson in t
    // over the closed-form inner double integral's own Simpson estimate
    for (double a : {0.9, 2.5, 8.0}) {
        int mt = 200;
        double acc = 0;
        for (int i = 0; i <= mt; ++i) {
            double t = double(i) / mt;
            double wt = (i == 0 || i == mt) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            double inner = simpson2(
                [&](double x, double y) {
                    double s = t * x, sp = t * y, m = s < sp ? s : sp;
                    return std::exp(-a * (2.0 * t - s - sp)) * m * m * t * t;
                },
                128);
            acc += wt * inner;
        }
        acc /= 3.0 * mt;
        CHECK(relax_IE(a) == doctest::Approx(a * a * acc).epsilon(5e-4));
    }
    CHECK(relax_IE(1e4) == doctest::Approx(1.0 / 3.0).epsilon(1e-3));  // tracking limit
    CHECK(relax_IE(32.0) < 1.0 / 3.0);
}

TEST_CASE("kernel integrals match direct quadrature") {
    for (double a : {0.8, 1.5, 3.0, 12.0}) {
        auto K = [a](double s) { return std::exp(-a * (1.0 - s)); };
        auto mn2 = [](double s, double t) { double m = s < t ? s : t; return m * m; };
        double q_i1k = simpson2([&](double s, double t) { return K(t) * mn2(s, t); }, 512);
        double q_ikk = simpson2([&](double s, double t) { return K(s) * K(t) * mn2(s, t); }, 512);
        // min(s,s')^2 has a kink on the diagonal: Simpson converges ~h^3 here
        CHECK(relax_I1K(a) == doctest::Approx(q_i1k).epsilon(3e-5));
        CHECK(relax_IKK(a) == doctest::Approx(q_ikk).epsilon(3e-5));
        CHECK(relax_J1(a) == doctest::Approx(simpson2([&](double s, double) { return K(s); }, 512)).epsilon(1e-7));
        CHECK(relax_J2(a) == doctest::Approx(simpson2([&](double s, double) { return K(s) * K(s); }, 512)).epsilon(1e-7));
    }
}

TEST_CASE("kernel integral ordering and limits") {
    for (double a : {0.7, 1.0, 4.0, 20.0}) {
        CHECK(relax_IKK(a) > 0);
        CHECK(relax_IKK(a) < relax_I1K(a));
        CHECK(relax_I1K(a) < 1.0 / 6.0);  // K < 1 on [0,1)
        CHECK(relax_J2(a) < relax_J1(a));
    }
    // relax_energy = int_0^1 [a/2](1 - e^{-2at}) dt, checked by midpoint rule
    for (double a : {1.0, 6.0}) {
        double q = 0;
        int m = 20000;
        for (int i = 0; i < m; ++i) {
            double t = (i + 0.5) / m;
            q += 0.5 * a * (1.0 - std::exp(-2.0 * a * t));
        }
        q /= m;
        CHECK(relax_energy(a) == doctest::Approx(q).epsilon(1e-8));
    }
}
