#include "lab/mollifier.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace lab {

namespace {

double bump(double s) {
    double a = 1.0 - s * s;
    return a > 0 ? std::exp(-1.0 / a) : 0.0;
}

// For radial F, G on R^3 with profiles f, g:
//   (F * G)(r) = (2 pi / r) int_0^inf s f(s) [ G1(s + r) - G1(|s - r|) ] ds,
//   G1(t) = int_0^t u g(u) du,
// and (F * G)(0) = 4 pi int f g s^2 ds.  Both factors here are the unit bump.
struct ShapeTable {
    static constexpr int kPsiGrid = 8192;  // cumulative table for G1 on [0,1]
    static constexpr int kRGrid = 2048;    // profile table on [0,2]
    std::vector<double> cum;               // G1 at i/kPsiGrid
    std::vector<double> val;               // unnormalized profile at 2i/kRGrid

    ShapeTable() : cum(kPsiGrid + 1), val(kRGrid + 1) {
        double h = 1.0 / kPsiGrid;
        cum[0] = 0.0;
        for (int i = 1; i <= kPsiGrid; ++i) {
            // per-cell Simpson of u*bump(u)
            double a = (i - 1) * h, b = i * h, m = 0.5 * (a + b);
            cum[i] = cum[i - 1] + h / 6.0 * (a * bump(a) + 4.0 * m * bump(m) + b * bump(b));
        }
        const int ms = 2048;  // Simpson nodes in s for each r
        double hs = 1.0 / ms;
        for (int ir = 0; ir <= kRGrid; ++ir) {
            double r = 2.0 * ir / kRGrid;
            double acc = 0;
            if (ir == 0) {
                for (int i = 0; i <= ms; ++i) {
                    double s = i * hs, w = (i == 0 || i == ms) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                    double b = bump(s);
                    acc += w * b * b * s * s;
                }
                val[0] = 4.0 * M_PI * acc * hs / 3.0;
            } else {
                for (int i = 0; i <= ms; ++i) {
                    double s = i * hs, w = (i == 0 || i == ms) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                    acc += w * s * bump(s) * (cum_at(s + r) - cum_at(std::fabs(s - r)));
                }
                val[ir] = 2.0 * M_PI / r * acc * hs / 3.0;
            }
        }
    }

    double cum_at(double t) const {
        if (t >= 1.0) return cum[kPsiGrid];
        double x = t * kPsiGrid;
        int i = int(x);
        double f = x - i;
        return cum[i] * (1.0 - f) + cum[i + 1] * f;
    }

    double at(double r) const {
        if (r >= 2.0) return 0.0;
        double x = r * (kRGrid / 2.0);
        int i = int(x);
        double f = x - i;
        return (val[i] * (1.0 - f) + val[i + 1] * f) / val[0];
    }
};

const ShapeTable& table() {
    static const ShapeTable t;
    return t;
}

} // namespace

double mollifier_shape(double r) { return table().at(std::fabs(r)); }

double mollifier_multiplier(const Index3& n, double eps) {
    return mollifier_shape(eps * std::sqrt(double(norm2(n))));
}

void apply_mollifier(SpectralField& u, double eps) {
    u.scale_modes([eps](const Index3& n) { return mollifier_multiplier(n, eps); });
}

} // namespace lab
