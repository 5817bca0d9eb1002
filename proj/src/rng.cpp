#include "lab/rng.hpp"
#include <cmath>

namespace lab {

double Rng::normal() {
    if (have_) { have_ = false; return cache_; }
    // Marsaglia polar: no trig, ~1.27 uniform pairs per normal pair
    double x, y, r2;
    do {
        x = 2.0 * u01() - 1.0;
        y = 2.0 * u01() - 1.0;
        r2 = x * x + y * y;
    } while (r2 >= 1.0 || r2 == 0.0);
    double f = std::sqrt(-2.0 * std::log(r2) / r2);
    cache_ = y * f;
    have_ = true;
    return x * f;
}

void Rng::fill_normal(double* dst, std::size_t cnt) {
    std::size_t i = 0;
    while (i + 1 < cnt) {
        double x, y, r2;
        do {
            x = 2.0 * u01() - 1.0;
            y = 2.0 * u01() - 1.0;
            r2 = x * x + y * y;
        } while (r2 >= 1.0 || r2 == 0.0);
        double f = std::sqrt(-2.0 * std::log(r2) / r2);
        dst[i++] = x * f;
        dst[i++] = y * f;
    }
    if (i < cnt) dst[i] = normal();
}

namespace {

// 128-layer ziggurat (Marsaglia-Tsang) for the bulk float path: ~3x the polar
// throughput, which matters when a single ensemble draws ~1e10 normals
struct Zig {
    std::uint32_t kn[128];
    float wn[128], fn[128];
    Zig() {
        const double m = 2147483648.0, R = 3.442619855899, V = 9.91256303526217e-3;
        double dn = R, tn = R, q = V / std::exp(-0.5 * R * R);
        kn[0] = (std::uint32_t)((dn / q) * m);
        kn[1] = 0;
        wn[0] = (float)(q / m);
        wn[127] = (float)(dn / m);
        fn[0] = 1.0f;
        fn[127] = (float)std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(V / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = (std::uint32_t)((dn / tn) * m);
            tn = dn;
            fn[i] = (float)std::exp(-0.5 * dn * dn);
            wn[i] = (float)(dn / m);
        }
    }
    float draw(Rng& r) const {
        const double R = 3.442619855899;
        for (;;) {
            auto hz = (std::int32_t)(std::uint32_t)r.next();
            std::uint32_t iz = (std::uint32_t)hz & 127u;
            std::uint32_t az = hz >= 0 ? (std::uint32_t)hz : (std::uint32_t)(-(std::int64_t)hz);
            if (az < kn[iz]) return (float)hz * wn[iz];
            if (iz == 0) {
                double x, y;
                do {
                    x = -std::log(r.u01()) / R;
                    y = -std::log(r.u01());
                } while (y + y < x * x);
                return (float)(hz > 0 ? R + x : -R - x);
            }
            float x = (float)hz * wn[iz];
            if (fn[iz] + (float)r.u01() * (fn[iz - 1] - fn[iz]) < std::exp(-0.5f * x * x)) return x;
        }
    }
};

} // namespace

void Rng::fill_normal(float* dst, std::size_t cnt) {
    static const Zig zig;
    for (std::size_t i = 0; i < cnt; ++i) dst[i] = zig.draw(*this);
}

} // namespace lab
