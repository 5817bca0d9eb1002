#include "lab/drift.hpp"

#include "lab/fft.hpp"
#include "lab/norms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lab {

DriftPath::DriftPath(int N_, int L_) : N(N_), L(L_) {
    if (N < 1 || L < 1) throw std::invalid_argument("drift path needs N >= 1 and L >= 1");
    s.assign(L + 1, SpectralField(N));
    w.assign(L + 1, SpectralField(N));
    for (int k = 0; k <= L; ++k) {
        s[k].zero();
        w[k].zero();
    }
}

double DriftPath::endpoint_h1() const { return h_norm_sq(s[L], 1.0) + h_norm_sq(w[L], 1.0); }

DriftPath zero_drift(int N, int L) { return DriftPath(N, L); }

DriftPath constant_drift(const SpectralField& target_s, const SpectralField& target_w, int L) {
    if (target_s.N != target_w.N) throw std::invalid_argument("drift targets on mismatched bands");
    DriftPath p(target_s.N, L);
    for (int k = 0; k <= L; ++k) {
        const double t = double(k) / L;
        p.s[k] = target_s;
        p.w[k] = target_w;
        p.s[k].scale_modes([t](const Index3&) { return t; });
        p.w[k].scale_modes([t](const Index3&) { return t; });
    }
    p.kinetic = h_norm_sq(target_s, 1.0) + h_norm_sq(target_w, 1.0);
    return p;
}

namespace {

// shared right-hand side of the shift system, without the input-drift rate
class ShiftRhs {
public:
    explicit ShiftRhs(int N)
        : N_(N), Pq_(good_fft_size(6 * N + 1)), Pp_(good_fft_size(3 * N + 1)), frac_(N) {}

    void eval(const SpectralField& us, const SpectralField& uw, const SpectralField& ts,
              const SpectralField& tw, double lambda, SpectralField& out_s, SpectralField& out_w) {
        quintic(us, ts, out_s);
        quintic(uw, tw, out_w);
        if (lambda != 0.0) {
            synth(us, Pp_, gus_);
            synth(uw, Pp_, guw_);
            synth(ts, Pp_, gts_);
            synth(tw, Pp_, gtw_);
            for (std::size_t i = 0; i < gus_.size(); ++i) {
                const double a = gus_[i], b = guw_[i], x = gts_[i], y = gtw_[i];
                gus_[i] = a * y + b * x + x * y;
                guw_[i] = 2.0 * x * a + x * x;
            }
            SpectralField ms(N_), mw(N_);
            analyze(gus_, Pp_, ms);
            analyze(guw_, Pp_, mw);
            ms.scale_modes([lambda](const Index3& n) { return lambda / bracket2(n); });
            mw.scale_modes([lambda](const Index3& n) { return lambda / bracket2(n); });
            for (std::int64_t i = 0; i < ms.hc.size; ++i) {
                out_s.a[i] += ms.a[i];
                out_w.a[i] += mw.a[i];
            }
        }
    }

private:
    int N_, Pq_, Pp_;
    SpectralField frac_;
    std::vector<double> gq_, gus_, guw_, gts_, gtw_;

    // out = -(1-Lap)^-1 P_N <grad>^{-e}((<grad>^{-e}(base + theta))^5), e = 1/2 + eps
    void quintic(const SpectralField& base, const SpectralField& theta, SpectralField& out) {
        constexpr double e = 0.5 + kQuinticEps;
        for (std::int64_t i = 0; i < frac_.hc.size; ++i) frac_.a[i] = base.a[i] + theta.a[i];
        frac_.scale_modes([](const Index3& n) { return std::pow(bracket2(n), -0.5 * e); });
        synth(frac_, Pq_, gq_);
        for (double& v : gq_) {
            const double v2 = v * v;
            v = v2 * v2 * v;
        }
        analyze(gq_, Pq_, out);
        out.scale_modes(
            [](const Index3& n) { return -std::pow(bracket2(n), -0.5 * e) / bracket2(n); });
    }
};

} // namespace

DriftPath solve_shift_drift(const PathBundle& b, const DriftPath& upsilon, double lambda, int N,
                            double energy_guard) {
    if (N != b.N) throw std::invalid_argument("shift solve cutoff must match the bundle");
    if (upsilon.N != N || upsilon.L != b.L)
        throw std::invalid_argument("input drift grid does not match the bundle");
    BundleWalker wk(b);
    DriftPath th(N, b.L);
    ShiftRhs rhs(N);
    SpectralField rs(N), rw(N);
    const double dt = 1.0 / b.L;
    Kahan kin;
    for (int k = 0; k < b.L; ++k) {
        rhs.eval(wk.one_s(), wk.one_w(), th.s[k], th.w[k], lambda, rs, rw);
        for (std::int64_t i = 0; i < rs.hc.size; ++i) {
            rs.a[i] += (upsilon.s[k + 1].a[i] - upsilon.s[k].a[i]) / dt;
            rw.a[i] += (upsilon.w[k + 1].a[i] - upsilon.w[k].a[i]) / dt;
        }
        kin.add(dt * (h_norm_sq(rs, 1.0) + h_norm_sq(rw, 1.0)));
        for (std::int64_t i = 0; i < rs.hc.size; ++i) {
            th.s[k + 1].a[i] = th.s[k].a[i] + dt * rs.a[i];
            th.w[k + 1].a[i] = th.w[k].a[i] + dt * rw.a[i];
        }
        const double en = h_norm_sq(th.s[k + 1], 1.0) + h_norm_sq(th.w[k + 1], 1.0);
        th.max_h1 = std::max(th.max_h1, en);
        if (en > energy_guard)
            throw std::runtime_error("shift solve energy blow-up at step " + std::to_string(k + 1) +
                                     ": H1 energy " + std::to_string(en));
        wk.advance();
    }
    th.kinetic = kin.value();
    return th;
}

double shift_residual(const PathBundle& b, const DriftPath& upsilon, const DriftPath& theta,
                      double lambda) {
    if (theta.N != b.N || theta.L != b.L || upsilon.L != b.L)
        throw std::invalid_argument("residual inputs on mismatched grids");
    BundleWalker wk(b);
    ShiftRhs rhs(b.N);
    const int L = b.L;
    const double dt = 1.0 / L;
    std::vector<SpectralField> rate_s, rate_w;
    rate_s.assign(L + 1, SpectralField(b.N));
    rate_w.assign(L + 1, SpectralField(b.N));
    for (int k = 0; k <= L; ++k) {
        rhs.eval(wk.one_s(), wk.one_w(), theta.s[k], theta.w[k], lambda, rate_s[k], rate_w[k]);
        const int ku = std::min(k, L - 1);  // input rate extends by its left limit
        for (std::int64_t i = 0; i < rate_s[k].hc.size; ++i) {
            rate_s[k].a[i] += (upsilon.s[ku + 1].a[i] - upsilon.s[ku].a[i]) / dt;
            rate_w[k].a[i] += (upsilon.w[ku + 1].a[i] - upsilon.w[ku].a[i]) / dt;
        }
        if (k < L) wk.advance();
    }
    double worst = 0;
    SpectralField ds(b.N), dw(b.N);
    for (int k = 0; k < L; ++k) {
        for (std::int64_t i = 0; i < ds.hc.size; ++i) {
            ds.a[i] = (theta.s[k + 1].a[i] - theta.s[k].a[i]) / dt -
                      0.5 * (rate_s[k].a[i] + rate_s[k + 1].a[i]);
            dw.a[i] = (theta.w[k + 1].a[i] - theta.w[k].a[i]) / dt -
                      0.5 * (rate_w[k].a[i] + rate_w[k + 1].a[i]);
        }
        worst = std::max(worst, std::sqrt(l2_norm_sq(ds) + l2_norm_sq(dw)));
    }
    return worst;
}

} // namespace lab
