#include "lab/variational.hpp"

#include "lab/diagrams.hpp"
#include "lab/fft.hpp"
#include "lab/kernels.hpp"
#include "lab/mollifier.hpp"
#include "lab/norms.hpp"
#include "lab/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace lab {
namespace {

double sgn(double x) { return (x > 0) - (x < 0); }

// tadpole / counterterm values recur per path in the MC loops; memoize them
double sigma_cached(int N) {
    static std::map<int, double> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> g(mx);
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, tadpole(N)).first;
    return it->second;
}

double delta_cached(int N, double lambda) {
    static std::map<std::pair<int, double>, double> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> g(mx);
    auto key = std::make_pair(N, lambda);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, delta_counterterm(N, lambda)).first;
    return it->second;
}

// dst += coef * src for src band <= dst band
void axpy_into(SpectralField& dst, const SpectralField& src, double coef) {
    if (src.N > dst.N) throw std::invalid_argument("axpy source band exceeds destination");
    if (src.N == dst.N) {
        for (std::int64_t i = 0; i < dst.hc.size; ++i) dst.a[i] += coef * src.a[i];
        return;
    }
    for (std::int64_t i = 0; i < src.hc.size; ++i)
        dst.a[dst.hc.flat(src.hc.unflat(i))] += coef * src.a[i];
}

// <u, v>_{H^1} summed over v's cube (v the narrower band)
double h1_pairing(const SpectralField& u, const SpectralField& v) {
    if (v.N > u.N) throw std::invalid_argument("pairing expects the second band narrower");
    return v.reduce([&](Index3 n, std::complex<double> b) {
        return bracket2(n) * (u.at(n) * std::conj(b)).real();
    });
}

// <u, v>_{L^2} over v's cube
double l2_pairing(const SpectralField& u, const SpectralField& v) {
    if (v.N > u.N) throw std::invalid_argument("pairing expects the second band narrower");
    return v.reduce([&](Index3 n, std::complex<double> b) {
        return (u.at(n) * std::conj(b)).real();
    });
}

template <class F>
void run_threads(int threads, F&& body) {
    threads = std::max(1, threads);
    if (threads == 1) {
        body(0);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex emx;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> g(emx);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace

void PotentialSpec::validate() const {
    if (N < 1) throw std::invalid_argument("cutoff N must be >= 1");
    if (!std::isfinite(lambda)) throw std::invalid_argument("coupling must be finite");
    switch (variant) {
        case TamingVariant::cutoff:
            if (!(K > 0)) throw std::invalid_argument("cutoff level K must be > 0");
            break;
        case TamingVariant::grand_canonical:
            if (!(A > 0)) throw std::invalid_argument("penalty strength A must be > 0");
            if (!(gamma >= 3)) throw std::invalid_argument("penalty power gamma must be >= 3");
            break;
        case TamingVariant::a_norm_tamed:
            if (!(delta > 0)) throw std::invalid_argument("penalty strength delta must be > 0");
            break;
    }
}

std::string DriftFamilySpec::name() const {
    switch (family) {
        case DriftFamily::zero: return "zero";
        case DriftFamily::constant_in_time: return "constant_in_time";
        case DriftFamily::zm_blowup: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "zm_blowup[M=%d,%c]", M, sign >= 0 ? '+' : '-');
            return buf;
        }
    }
    return "?";
}

const TermStat* VariationalReport::find(const std::string& n) const {
    for (const auto& t : terms)
        if (t.name == n) return &t;
    return nullptr;
}

double wick_l2_integral(const SpectralField& u, int N) {
    if (u.N < N) throw std::invalid_argument("field band too small for the requested cube");
    double l2 = u.reduce([&](Index3 n, std::complex<double> a) {
        return in_cube(n, N) ? std::norm(a) : 0.0;
    });
    return l2 - sigma_cached(N);
}

double hamiltonian_wick(const SpectralField& u, const SpectralField& w, const PotentialSpec& spec) {
    spec.validate();
    const int N = spec.N;
    if (u.N != N || w.N != N) throw std::invalid_argument("hamiltonian expects band-N fields");
    const int P = product_grid(0, N, N, N);
    std::vector<double> gu, gw;
    synth(u, P, gu);
    synth(w, P, gw);
    Kahan acc;
    for (std::size_t i = 0; i < gu.size(); ++i) acc.add(gu[i] * gu[i] * gw[i]);
    double m = acc.value() / ((double)P * P * P);
    double w0 = w.a[w.hc.flat({0, 0, 0})].real();
    return 0.5 * spec.lambda * (m - sigma_cached(N) * w0);
}

double hamiltonian_renormalized(const SpectralField& u, const SpectralField& w,
                                const PotentialSpec& spec) {
    return hamiltonian_wick(u, w, spec) + delta_cached(spec.N, spec.lambda);
}

bool cutoff_indicator(const SpectralField& u, int N, double K) {
    return std::fabs(wick_l2_integral(u, N)) <= K;
}

double taming_value(const SpectralField& u, const SpectralField& w, const PotentialSpec& spec) {
    switch (spec.variant) {
        case TamingVariant::cutoff: return 0.0;
        case TamingVariant::grand_canonical:
            return spec.A * std::pow(std::fabs(wick_l2_integral(u, spec.N)), spec.gamma);
        case TamingVariant::a_norm_tamed: return spec.delta * vec_a_pow(u, w);
    }
    return 0.0;
}

double coercive_sample(const SpectralField& one_s, const SpectralField& ups_s, int N,
                       double kinetic_energy, double A) {
    if (one_s.N != N || ups_s.N != N)
        throw std::invalid_argument("coercive sample expects band-N fields");
    // int (2 <1>_S Y + Y^2) by Parseval; note: no Wick subtraction here
    double quad = 2.0 * l2_pairing(one_s, ups_s) + l2_norm_sq(ups_s);
    double aq = std::fabs(quad);
    return 0.5 * A * aq * aq * aq + 0.5 * kinetic_energy;
}

// ---------------------------------------------------------------------------
// variational objective
// ---------------------------------------------------------------------------

VariationalReport objective_W(const DriftFamilySpec& drift, const PotentialSpec& spec,
                              int paths, std::uint64_t seed, int steps, int threads) {
    spec.validate();
    if (paths <= 0) throw std::invalid_argument("objective needs paths > 0");
    const int N = spec.N, L = steps;
    const double lam = spec.lambda;
    const double sigma = sigma_cached(N);

    // drift-family precompute
    const bool zm = drift.family == DriftFamily::zm_blowup;
    const bool cons = drift.family == DriftFamily::constant_in_time;
    double alpha = 0, aplus = 0, s_eff = 0, f_h1 = 0;
    SpectralField f(0);
    if (zm) {
        if (drift.M < 2 || drift.M > N)
            throw std::invalid_argument("zm drift needs 2 <= M <= N");
        if (std::fabs(drift.sign) != 1.0)
            throw std::invalid_argument("zm drift sign must be +-1");
        alpha = alpha_coefficient(drift.M, N, lam);
        aplus = std::max(alpha, 0.0);
        s_eff = drift.sign * sgn(lam) * std::sqrt(aplus);
        f = f_profile(drift.M);
        f_h1 = h_norm_sq(f, 1.0);
    }
    if (cons && (drift.target_s.N != N || drift.target_w.N != N))
        throw std::invalid_argument("constant drift targets must live on band N");
    double kin_const = 0;
    if (cons) kin_const = h_norm_sq(drift.target_s, 1.0) + h_norm_sq(drift.target_w, 1.0);

    const int P = product_grid(0, N, N, N);
    const double nrm = 1.0 / ((double)P * P * P);

    enum { T_WICK, T_MSU, T_MW, T_CUB, T_TAME, T_KIN, NTERMS };
    std::vector<std::vector<double>> slot(NTERMS, std::vector<double>(paths));
    std::vector<double> tslot(paths), cslot(paths);

    run_threads(threads, [&](int tid) {
        std::vector<double> gus, guw, gts, gtw;
        for (int p = tid; p < paths; p += std::max(1, threads)) {
            PathBundle b(N, L, seed, (std::uint64_t)p);
            BundleWalker wk(b);
            for (int k = 0; k < L; ++k) wk.advance();
            const SpectralField& one_s = wk.one_s();
            const SpectralField& one_w = wk.one_w();

            SpectralField ups_s(N), ups_w(N);
            double kin = kin_const;
            if (cons) {
                ups_s = drift.target_s;
                ups_w = drift.target_w;
            } else if (zm) {
                ZmResult zr = simulate_zm(b, drift.M, lam, ZmScheme::euler);
                axpy_into(ups_s, zr.z, -1.0);
                axpy_into(ups_s, f, -s_eff);
                ups_w = ups_s;
                // both drift components are the same ramp, hence the factor 2
                kin = 2.0 * (zr.lavo + 2.0 * s_eff * h1_pairing(zr.z, f) + s_eff * s_eff * f_h1);
            }

            SpectralField th_s = ups_s, th_w = ups_w;
            if (lam != 0) {
                CounterIntegrals ci = integrate_counter_processes(b);
                axpy_into(th_s, ci.z_w, -lam);
                axpy_into(th_w, ci.z_s, -lam);
            }

            double t_wick = 0, t_msu = 0, t_mw = 0, t_cub = 0, t_tame = 0;
            if (lam != 0) {
                synth(one_s, P, gus);
                synth(one_w, P, guw);
                synth(th_s, P, gts);
                synth(th_w, P, gtw);
                Kahan k1, k2, k3, k4;
                for (std::size_t i = 0; i < gus.size(); ++i) {
                    double su = gus[i], w = guw[i], ts = gts[i], tw = gtw[i];
                    k1.add(su * su * w);
                    k2.add(su * ts * tw);
                    k3.add(w * ts * ts);
                    k4.add(ts * ts * tw);
                }
                double w0 = one_w.a[one_w.hc.flat({0, 0, 0})].real();
                t_wick = 0.5 * lam * (k1.value() * nrm - sigma * w0);
                t_msu = lam * k2.value() * nrm;
                t_mw = 0.5 * lam * k3.value() * nrm;
                t_cub = 0.5 * lam * k4.value() * nrm;
            }

            // shifted configuration for the taming device
            if (spec.variant == TamingVariant::cutoff) {
                if (lam != 0) {
                    SpectralField v_s = one_s;
                    axpy_into(v_s, th_s, 1.0);
                    double ind = cutoff_indicator(v_s, N, spec.K) ? 1.0 : 0.0;
                    t_wick *= ind;
                    t_msu *= ind;
                    t_mw *= ind;
                    t_cub *= ind;
                }
            } else {
                SpectralField v_s = one_s, v_w = one_w;
                axpy_into(v_s, th_s, 1.0);
                axpy_into(v_w, th_w, 1.0);
                t_tame = taming_value(v_s, v_w, spec);
            }
            double t_kin = 0.5 * kin;

            slot[T_WICK][p] = t_wick;
            slot[T_MSU][p] = t_msu;
            slot[T_MW][p] = t_mw;
            slot[T_CUB][p] = t_cub;
            slot[T_TAME][p] = t_tame;
            slot[T_KIN][p] = t_kin;
            tslot[p] = t_wick + t_msu + t_mw + t_cub + t_tame + t_kin;
            cslot[p] = coercive_sample(one_s, ups_s, N, kin, spec.A);
        }
    });

    VariationalReport rep;
    rep.spec = spec;
    rep.drift = drift.name();
    rep.paths = paths;
    rep.steps = L;
    rep.seed = seed;
    static const char* names[NTERMS] = {"cubic_wick", "mixed_su", "mixed_w",
                                        "cubic_drift", "taming", "kinetic"};
    double tot = 0;
    for (int t = 0; t < NTERMS; ++t) {
        MeanErr me = mean_stderr(slot[t]);
        rep.terms.push_back({names[t], me});
        tot += me.mean;
    }
    MeanErr mt = mean_stderr(tslot);
    rep.total = {tot, mt.stderr_, mt.count};
    rep.coercive = mean_stderr(cslot);
    rep.kinetic = rep.terms[T_KIN].stat.mean;
    if (zm && lam != 0 && aplus == 0)
        rep.flags.push_back("alpha <= 0 at this (M, N, lambda): profile ramp disabled");
    if (zm && lam == 0)
        rep.flags.push_back("lambda = 0: profile ramp disabled by the sign factor");
    return rep;
}

// ---------------------------------------------------------------------------
// partition function estimates
// ---------------------------------------------------------------------------

LogZEstimate estimate_logZ(const PotentialSpec& spec, int paths, const std::string& method,
                           std::uint64_t seed, const DriftFamilySpec* drift, int steps,
                           int threads) {
    spec.validate();
    if (paths <= 0) throw std::invalid_argument("logZ needs paths > 0");
    LogZEstimate out;
    out.method = method;
    out.paths = paths;

    if (method == "drift_bound") {
        DriftFamilySpec zero;
        const DriftFamilySpec& d = drift ? *drift : zero;
        VariationalReport rep = objective_W(d, spec, paths, seed, steps, threads);
        out.value = -rep.total.mean;
        out.ci = rep.total.stderr_;
        out.flags.push_back("variational lower bound at drift " + rep.drift);
        return out;
    }
    if (method != "naive") throw std::invalid_argument("unknown logZ method: " + method);

    std::vector<double> wgt(paths);
    run_threads(threads, [&](int tid) {
        SpectralField u(spec.N), w(spec.N);
        for (int p = tid; p < paths; p += std::max(1, threads)) {
            Rng ru(stream_key(seed, tag::schrodinger, tag::gff, (std::uint64_t)p));
            Rng rw(stream_key(seed, tag::wave, tag::gff, (std::uint64_t)p));
            draw_free_field(u, ru);
            draw_free_field(w, rw);
            double e = hamiltonian_renormalized(u, w, spec) + taming_value(u, w, spec);
            double wp = std::exp(-e);
            if (spec.variant == TamingVariant::cutoff && !cutoff_indicator(u, spec.N, spec.K))
                wp = 0;
            wgt[p] = wp;
        }
    });
    MeanErr m = mean_stderr(wgt);
    if (!(m.mean > 0)) {
        out.value = -std::numeric_limits<double>::infinity();
        out.unreliable = true;
        out.flags.push_back("every path rejected by the cutoff");
        return out;
    }
    out.value = std::log(m.mean);
    out.ci = m.stderr_ / m.mean;
    std::vector<double> sorted = wgt;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    std::size_t top = (std::size_t)std::max<double>(1, std::ceil(0.01 * paths));
    Kahan st, sa;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i < top) st.add(sorted[i]);
        sa.add(sorted[i]);
    }
    if (st.value() > 0.5 * sa.value()) {
        out.unreliable = true;
        out.flags.push_back("top 1% of importance weights carries most of the mass");
    }
    return out;
}

// ---------------------------------------------------------------------------
// drift search
// ---------------------------------------------------------------------------

OptimizeResult optimize_drift(const std::vector<DriftFamilySpec>& candidates,
                              const PotentialSpec& spec, int paths, int max_evals,
                              std::uint64_t seed, int steps, int threads) {
    spec.validate();
    if (max_evals <= 0) throw std::invalid_argument("drift search needs max_evals > 0");
    std::vector<DriftFamilySpec> list;
    bool has_zero = false;
    for (const auto& c : candidates) has_zero = has_zero || c.family == DriftFamily::zero;
    if (!has_zero) list.push_back(DriftFamilySpec{});  // zero baseline always scored
    for (const auto& c : candidates) list.push_back(c);

    OptimizeResult res;
    int nev = std::min<int>((int)list.size(), max_evals);
    bool have = false;
    for (int i = 0; i < nev; ++i) {
        // common random numbers: every candidate sees the same ensemble
        VariationalReport rep = objective_W(list[i], spec, paths, seed, steps, threads);
        bool better = false;
        if (!have) {
            better = true;
        } else if (rep.total.mean < res.report.total.mean) {
            better = true;
        } else if (rep.total.mean == res.report.total.mean && rep.kinetic < res.report.kinetic) {
            better = true;
        }
        if (better) {
            res.best = list[i];
            res.report = rep;
            have = true;
        }
    }
    res.evaluated = nev;
    res.budget_exhausted = nev < (int)list.size();
    return res;
}

// ---------------------------------------------------------------------------
// strong-coupling certificate: one coupling-free ensemble pass shared by all
// lambdas. Per ball mode the relaxation endpoint obeys
//   (A - Z)(1) = int_0^1 e^{-gamma (1-t)} dA(t),   A = <1>_S - lambda z_W,
// whose Brownian part is drawn exactly conditional on the coarse increments
// (kernel-averaged combination plus an independent Gaussian residual), and
// whose counter part is a kernel-weighted quadrature of the zdot_W rates.
// ---------------------------------------------------------------------------

namespace {

struct BallMode {
    Index3 n;
    std::int64_t flat;   // half-cube slot on band N
    int pos;             // position in the canonical walker order
    double w, br2, gamma, inv_br, fhat, cn;
};

struct CertSlots {
    std::vector<double> cubic, cubes, q, q2, ind, cross, total, gain, cost;
};

struct CertEngine {
    int M, N, L, paths;
    std::uint64_t seed;
    CertificateOptions opt;
    std::vector<double> lambdas;
    bool want_kinetic = true;
    int tam_paths = 0;

    std::vector<Mode> modes;
    std::vector<BallMode> ball;
    std::vector<int> ball_of;          // canonical position -> ball index or -1
    std::vector<double> wk_tab;        // ball x L kernel integrals
    std::vector<double> ck_tab;        // ball x (L+1) trapezoid rate coefficients
    std::vector<double> resvar;        // conditional residual variance (B units)
    double sigma = 0, f_h1 = 0;
    SpectralField f{0};
    std::vector<double> alphav, apos, s_eff, kin_closed;
    double gauss_target = 0, zfine_target = 0;

    std::vector<CertSlots> sl;
    MeanErr gauss{}, zfine{};
    std::vector<std::string> flags;

    CertEngine(std::vector<double> ls, int M_, int N_, int paths_, std::uint64_t seed_,
               const CertificateOptions& o)
        : M(M_), N(N_), L(o.steps), paths(paths_), seed(seed_), opt(o), lambdas(std::move(ls)) {
        if (M < 2 || M > N) throw std::invalid_argument("certificate needs 2 <= M <= N");
        if (paths <= 0) throw std::invalid_argument("certificate needs paths > 0");
        if (L < kMinSteps) throw std::invalid_argument("certificate grid needs at least 8 steps");
        if (lambdas.empty()) throw std::invalid_argument("certificate needs a coupling list");
        if (!(opt.K > 0)) throw std::invalid_argument("certificate cutoff K must be > 0");
        tam_paths = std::min(opt.taming_paths, paths);
    }

    bool any_lambda() const {
        for (double l : lambdas)
            if (l != 0) return true;
        return false;
    }

    void precompute() {
        sigma = sigma_cached(N);
        f = f_profile(M);
        f_h1 = h_norm_sq(f, 1.0);
        SpectralField c = pair_correlation(N);
        modes = canonical_modes(N);
        ball_of.assign(modes.size(), -1);
        const double dt = 1.0 / L;
        for (std::size_t t = 0; t < modes.size(); ++t) {
            const Mode& m = modes[t];
            if (!in_ball(m.n, M)) continue;
            BallMode bm;
            bm.n = m.n;
            bm.flat = m.flat;
            bm.pos = (int)t;
            bm.w = m.w;
            bm.br2 = m.br2;
            bm.inv_br = 1.0 / std::sqrt(m.br2);
            bm.gamma = M * bm.inv_br;
            bm.fhat = f.at(m.n).real();
            bm.cn = c.at(m.n).real();
            ball_of[t] = (int)ball.size();
            ball.push_back(bm);
        }
        const std::size_t nb = ball.size();
        wk_tab.resize(nb * L);
        ck_tab.resize(nb * (L + 1));
        resvar.resize(nb);
        Kahan gt, zt;
        for (std::size_t i = 0; i < nb; ++i) {
            const double g = ball[i].gamma;
            double sum2 = 0;
            for (int k = 0; k < L; ++k) {
                double t0 = k * dt, t1 = (k + 1) * dt;
                double w = (std::exp(-g * (1 - t1)) - std::exp(-g * (1 - t0))) / g;
                wk_tab[i * L + k] = w;
                sum2 += w * w / dt;
            }
            for (int k = 0; k <= L; ++k) {
                double prev = k > 0 ? wk_tab[i * L + (k - 1)] : 0.0;
                double next = k < L ? wk_tab[i * L + k] : 0.0;
                ck_tab[i * (L + 1) + k] = 0.5 * (prev + next);
            }
            resvar[i] = std::max(relax_J2(g) - sum2, 0.0);
            gt.add(ball[i].w * relax_energy(g));
            zt.add(ball[i].w * (ball[i].cn / ball[i].br2) * relax_IE(g));
        }
        gauss_target = gt.value();
        zfine_target = zt.value();

        const std::size_t nl = lambdas.size();
        alphav.resize(nl);
        apos.resize(nl);
        s_eff.resize(nl);
        kin_closed.resize(nl);
        for (std::size_t j = 0; j < nl; ++j) {
            double lam = lambdas[j];
            alphav[j] = alpha_coefficient(M, N, lam);
            apos[j] = std::max(alphav[j], 0.0);
            s_eff[j] = sgn(lam) * std::sqrt(apos[j]);
            // the ramp is sign-gated, so its energy enters through s_eff^2
            kin_closed[j] =
                2.0 * (gauss_target + lam * lam * zfine_target + s_eff[j] * s_eff[j] * f_h1);
        }
        sl.assign(nl, CertSlots{});
        for (auto& s : sl) {
            s.cubic.resize(paths);
            s.cubes.resize(paths);
            s.q.resize(paths);
            s.q2.resize(paths);
            s.ind.resize(paths);
            s.cross.resize(paths);
            s.total.resize(paths);
            s.gain.resize(tam_paths);
            s.cost.resize(tam_paths);
        }
    }

    void main_pass() {
        const double dt = 1.0 / L;
        const std::size_t nb = ball.size();
        const std::size_t nl = lambdas.size();
        const bool counters = any_lambda();
        const int PY = product_grid(0, M, M, M);
        const double nrmY = 1.0 / ((double)PY * PY * PY);

        run_threads(opt.threads, [&](int tid) {
            WickReader reader(N);
            SpectralField zs_acc(N), zw_acc(N), zs_dot(N), zw_dot(N), Y(M);
            SpectralField vs(N), vw(N), ms(N), mw(N);
            std::vector<std::complex<double>> zg(nb), g2(nb), az(nb);
            std::vector<double> gy;
            for (int p = tid; p < paths; p += std::max(1, opt.threads)) {
                PathBundle b(N, L, seed, (std::uint64_t)p);
                BundleWalker wkr(b);
                zs_acc.zero();
                zw_acc.zero();
                std::fill(zg.begin(), zg.end(), std::complex<double>{});
                std::fill(g2.begin(), g2.end(), std::complex<double>{});
                for (int k = 0; k < L; ++k) {
                    if (counters) {
                        reader.counter_rates(wkr.one_s(), wkr.one_w(), wkr.time(), zs_dot, zw_dot);
                        double tz = dt * (k == 0 ? 0.5 : 1.0);
                        for (std::int64_t i = 0; i < zs_acc.hc.size; ++i) {
                            zs_acc.a[i] += tz * zs_dot.a[i];
                            zw_acc.a[i] += tz * zw_dot.a[i];
                        }
                        for (std::size_t i = 0; i < nb; ++i)
                            g2[i] += ck_tab[i * (L + 1) + k] * zw_dot.a[ball[i].flat];
                    }
                    wkr.advance();
                    const auto& db = wkr.db_s();
                    for (std::size_t i = 0; i < nb; ++i)
                        zg[i] += (wk_tab[i * L + k] / dt) * db[ball[i].pos];
                }
                if (counters) {
                    reader.counter_rates(wkr.one_s(), wkr.one_w(), 1.0, zs_dot, zw_dot);
                    for (std::int64_t i = 0; i < zs_acc.hc.size; ++i) {
                        zs_acc.a[i] += 0.5 * dt * zs_dot.a[i];
                        zw_acc.a[i] += 0.5 * dt * zw_dot.a[i];
                    }
                    for (std::size_t i = 0; i < nb; ++i)
                        g2[i] += ck_tab[i * (L + 1) + L] * zw_dot.a[ball[i].flat];
                }
                const SpectralField& one1_s = wkr.one_s();
                const SpectralField& one1_w = wkr.one_w();

                // exact conditional residual of the Brownian kernel integral
                Rng rr(stream_key(seed, tag::schrodinger, tag::auxiliary, (std::uint64_t)p));
                for (std::size_t i = 0; i < nb; ++i) {
                    const BallMode& bm = ball[i];
                    std::complex<double> r;
                    if (bm.n.n0 == 0 && bm.n.n1 == 0 && bm.n.n2 == 0)
                        r = {rr.normal() * std::sqrt(resvar[i]), 0.0};
                    else {
                        double sd = std::sqrt(0.5 * resvar[i]);
                        r = {rr.normal() * sd, rr.normal() * sd};
                    }
                    az[i] = (zg[i] + r) * bm.inv_br;  // Brownian part of (A - Z)(1)
                }

                for (std::size_t j = 0; j < nl; ++j) {
                    const double lam = lambdas[j], s = s_eff[j];
                    Kahan qk, l2k, crk;
                    Y.zero();
                    for (std::size_t t = 0; t < modes.size(); ++t) {
                        const Mode& m = modes[t];
                        int bi = ball_of[t];
                        std::complex<double> a1 =
                            one1_s.a[m.flat] - lam * zw_acc.a[m.flat];
                        std::complex<double> vsv;
                        if (bi >= 0) {
                            std::complex<double> azv = az[bi] - lam * g2[bi];
                            vsv = azv - s * ball[bi].fhat;
                            std::complex<double> zv = a1 - azv;  // Z_M(1)
                            std::complex<double> ups = azv - a1 - s * ball[bi].fhat;
                            Y.a[Y.hc.flat(m.n)] = ups;
                            l2k.add(m.w * std::norm(ups));
                            crk.add(m.w * m.br2 * ball[bi].fhat * zv.real());
                        } else {
                            vsv = a1;
                        }
                        qk.add(m.w * std::norm(vsv));
                    }
                    double q = qk.value() - sigma;
                    double ind = std::fabs(q) <= opt.K ? 1.0 : 0.0;
                    Y.resymmetrize_plane();
                    synth(Y, PY, gy);
                    Kahan cub;
                    for (std::size_t i = 0; i < gy.size(); ++i) cub.add(gy[i] * gy[i] * gy[i]);
                    double cubic = 0.5 * lam * cub.value() * nrmY;
                    double l2Y = l2k.value();
                    double cubes = 2.0 * std::pow(l2Y, 1.5);

                    CertSlots& s_j = sl[j];
                    s_j.cubic[p] = ind * cubic;
                    s_j.cubes[p] = cubes;
                    s_j.q[p] = q;
                    s_j.q2[p] = q * q;
                    s_j.ind[p] = ind;
                    s_j.cross[p] = crk.value();
                    s_j.total[p] = ind * cubic + cubes + 0.75 * kin_closed[j];

                    if (p < tam_paths) {
                        for (std::int64_t i = 0; i < vs.hc.size; ++i) {
                            vs.a[i] = one1_s.a[i] - lam * zw_acc.a[i];
                            vw.a[i] = one1_w.a[i] - lam * zs_acc.a[i];
                        }
                        for (std::size_t i = 0; i < nb; ++i) {
                            const BallMode& bm = ball[i];
                            std::complex<double> azv = az[i] - lam * g2[i];
                            std::complex<double> zv = vs.a[bm.flat] - azv;
                            vs.a[bm.flat] = azv - s * bm.fhat;
                            vw.a[bm.flat] -= zv + s * bm.fhat;
                        }
                        vs.resymmetrize_plane();
                        vw.resymmetrize_plane();
                        double raw = vec_a_pow(vs, vw);
                        ms = vs;
                        mw = vw;
                        apply_mollifier(ms, opt.mollify_eps);
                        apply_mollifier(mw, opt.mollify_eps);
                        double mol = vec_a_pow(ms, mw);
                        s_j.gain[p] = ind * (-opt.tame_delta * std::min(mol, opt.tame_cap));
                        s_j.cost[p] = ind * (opt.tame_delta * raw);
                    }
                }
            }
        });
    }

    // exact-law OU subsample for the Brownian kinetic energy, trapezoid in time
    void gauss_pass() {
        const int S = opt.kinetic_steps, npp = opt.kinetic_paths;
        const double h = 1.0 / S;
        const std::size_t nb = ball.size();
        std::vector<double> edt(nb), nv(nb);
        for (std::size_t i = 0; i < nb; ++i) {
            const double g = ball[i].gamma;
            edt[i] = std::exp(-g * h);
            nv[i] = (1.0 - edt[i] * edt[i]) / (2.0 * g) / ball[i].br2;
        }
        std::vector<double> slots(npp);
        run_threads(opt.threads, [&](int tid) {
            for (int pp = tid; pp < npp; pp += std::max(1, opt.threads)) {
                Rng rg(stream_key(seed, tag::wave, tag::auxiliary, (std::uint64_t)pp));
                Kahan acc;
                for (std::size_t i = 0; i < nb; ++i) {
                    const BallMode& bm = ball[i];
                    const bool zero_mode = bm.n.n0 == 0 && bm.n.n1 == 0 && bm.n.n2 == 0;
                    const double sd = std::sqrt(zero_mode ? nv[i] : 0.5 * nv[i]);
                    std::complex<double> D{};
                    double e = 0;
                    for (int k = 0; k < S; ++k) {
                        double s0 = std::norm(D);
                        std::complex<double> eta =
                            zero_mode ? std::complex<double>{rg.normal() * sd, 0}
                                      : std::complex<double>{rg.normal() * sd, rg.normal() * sd};
                        D = D * edt[i] + eta;
                        e += 0.5 * (s0 + std::norm(D));
                    }
                    acc.add(bm.w * bm.br2 * bm.gamma * bm.gamma * h * e);
                }
                slots[pp] = acc.value();
            }
        });
        gauss = mean_stderr(slots);
    }

    // fine-grid bundles for the counter-driven kinetic component (lambda-free)
    void zfine_pass() {
        const int S = opt.kinetic_steps, npp = opt.kinetic_fine;
        const double h = 1.0 / S;
        const std::size_t nb = ball.size();
        std::vector<double> edt(nb), drv(nb);
        for (std::size_t i = 0; i < nb; ++i) {
            const double g = ball[i].gamma;
            edt[i] = std::exp(-g * h);
            drv[i] = (1.0 - edt[i]) / g;
        }
        std::uint64_t seed2 = stream_key(seed, tag::gff, tag::auxiliary, 0);
        std::vector<double> slots(npp);
        run_threads(opt.threads, [&](int tid) {
            WickReader reader(N);
            SpectralField zs_dot(N), zw_dot(N);
            std::vector<std::complex<double>> X(nb);
            for (int pp = tid; pp < npp; pp += std::max(1, opt.threads)) {
                PathBundle b(N, S, seed2, (std::uint64_t)pp);
                BundleWalker wkr(b);
                std::fill(X.begin(), X.end(), std::complex<double>{});
                Kahan acc;
                for (int k = 0; k < S; ++k) {
                    reader.counter_rates(wkr.one_s(), wkr.one_w(), wkr.time(), zs_dot, zw_dot);
                    for (std::size_t i = 0; i < nb; ++i) {
                        const BallMode& bm = ball[i];
                        double s0 = std::norm(X[i]);
                        X[i] = X[i] * edt[i] - zw_dot.a[bm.flat] * drv[i];
                        acc.add(bm.w * bm.br2 * bm.gamma * bm.gamma * h * 0.5 *
                                (s0 + std::norm(X[i])));
                    }
                    wkr.advance();
                }
                slots[pp] = acc.value();
            }
        });
        zfine = mean_stderr(slots);
    }

    std::vector<CertificateReport> assemble() {
        std::vector<CertificateReport> out;
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            const double lam = lambdas[j];
            CertificateReport r;
            r.lambda = lam;
            r.M = M;
            r.N = N;
            r.paths = paths;
            r.alpha = alphav[j];
            r.alpha_pos = apos[j];
            r.K = opt.K;
            r.cubic = mean_stderr(sl[j].cubic);
            r.l2_cubes = mean_stderr(sl[j].cubes);
            r.wick_mass = mean_stderr(sl[j].q);
            r.wick_mass_sq = mean_stderr(sl[j].q2);
            MeanErr mi = mean_stderr(sl[j].ind);
            r.acceptance = mi.mean;
            r.kinetic_closed = kin_closed[j];
            if (want_kinetic) {
                MeanErr cr = mean_stderr(sl[j].cross);
                double val = 2.0 * (gauss.mean + lam * lam * zfine.mean +
                                    2.0 * s_eff[j] * cr.mean + s_eff[j] * s_eff[j] * f_h1);
                double se = 2.0 * std::sqrt(gauss.stderr_ * gauss.stderr_ +
                                            lam * lam * lam * lam * zfine.stderr_ * zfine.stderr_ +
                                            4.0 * s_eff[j] * s_eff[j] * cr.stderr_ * cr.stderr_);
                r.kinetic_path = {val, se, (std::size_t)paths};
            }
            MeanErr mt = mean_stderr(sl[j].total);
            double tmean = mt.mean, tse = mt.stderr_;
            if (tam_paths > 0) {
                r.taming_gain = mean_stderr(sl[j].gain);
                r.taming_cost = mean_stderr(sl[j].cost);
                tmean += r.taming_gain.mean + r.taming_cost.mean;
                tse = std::sqrt(tse * tse + r.taming_gain.stderr_ * r.taming_gain.stderr_ +
                                r.taming_cost.stderr_ * r.taming_cost.stderr_);
                r.flags.push_back("taming subsample std-err folded in quadrature");
            }
            r.total = {tmean, tse, (std::size_t)paths};
            r.taming_paths = tam_paths;
            if (lam != 0 && apos[j] == 0)
                r.flags.push_back("alpha <= 0: profile ramp disabled");
            if (lam == 0)
                r.flags.push_back("lambda = 0: certificate degenerates to the relaxation residue");
            for (const auto& fl : flags) r.flags.push_back(fl);
            out.push_back(std::move(r));
        }
        return out;
    }

    std::vector<CertificateReport> run() {
        precompute();
        main_pass();
        if (want_kinetic) {
            gauss_pass();
            if (any_lambda()) zfine_pass();
        }
        return assemble();
    }
};

} // namespace

std::vector<CertificateReport> certificate_grid(const std::vector<double>& lambdas, int M, int N,
                                                int paths, std::uint64_t seed,
                                                const CertificateOptions& opt) {
    CertEngine eng(lambdas, M, N, paths, seed, opt);
    return eng.run();
}

CertificateReport divergence_certificate(double lambda, int M, int N, int paths,
                                         std::uint64_t seed, const CertificateOptions& opt) {
    return certificate_grid({lambda}, M, N, paths, seed, opt)[0];
}

ConcentrationReport cutoff_concentration(int M, int N, double lambda, int paths,
                                         std::uint64_t seed, const CertificateOptions& opt) {
    CertificateOptions o = opt;
    o.taming_paths = 0;  // the report carries no taming statistics
    CertEngine eng({lambda}, M, N, paths, seed, o);
    eng.want_kinetic = false;
    std::vector<CertificateReport> reps = eng.run();
    const CertificateReport& r = reps[0];

    ConcentrationReport out;
    out.M = M;
    out.N = N;
    out.paths = paths;
    out.lambda = lambda;
    out.K = o.K;
    out.mean_sq = r.wick_mass_sq;
    out.scaled = r.wick_mass_sq.mean * M;
    out.acceptance = r.acceptance;
    const std::vector<double>& q = eng.sl[0].q;
    double qbar = r.wick_mass.mean;
    std::vector<double> cen(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) cen[i] = (q[i] - qbar) * (q[i] - qbar);
    out.var_q = mean_stderr(cen);
    out.flags = r.flags;
    return out;
}

// ---------------------------------------------------------------------------
// singularity scaling
// ---------------------------------------------------------------------------

std::vector<SingularityRow> singularity_diagnostic(const std::vector<int>& Ns, double lambda,
                                                   int paths, std::uint64_t seed, int threads) {
    if (Ns.empty()) throw std::invalid_argument("singularity scan needs cutoffs");
    if (paths <= 0) throw std::invalid_argument("singularity scan needs paths > 0");
    std::vector<SingularityRow> rows;
    for (int N : Ns) {
        if (N < 1) throw std::invalid_argument("cutoff N must be >= 1");
        // exact cubic dealiasing while the grid fits; at N = 64 the 3N rule
        // would need 196^3, so fall back to the alias-admitting 2N + 2 grid
        // (the aliased pairing images have exactly zero mean against the cubic)
        const int P = N <= 32 ? product_grid(0, N, N, N) : good_fft_size(2 * N + 2);
        const double sigma = sigma_cached(N);
        std::vector<double> h2(paths);
        run_threads(threads, [&](int tid) {
            PackedCubic pc(N, P);
            for (int p = tid; p < paths; p += std::max(1, threads)) {
                Rng rng(stream_key(seed, tag::gff, (std::uint64_t)N, (std::uint64_t)p));
                pc.load_random(rng);
                double m = pc.mean_re2_im();
                double h = 0.5 * lambda * (m - sigma * pc.w0());
                h2[p] = h * h;
            }
        });
        MeanErr ms = mean_stderr(h2);
        SingularityRow row;
        row.N = N;
        row.rms = std::sqrt(ms.mean);
        row.se = row.rms > 0 ? ms.stderr_ / (2.0 * row.rms) : 0.0;
        row.scaled = N > 1 ? row.rms / std::sqrt(std::log((double)N)) : row.rms;
        row.exact_rms = std::sqrt(cubic_variance(N, lambda));
        rows.push_back(row);
    }
    return rows;
}

} // namespace lab
