#pragma once
#include "lab/accum.hpp"
#include "lab/spectrum.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lab {

inline constexpr int kMinSteps = 8;

// Handle for one path of the two cylindrical Brownian families on cube N with a
// left-endpoint grid of L steps on [0,1]. The path itself is materialized
// deterministically from (seed, index) by BundleWalker, so a bundle is cheap to
// pass around and an ensemble member is reproducible independent of scheduling.
struct PathBundle {
    int N = 0;
    int L = 0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    bool zero_noise = false;

    PathBundle(int N_, int L_, std::uint64_t seed_, std::uint64_t index_, bool zero_noise_ = false);
};

inline PathBundle simulate_bundle(int N, int L, std::uint64_t seed, std::uint64_t index = 0) {
    return PathBundle(N, L, seed, index);
}

// Stepping state of one bundle path. Increments are drawn in a fixed order
// (step-major, family S then W, canonical modes in list order), so regenerating
// a walker replays the identical path. Var(B^n(t_k)) = t_k per mode; the n = 0
// component is real; conjugate modes mirror the canonical half.
class BundleWalker {
public:
    explicit BundleWalker(const PathBundle& b);

    int steps_done() const { return k_; }
    double time() const { return double(k_) / L_; }
    double dt() const { return 1.0 / L_; }
    int total_steps() const { return L_; }
    void advance();  // one step; consumes 2 normals per canonical mode per family

    const SpectralField& one_s() const { return one_s_; }  // <1>_{S,N} at current time
    const SpectralField& one_w() const { return one_w_; }
    const std::vector<Mode>& modes() const { return modes_; }
    // raw Brownian increments of the last advance(), canonical-mode order
    const std::vector<std::complex<double>>& db_s() const { return db_s_; }
    const std::vector<std::complex<double>>& db_w() const { return db_w_; }

private:
    int N_, L_, k_ = 0;
    bool zero_noise_;
    Rng rng_s_, rng_w_;
    std::vector<Mode> modes_;
    std::vector<std::int64_t> mirror_;  // plane-mirror flat index or -1
    std::vector<double> buf_;
    std::vector<std::complex<double>> db_s_, db_w_;
    SpectralField one_s_, one_w_;

    void apply(const std::vector<std::complex<double>>& db, SpectralField& one);
    void draw(Rng& rng, std::vector<std::complex<double>>& db);
};

// Wick square at unit time: u_N^2 - sigma_N as a band-2N field (sigma_N the
// full-cube tadpole), dealiased on a cubic-exact grid
SpectralField wick_square(const SpectralField& u, int N);

// (u_N^2 - sigma_N) w_N read on band out_band in a single grid pass
SpectralField wick_cubic_mixed(const SpectralField& u, const SpectralField& w, int N, int out_band = -1);

// Renormalized squares of the running families at the walker's current time t
// (the subtraction is t * sigma_N since Var grows linearly in t).
struct WickSnapshot {
    double t;
    SpectralField two;    // :<1>_S^2:, band 2N
    SpectralField mixed;  // <1>_S <1>_W, band 2N
    SpectralField three;  // :<1>_S^2: <1>_W, band N read
};
WickSnapshot take_wick_snapshot(const BundleWalker& w);

// Shared dealiased reader for the counter-process rates at cutoff N:
//   zs_dot-hat(n) = 1/2 <n>^-2 (:one_s^2:)-hat(n)
//   zw_dot-hat(n) = <n>^-2 (one_s one_w)-hat(n)     (band N)
class WickReader {
public:
    explicit WickReader(int N);
    void counter_rates(const SpectralField& one_s, const SpectralField& one_w, double t,
                       SpectralField& zs_dot, SpectralField& zw_dot);

private:
    int N_, P_;
    double sigma_;
    std::vector<double> gs_, gw_;
};

struct CounterIntegrals {
    SpectralField z_s, z_w;           // band-N counter processes at t = 1, left-point Riemann
    double zs_energy = 0, zw_energy = 0;  // int_0^1 ||Zdot||_{H^1}^2 dt, left-point
};
CounterIntegrals integrate_counter_processes(const PathBundle& b);

enum class ZmScheme { euler, exact_kernel };

struct ZmResult {
    SpectralField z;   // ball-M approximation at t = 1 (modes outside the ball are zero)
    SpectralField a;   // driver A_N(1) = <1>_{S,N}(1) - lambda z_W(1), band N
    double lavo = 0;   // dt sum_k ||dZ/dt(t_k)||_{H^1}^2 (euler scheme; 0 for exact_kernel)
};
// relaxation approximation dZ^(n) = <n>^-1 M (A^(n) - Z^(n)) dt toward the
// shifted driver; euler steps the ODE on the bundle grid, exact_kernel sums
// kernel-weighted driver increments for the t = 1 endpoint
ZmResult simulate_zm(const PathBundle& b, int M, double lambda, ZmScheme scheme);

struct SuiteEntry {
    std::string name;
    MeanErr stat;
    double expected = 0;  // closed-form target when one exists (else 0)
    bool has_expected = false;
};

struct SuiteReport {
    int M = 0, N = 0, L = 0;
    double lambda = 0;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::vector<SuiteEntry> entries;
    std::vector<std::string> flags;
    const SuiteEntry* find(const std::string& name) const;
};

// Moment suite for the relaxation approximation at t = 1:
//   corn0  = E int Z^2           (= E|Z(x)|^2 by translation invariance), ~ M
//   corn02 = E[2 int A Z - int Z^2],                                      ~ M
//   corn1  = E| int (A - Z)^2 - E int (A - Z)^2 |^2,                      ~ 1/M
//   corn2  = E(int A f)^2 + E(int Z f)^2,                                 ~ 1/M^2
//   corn4  = E||Z||_A^2 and E||Z||_A^4 (subsampled; bounded in M)
//   lavo   = E int ||dZ/dt||_{H^1}^2 dt,                                  ~ M^3
// lambda = 0 runs an exact endpoint-law sampler (no time discretization except
// the lavo sub-ensemble); lambda != 0 walks full bundles (much slower).
SuiteReport zm_moment_suite(int M, int N, double lambda, std::size_t paths, int L,
                            std::uint64_t seed, int threads = 1);

// Free-ensemble moments at cutoff N, every entry carrying its closed diagram
// target: field mass E u^2, the variances of int :u^2: and int :u^2: w, and
// the H^1 sizes of the two counter rates at unit time (the endpoint law of
// the running families is exactly the free field, so no walking is needed).
SuiteReport free_moment_suite(int N, std::size_t samples, std::uint64_t seed, int threads = 1);

struct ChaosCheck {
    std::string name;
    double value = 0, target = 0, tol = 0;
    bool pass = false;
};
struct ChaosReport {
    int order = 0, power = 0;
    std::vector<ChaosCheck> checks;
    bool all_pass() const;
};
// scalar Gaussian chaos diagnostics: Hermite orthogonality E[H_j H_k] = j! d_jk,
// hypercontractivity ||H_k||_p <= (p-1)^{k/2} ||H_k||_2, fourth-moment identity
ChaosReport chaos_checks(int order, int power, std::size_t trials, std::uint64_t seed);

} // namespace lab
