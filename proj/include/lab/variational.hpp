#pragma once
#include "lab/accum.hpp"
#include "lab/spectrum.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lab {

// Tamed cubic interaction measures on a free pair (u, w): the Gibbs weight is
// exp(-H) with H the renormalized interaction energy, stabilized by one of
//   cutoff           indicator 1{ |int :u^2:| <= K } on the Wick mass
//   grand_canonical  additive exponent penalty A |int :u^2:|^gamma
//   a_norm_tamed     additive exponent penalty delta (||u||_A^20 + ||w||_A^20)
enum class TamingVariant { cutoff, grand_canonical, a_norm_tamed };

struct PotentialSpec {
    int N = 4;
    double lambda = 1.0;
    double K = 1.0;       // cutoff level           (cutoff)
    double A = 1.0;       // penalty strength       (grand_canonical)
    double gamma = 3.0;   // penalty power, >= 3    (grand_canonical)
    double delta = 0.01;  // penalty strength       (a_norm_tamed)
    TamingVariant variant = TamingVariant::cutoff;

    void validate() const;  // throws on out-of-range members for the variant
};

// Finite drift families for the variational side. constant_in_time drifts at
// the fixed rate pair (target_s, target_w); zm_blowup runs the relaxation
// approximation at scale M plus the oriented low-frequency profile ramp.
enum class DriftFamily { zero, constant_in_time, zm_blowup };

struct DriftFamilySpec {
    DriftFamily family = DriftFamily::zero;
    SpectralField target_s{0}, target_w{0};  // constant_in_time rates, band N
    int M = 2;                               // zm_blowup relaxation scale, <= N
    double sign = 1.0;                       // zm_blowup profile orientation, +-1
    std::string name() const;
};

struct TermStat {
    std::string name;
    MeanErr stat;
};

struct VariationalReport {
    PotentialSpec spec;
    std::string drift;
    int paths = 0, steps = 0;
    std::uint64_t seed = 0;
    std::vector<TermStat> terms;
    MeanErr total;     // mean is the exact sum of the term means, in term order
    MeanErr coercive;  // cubic-penalty + kinetic minorant (see coercive_sample)
    double kinetic = 0;
    std::vector<std::string> flags;
    const TermStat* find(const std::string& n) const;
};

// int :u_N^2: dx by Parseval: L2 mass of the band-N part minus the tadpole
double wick_l2_integral(const SpectralField& u, int N);

// (lambda/2) int :u_N^2: w_N dx on an exact cubic grid
double hamiltonian_wick(const SpectralField& u, const SpectralField& w, const PotentialSpec& spec);

// wick energy plus the counterterm delta(N, lambda); implemented as that sum,
// so subtracting hamiltonian_wick recovers the counterterm bitwise
double hamiltonian_renormalized(const SpectralField& u, const SpectralField& w,
                                const PotentialSpec& spec);

bool cutoff_indicator(const SpectralField& u, int N, double K);

// additive exponent penalty of the selected variant (identically 0 for cutoff)
double taming_value(const SpectralField& u, const SpectralField& w, const PotentialSpec& spec);

// (A/2) | int (2 <1>_S Y_S + Y_S^2) |^3 + (1/2) kinetic_energy: the coercive
// minorant of the objective; objective_W reports exactly this function's value
// per path, so standalone evaluations reproduce the report entries bitwise
double coercive_sample(const SpectralField& one_s, const SpectralField& ups_s, int N,
                       double kinetic_energy, double A);

// Monte Carlo value of the changed-variables objective at a drift Upsilon:
//   E[ (lambda/2) int :<1>_S^2: <1>_W + lambda int <1>_S Th_S Th_W
//      + (lambda/2) int <1>_W Th_S^2 + (lambda/2) int Th_S^2 Th_W
//      + taming(<1> + Th) + (1/2) int ||Upsilon-dot||_{H^1}^2 dt ]
// with Th = Upsilon - lambda (z_W, z_S) the counter-shifted drift. The cutoff
// variant gates the exponent terms by the Wick-mass indicator instead of
// adding a penalty. Terms are reported per path; total = their exact sum.
VariationalReport objective_W(const DriftFamilySpec& drift, const PotentialSpec& spec,
                              int paths, std::uint64_t seed, int steps = 16, int threads = 1);

struct LogZEstimate {
    std::string method;  // "naive" or "drift_bound"
    double value = 0;
    double ci = 0;  // one-sigma half width (log scale for naive)
    int paths = 0;
    bool unreliable = false;  // importance weights dominated by the top 1%
    std::vector<std::string> flags;
};

// log of the partition function: "naive" averages exp(-H - penalty) (gated for
// the cutoff variant) over free draws and guards against heavy tails;
// "drift_bound" returns the variational lower bound -objective_W at the given
// drift (zero drift when none is passed)
LogZEstimate estimate_logZ(const PotentialSpec& spec, int paths, const std::string& method,
                           std::uint64_t seed, const DriftFamilySpec* drift = nullptr,
                           int steps = 16, int threads = 1);

struct OptimizeResult {
    DriftFamilySpec best;
    VariationalReport report;
    int evaluated = 0;
    bool budget_exhausted = false;
};

// Grid search over a finite candidate list with common random numbers: every
// candidate is scored by objective_W under the same seed, so comparisons see
// correlated noise. The zero drift is always scored (prepended when absent),
// which makes the winner never worse than zero up to ties. Ties break by
// objective, then kinetic energy, then list position.
OptimizeResult optimize_drift(const std::vector<DriftFamilySpec>& candidates,
                              const PotentialSpec& spec, int paths, int max_evals,
                              std::uint64_t seed, int steps = 16, int threads = 1);

struct CertificateOptions {
    int steps = 8;            // coarse time grid of the shared ensemble pass
    double K = 0.5;           // cutoff level for the indicator statistics
    double tame_delta = 1e-15;
    double tame_cap = 1.0;    // min(.., cap) regularization of the mollified penalty
    double mollify_eps = 0.25;
    int taming_paths = 100;   // A-norm subsample size
    int kinetic_paths = 512;  // exact-law OU subsample (Gaussian kinetic part)
    int kinetic_fine = 32;    // fine-grid bundles (second-chaos kinetic part)
    int kinetic_steps = 64;
    int threads = 1;
};

struct CertificateReport {
    double lambda = 0;
    int M = 0, N = 0, paths = 0;
    double alpha = 0, alpha_pos = 0, K = 0;
    MeanErr cubic;         // (lambda/2) int Ups_S^2 Ups_W, indicator-gated
    MeanErr l2_cubes;      // ||Ups_S||_{L2}^3 + ||Ups_W||_{L2}^3
    MeanErr taming_gain;   // -delta min(||mollified v||^20-pair, cap), gated, subsampled
    MeanErr taming_cost;   // +delta ||v||^20-pair, gated, subsampled
    MeanErr wick_mass;     // q = int :(<1>_S + Th_S)^2:
    MeanErr wick_mass_sq;  // q^2
    double acceptance = 0;      // mean of 1{|q| <= K}
    double kinetic_closed = 0;  // exact E int ||Upsilon-dot-vec||_{H^1}^2 dt
    MeanErr kinetic_path;       // sampled estimate of the same energy
    MeanErr total;  // gated exponent terms + L2 cubes + (3/4) kinetic_closed
    int taming_paths = 0;
    std::vector<std::string> flags;
};

// Strong-coupling divergence certificate at relaxation scale M, cutoff N: one
// coupling-free ensemble pass is shared by every lambda in the list (common
// random numbers across couplings), and the blow-up drift
//   Upsilon-dot_S = Upsilon-dot_W = -Zdot_M - sgn(lambda) sqrt(alpha^+) f_M
// is assembled per coupling from the stored path data. The kinetic energy is
// reported twice: in closed form and as a path estimate, as a consistency pair.
std::vector<CertificateReport> certificate_grid(const std::vector<double>& lambdas, int M, int N,
                                                int paths, std::uint64_t seed,
                                                const CertificateOptions& opt = {});
CertificateReport divergence_certificate(double lambda, int M, int N, int paths,
                                         std::uint64_t seed, const CertificateOptions& opt = {});

struct ConcentrationReport {
    int M = 0, N = 0, paths = 0;
    double lambda = 0, K = 0;
    MeanErr mean_sq;   // E q^2 of the Wick mass under the certificate drift
    MeanErr var_q;     // centered: E (q - E q)^2  (lambda = 0: the relaxation residue)
    double scaled = 0; // E q^2 * M
    double acceptance = 0;
    std::vector<std::string> flags;
};

// concentration of the Wick mass statistic under the certificate drift
ConcentrationReport cutoff_concentration(int M, int N, double lambda, int paths,
                                         std::uint64_t seed, const CertificateOptions& opt = {});

struct SingularityRow {
    int N = 0;
    double rms = 0, se = 0;  // sqrt E[H_N^2] and its delta-method std-err
    double scaled = 0;       // rms / sqrt(log N)
    double exact_rms = 0;    // closed form sqrt(cubic_variance)
};

// growth of the interaction energy under the free measure: per cutoff, the
// sampled L2 size of H_N over packed free-pair draws
std::vector<SingularityRow> singularity_diagnostic(const std::vector<int>& Ns, double lambda,
                                                   int paths, std::uint64_t seed, int threads = 1);

} // namespace lab
