#include "lab/diagrams.hpp"
#include "lab/report.hpp"
#include "lab/variational.hpp"
#include "lab/wiener.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace lab;

// exit codes: 0 all configured checks pass, 1 a check failed,
// 2 argument/range errors, 3 unwritable output, 4 runtime failures
constexpr int kExitChecks = 1, kExitArgs = 2, kExitIo = 3, kExitRuntime = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmtd(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// "1..4" (inclusive), "8,16,32", or a single integer
std::vector<int> parse_int_range(const std::string& s) {
    const auto bad = [&] { return std::invalid_argument("bad integer range: " + s); };
    std::vector<int> out;
    try {
        if (auto dots = s.find(".."); dots != std::string::npos) {
            const int a = std::stoi(s.substr(0, dots));
            const int b = std::stoi(s.substr(dots + 2));
            if (b < a || b - a > 4096) throw bad();
            for (int v = a; v <= b; ++v) out.push_back(v);
        } else {
            std::size_t pos = 0;
            while (pos <= s.size()) {
                auto comma = s.find(',', pos);
                if (comma == std::string::npos) comma = s.size();
                out.push_back(std::stoi(s.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        }
    } catch (const std::invalid_argument&) {
        throw bad();
    } catch (const std::out_of_range&) {
        throw bad();
    }
    if (out.empty()) throw bad();
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    const auto bad = [&] { return std::invalid_argument("bad number list: " + s); };
    std::vector<double> out;
    try {
        std::size_t pos = 0;
        while (pos <= s.size()) {
            auto comma = s.find(',', pos);
            if (comma == std::string::npos) comma = s.size();
            std::size_t used = 0;
            const std::string tok = s.substr(pos, comma - pos);
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw bad();
            pos = comma + 1;
        }
    } catch (const std::invalid_argument&) {
        throw bad();
    } catch (const std::out_of_range&) {
        throw bad();
    }
    if (out.empty()) throw bad();
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_same_v<T, double>)
            s += fmtd(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

// Shared run state: canonical config entries, written artifacts, check results.
// The manifest is derived from the sorted config map, so two invocations that
// resolve to the same effective configuration hash identically no matter how
// the values were spelled on the command line.
struct Ctx {
    std::string out = ".";
    std::string format = "csv";
    int threads = 1;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> cfg;
    std::vector<Artifact> artifacts;
    int failed = 0, passed = 0;

    void put(const std::string& k, const std::string& v) { cfg[k] = v; }
    void put(const std::string& k, int v) { cfg[k] = std::to_string(v); }
    void put(const std::string& k, double v) { cfg[k] = fmtd(v); }

    void write(const std::string& file, const std::string& text) {
        const auto p = std::filesystem::path(out) / file;
        try {
            write_file(p.string(), text);
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
        artifacts.push_back({file, fnv1a64(text), text.size()});
    }
    void emit(const std::string& base, const std::string& csv, const std::string& json) {
        if (format == "json")
            write(base + ".json", json);
        else
            write(base + ".csv", csv);
    }

    void check(const std::string& name, bool ok, const std::string& detail) {
        (ok ? passed : failed) += 1;
        std::printf("check %-28s %s  %s\n", name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
    }

    int finish(const std::string& sub) {
        put("subcommand", sub);
        put("format", format);
        put("threads", threads);
        std::string canon;
        for (const auto& [k, v] : cfg) canon += k + "=" + v + "\n";
        const std::string man = manifest_json(canon, seed, artifacts);
        const auto p = std::filesystem::path(out) / "manifest.json";
        try {
            write_file(p.string(), man);
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
        for (const Artifact& a : artifacts)
            std::printf("artifact %s  bytes=%zu  fnv1a=%s\n", a.file.c_str(), a.bytes,
                        hash_hex(a.hash).c_str());
        std::printf("checks: %d passed, %d failed\n", passed, failed);
        return failed == 0 ? 0 : kExitChecks;
    }
};

void run_diagrams(Ctx& c, const std::string& nspec, const std::string& mspec,
                  const std::string& lspec) {
    const auto Ns = parse_int_range(nspec);
    const auto Ms = mspec.empty() ? std::vector<int>{} : parse_int_range(mspec);
    const auto Ls = lspec.empty() ? std::vector<double>{} : parse_double_list(lspec);
    for (int n : Ns)
        if (n < 1) throw std::invalid_argument("diagram cutoffs must be >= 1");
    for (int m : Ms)
        if (m < 1) throw std::invalid_argument("profile scales must be >= 1");
    const auto rows = diagram_table(Ns, Ms, Ls);
    c.put("n", join(Ns));
    c.put("m", join(Ms));
    c.put("lambda", join(Ls));
    c.emit("diagrams", to_csv(rows), to_json(rows));
}

void run_scaling(Ctx& c, const std::string& kind, const std::string& nspec, double tol) {
    const auto Ns = parse_int_range(nspec);
    if (Ns.size() < 2) throw std::invalid_argument("scaling needs at least two cutoffs");
    for (int n : Ns)
        if (n < 1) throw std::invalid_argument("cutoffs must be >= 1");
    std::vector<double> vals;
    for (int n : Ns) {
        if (kind == "tadpole") vals.push_back(tadpole(n));
        else if (kind == "sunset") vals.push_back(sunset(n));
        else if (kind == "delta") vals.push_back(delta_counterterm(n, 1.0));
        else if (kind == "cross") {
            auto [cs, cw] = cross_log_sum(n, n);
            vals.push_back(cs + cw);
        } else if (kind == "cubic") vals.push_back(cubic_variance(n, 1.0));
        else if (kind == "wick") vals.push_back(wick_square_variance_profile(n, 1.0));
        else vals.push_back(mixed_pair_variance_profile(n, 1.0));
    }

    const double nan = std::nan("");
    std::string csv = "kind,N,value,increment,ratio\n";
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const double inc = i ? vals[i] - vals[i - 1] : nan;
        const double rat = i ? vals[i] / vals[i - 1] : nan;
        csv += kind + "," + std::to_string(Ns[i]) + "," + fmtd(vals[i]) + "," + fmtd(inc) + "," +
               fmtd(rat) + "\n";
    }
    std::vector<DiagramRow> rows;
    for (std::size_t i = 0; i < Ns.size(); ++i) rows.push_back({kind, Ns[i], 0, 0.0, vals[i]});
    c.put("kind", kind);
    c.put("n", join(Ns));
    c.put("tol", tol);
    c.emit("scaling", csv, to_json(rows));

    if (kind == "tadpole") {
        // linear growth: doubling the cutoff should double the value
        for (std::size_t i = 1; i < Ns.size(); ++i) {
            const double r = vals[i] / vals[i - 1];
            c.check("ratio_N" + std::to_string(Ns[i]), r >= 2.0 - tol && r <= 2.0 + tol,
                    "ratio=" + fmtd(r));
        }
    } else {
        // log growth: successive increments along a doubling ladder agree,
        // measured against the larger of the pair
        for (std::size_t i = 2; i < Ns.size(); ++i) {
            const double d0 = vals[i - 1] - vals[i - 2], d1 = vals[i] - vals[i - 1];
            const bool ok = std::fabs(d1 - d0) <= tol * std::max(std::fabs(d0), std::fabs(d1));
            c.check("increment_N" + std::to_string(Ns[i]), ok,
                    "d0=" + fmtd(d0) + " d1=" + fmtd(d1));
        }
    }
}

void run_mc_moments(Ctx& c, int N, int samples, double sigmas) {
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    const SuiteReport rep = free_moment_suite(N, (std::size_t)samples, c.seed, c.threads);
    c.put("n", N);
    c.put("samples", samples);
    c.put("sigmas", sigmas);
    c.put("seed", std::to_string(c.seed));
    c.emit("mc_moments", to_csv(rep), to_json(rep));
    for (const SuiteEntry& e : rep.entries)
        c.check(e.name, std::fabs(e.stat.mean - e.expected) <= sigmas * e.stat.stderr_,
                "mean=" + fmtd(e.stat.mean) + " expected=" + fmtd(e.expected) +
                    " se=" + fmtd(e.stat.stderr_));
}

void run_zm_check(Ctx& c, const std::string& mspec, int n, double lambda, int paths, int steps,
                  double sigmas) {
    const auto Ms = parse_int_range(mspec);
    if (paths < 1) throw std::invalid_argument("paths must be positive");
    c.put("m", join(Ms));
    c.put("n", n);
    c.put("lambda", lambda);
    c.put("paths", paths);
    c.put("steps", steps);
    c.put("sigmas", sigmas);
    c.put("seed", std::to_string(c.seed));
    for (int M : Ms) {
        const int N = n > 0 ? n : M;
        const SuiteReport rep =
            zm_moment_suite(M, N, lambda, (std::size_t)paths, steps, c.seed, c.threads);
        c.emit("zm_check_M" + std::to_string(M), to_csv(rep), to_json(rep));
        for (const SuiteEntry& e : rep.entries) {
            if (!e.has_expected) continue;
            c.check("M" + std::to_string(M) + ":" + e.name,
                    std::fabs(e.stat.mean - e.expected) <= sigmas * e.stat.stderr_,
                    "mean=" + fmtd(e.stat.mean) + " expected=" + fmtd(e.expected) +
                        " se=" + fmtd(e.stat.stderr_));
        }
    }
}

void run_certify(Ctx& c, const std::string& lspec, int M, int n, int paths, double K, int steps) {
    const auto lams = parse_double_list(lspec);
    const int N = n > 0 ? n : M;
    CertificateOptions opt;
    opt.steps = steps;
    opt.K = K;
    opt.threads = c.threads;
    const auto reps = certificate_grid(lams, M, N, paths, c.seed, opt);
    c.put("lambda", join(lams));
    c.put("m", M);
    c.put("n", N);
    c.put("paths", paths);
    c.put("k", K);
    c.put("steps", steps);
    c.put("seed", std::to_string(c.seed));
    c.emit("certificate", to_csv(reps), to_json(reps, c.seed));
    for (const CertificateReport& r : reps) {
        // the kinetic energy two ways: closed per-mode sum vs path estimate
        const double gap = std::fabs(r.kinetic_path.mean - r.kinetic_closed);
        const double allow = 5.0 * r.kinetic_path.stderr_ + 0.03 * std::fabs(r.kinetic_closed);
        c.check("kinetic_lambda" + fmtd(r.lambda), gap <= allow,
                "closed=" + fmtd(r.kinetic_closed) + " path=" + fmtd(r.kinetic_path.mean) +
                    " se=" + fmtd(r.kinetic_path.stderr_));
    }
}

void run_singularity(Ctx& c, const std::string& nspec, double lambda, int samples) {
    const auto Ns = parse_int_range(nspec);
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    for (int n : Ns)
        if (n < 1) throw std::invalid_argument("cutoffs must be >= 1");
    const auto rows = singularity_diagnostic(Ns, lambda, samples, c.seed, c.threads);
    c.put("n", join(Ns));
    c.put("lambda", lambda);
    c.put("samples", samples);
    c.put("seed", std::to_string(c.seed));
    c.emit("singularity", to_csv(rows), to_json(rows, lambda, samples, c.seed));
    for (const SingularityRow& r : rows)
        c.check("rms_N" + std::to_string(r.N), std::fabs(r.rms - r.exact_rms) <= 4.0 * r.se,
                "rms=" + fmtd(r.rms) + " exact=" + fmtd(r.exact_rms) + " se=" + fmtd(r.se));
}

PotentialSpec build_spec(int n, double lambda, const std::string& variant, double K, double A,
                         double gamma, double delta) {
    PotentialSpec spec;
    spec.N = n;
    spec.lambda = lambda;
    spec.variant = taming_from(variant);
    spec.K = K;
    spec.A = A;
    spec.gamma = gamma;
    spec.delta = delta;
    spec.validate();
    return spec;
}

void run_logz(Ctx& c, const PotentialSpec& spec, int paths, const std::string& method, int steps,
              int drift_m) {
    DriftFamilySpec drift;
    if (drift_m > 0) {
        drift.family = DriftFamily::zm_blowup;
        drift.M = drift_m;
    }
    const DriftFamilySpec* dp = drift_m > 0 ? &drift : nullptr;
    std::vector<LogZEstimate> rows;
    if (method == "drift_bound" || method == "both")
        rows.push_back(estimate_logZ(spec, paths, "drift_bound", c.seed, dp, steps, c.threads));
    if (method == "naive" || method == "both")
        rows.push_back(estimate_logZ(spec, paths, "naive", c.seed, nullptr, steps, c.threads));
    c.put("n", spec.N);
    c.put("lambda", spec.lambda);
    c.put("variant", taming_name(spec.variant));
    c.put("k", spec.K);
    c.put("a", spec.A);
    c.put("gamma", spec.gamma);
    c.put("delta", spec.delta);
    c.put("paths", paths);
    c.put("method", method);
    c.put("steps", steps);
    c.put("drift_m", drift_m);
    c.put("seed", std::to_string(c.seed));
    c.emit("logz", to_csv(rows), to_json(rows, spec, c.seed));
    if (method == "both") {
        const LogZEstimate& b = rows[0];
        const LogZEstimate& nv = rows[1];
        if (std::isfinite(nv.value))
            c.check("bound_below_naive", b.value <= nv.value + 3.0 * (b.ci + nv.ci) + 0.05,
                    "bound=" + fmtd(b.value) + " naive=" + fmtd(nv.value));
        else
            c.check("bound_below_naive", true, "naive estimate degenerate; nothing to compare");
    }
}

void run_drift_opt(Ctx& c, const PotentialSpec& spec, const std::string& mspec, int paths,
                   int steps, int max_evals) {
    const auto Ms = parse_int_range(mspec);
    std::vector<DriftFamilySpec> cands;
    for (int m : Ms) {
        DriftFamilySpec d;
        d.family = DriftFamily::zm_blowup;
        d.M = m;
        cands.push_back(d);
    }
    const OptimizeResult res =
        optimize_drift(cands, spec, paths, max_evals, c.seed, steps, c.threads);
    c.put("n", spec.N);
    c.put("lambda", spec.lambda);
    c.put("variant", taming_name(spec.variant));
    c.put("k", spec.K);
    c.put("a", spec.A);
    c.put("gamma", spec.gamma);
    c.put("delta", spec.delta);
    c.put("m", join(Ms));
    c.put("paths", paths);
    c.put("steps", steps);
    c.put("max_evals", max_evals);
    c.put("seed", std::to_string(c.seed));
    c.emit("drift_opt", to_csv(res.report), to_json(res.report));
    std::printf("best drift: %s  objective=%s  evaluated=%d%s\n", res.best.name().c_str(),
                fmtd(res.report.total.mean).c_str(), res.evaluated,
                res.budget_exhausted ? "  (budget exhausted)" : "");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for a tamed cubic Schrodinger-wave Gibbs measure"};
    app.set_version_flag("--version", std::string(kCodeVersion));
    app.set_config("--spec", "", "structured key=value configuration file ([subcommand] sections)");
    app.require_subcommand(1);

    Ctx c;
    app.add_option("--out", c.out, "output directory for artifacts")
        ->envname("GIBBSLAB_OUT")
        ->capture_default_str();
    app.add_option("--format", c.format, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();

    std::string d_n, d_m, d_l;
    auto* sc_diag = app.add_subcommand("diagrams", "exact diagram constants over cutoff ranges");
    sc_diag->add_option("--n", d_n, "cutoffs, e.g. 1..4 or 8,16,32")->required();
    sc_diag->add_option("--m", d_m, "profile scales");
    sc_diag->add_option("--lambda", d_l, "couplings for the lambda-dependent rows");

    std::string s_kind = "sunset", s_n;
    double s_tol = 0.1;
    auto* sc_scal = app.add_subcommand("scaling", "growth checks of the diagram constants");
    sc_scal->add_option("--kind", s_kind, "diagram family")
        ->check(CLI::IsMember({"tadpole", "sunset", "delta", "cross", "cubic", "wick", "mixed"}))
        ->capture_default_str();
    sc_scal->add_option("--n", s_n, "cutoff ladder, e.g. 8,16,32")->required();
    sc_scal->add_option("--tol", s_tol, "band half-width")->capture_default_str();

    int mm_n = 4, mm_samples = 100000;
    double mm_sigmas = 3.0;
    auto* sc_mc = app.add_subcommand("mc-moments", "free-ensemble moments vs diagram targets");
    sc_mc->add_option("--n", mm_n, "frequency cutoff")->capture_default_str();
    sc_mc->add_option("--samples", mm_samples, "ensemble size")->capture_default_str();
    sc_mc->add_option("--sigmas", mm_sigmas, "acceptance band in std-errs")->capture_default_str();
    sc_mc->add_option("--seed", c.seed, "RNG seed")->required();

    std::string z_m;
    int z_n = 0, z_paths = 10000, z_steps = 16;
    double z_lambda = 0, z_sigmas = 5.0;
    auto* sc_zm = app.add_subcommand("zm-check", "relaxation approximation moment suite");
    sc_zm->add_option("--m", z_m, "relaxation scales, e.g. 8,16,32")->required();
    sc_zm->add_option("--n", z_n, "frequency cutoff (0: match the scale)")->capture_default_str();
    sc_zm->add_option("--lambda", z_lambda, "coupling")->capture_default_str();
    sc_zm->add_option("--paths", z_paths, "ensemble size")->capture_default_str();
    sc_zm->add_option("--steps", z_steps, "time steps")->capture_default_str();
    sc_zm->add_option("--sigmas", z_sigmas, "acceptance band in std-errs")->capture_default_str();
    sc_zm->add_option("--seed", c.seed, "RNG seed")->required();

    std::string cd_l;
    int cd_m = 8, cd_n = 0, cd_paths = 10000, cd_steps = 8;
    double cd_k = 0.5;
    auto* sc_cd = app.add_subcommand("certify-divergence",
                                     "strong-coupling divergence certificate at the blow-up drift");
    sc_cd->add_option("--lambda", cd_l, "couplings, e.g. 1,2,4,8")->required();
    sc_cd->add_option("--m", cd_m, "relaxation scale")->capture_default_str();
    sc_cd->add_option("--n", cd_n, "frequency cutoff (0: match the scale)")->capture_default_str();
    sc_cd->add_option("--paths", cd_paths, "ensemble size")->capture_default_str();
    sc_cd->add_option("--k", cd_k, "cutoff level for the indicator")->capture_default_str();
    sc_cd->add_option("--steps", cd_steps, "coarse time steps")->capture_default_str();
    sc_cd->add_option("--seed", c.seed, "RNG seed")->required();

    std::string sg_n;
    int sg_samples = 10000;
    double sg_lambda = 1.0;
    auto* sc_sg = app.add_subcommand("singularity", "interaction energy growth under the free measure");
    sc_sg->add_option("--n", sg_n, "cutoff ladder, e.g. 8,16,32,64")->required();
    sc_sg->add_option("--lambda", sg_lambda, "coupling")->capture_default_str();
    sc_sg->add_option("--samples", sg_samples, "ensemble size")->capture_default_str();
    sc_sg->add_option("--seed", c.seed, "RNG seed")->required();

    int lz_n = 3, lz_paths = 2000, lz_steps = 16, lz_drift_m = 0;
    double lz_lambda = 0.25, lz_k = 1.0, lz_a = 1.0, lz_gamma = 3.0, lz_delta = 0.01;
    std::string lz_variant = "grand_canonical", lz_method = "both";
    auto* sc_lz = app.add_subcommand("logz", "partition function estimates");
    sc_lz->add_option("--n", lz_n, "frequency cutoff")->capture_default_str();
    sc_lz->add_option("--lambda", lz_lambda, "coupling")->capture_default_str();
    sc_lz->add_option("--variant", lz_variant, "taming variant")
        ->check(CLI::IsMember({"cutoff", "grand_canonical", "a_norm_tamed"}))
        ->capture_default_str();
    sc_lz->add_option("--k", lz_k, "cutoff level")->capture_default_str();
    sc_lz->add_option("--a", lz_a, "penalty strength")->capture_default_str();
    sc_lz->add_option("--gamma", lz_gamma, "penalty power")->capture_default_str();
    sc_lz->add_option("--delta", lz_delta, "A-norm penalty strength")->capture_default_str();
    sc_lz->add_option("--paths", lz_paths, "ensemble size")->capture_default_str();
    sc_lz->add_option("--method", lz_method, "estimator")
        ->check(CLI::IsMember({"naive", "drift_bound", "both"}))
        ->capture_default_str();
    sc_lz->add_option("--steps", lz_steps, "time steps for the bound")->capture_default_str();
    sc_lz->add_option("--drift-m", lz_drift_m, "blow-up drift scale for the bound (0: zero drift)")
        ->capture_default_str();
    sc_lz->add_option("--seed", c.seed, "RNG seed")->required();

    int do_n = 4, do_paths = 500, do_steps = 16, do_max = 16;
    double do_lambda = 1.0, do_k = 1.0, do_a = 1.0, do_gamma = 3.0, do_delta = 0.01;
    std::string do_variant = "cutoff", do_m = "2";
    auto* sc_do = app.add_subcommand("drift-opt", "grid search over the finite drift families");
    sc_do->add_option("--n", do_n, "frequency cutoff")->capture_default_str();
    sc_do->add_option("--lambda", do_lambda, "coupling")->capture_default_str();
    sc_do->add_option("--variant", do_variant, "taming variant")
        ->check(CLI::IsMember({"cutoff", "grand_canonical", "a_norm_tamed"}))
        ->capture_default_str();
    sc_do->add_option("--k", do_k, "cutoff level")->capture_default_str();
    sc_do->add_option("--a", do_a, "penalty strength")->capture_default_str();
    sc_do->add_option("--gamma", do_gamma, "penalty power")->capture_default_str();
    sc_do->add_option("--delta", do_delta, "A-norm penalty strength")->capture_default_str();
    sc_do->add_option("--m", do_m, "blow-up scales to try, e.g. 2,3,4")->capture_default_str();
    sc_do->add_option("--paths", do_paths, "ensemble size per candidate")->capture_default_str();
    sc_do->add_option("--steps", do_steps, "time steps")->capture_default_str();
    sc_do->add_option("--max-evals", do_max, "evaluation budget")->capture_default_str();
    sc_do->add_option("--seed", c.seed, "RNG seed")->required();

    for (CLI::App* s : {sc_diag, sc_scal, sc_mc, sc_zm, sc_cd, sc_sg, sc_lz, sc_do})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitArgs;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        std::error_code ec;
        std::filesystem::create_directories(c.out, ec);
        if (ec) throw IoError("cannot create output directory: " + c.out);

        if (app.got_subcommand(sc_diag)) {
            run_diagrams(c, d_n, d_m, d_l);
            rc = c.finish("diagrams");
        } else if (app.got_subcommand(sc_scal)) {
            run_scaling(c, s_kind, s_n, s_tol);
            rc = c.finish("scaling");
        } else if (app.got_subcommand(sc_mc)) {
            run_mc_moments(c, mm_n, mm_samples, mm_sigmas);
            rc = c.finish("mc-moments");
        } else if (app.got_subcommand(sc_zm)) {
            run_zm_check(c, z_m, z_n, z_lambda, z_paths, z_steps, z_sigmas);
            rc = c.finish("zm-check");
        } else if (app.got_subcommand(sc_cd)) {
            run_certify(c, cd_l, cd_m, cd_n, cd_paths, cd_k, cd_steps);
            rc = c.finish("certify-divergence");
        } else if (app.got_subcommand(sc_sg)) {
            run_singularity(c, sg_n, sg_lambda, sg_samples);
            rc = c.finish("singularity");
        } else if (app.got_subcommand(sc_lz)) {
            const PotentialSpec spec =
                build_spec(lz_n, lz_lambda, lz_variant, lz_k, lz_a, lz_gamma, lz_delta);
            run_logz(c, spec, lz_paths, lz_method, lz_steps, lz_drift_m);
            rc = c.finish("logz");
        } else if (app.got_subcommand(sc_do)) {
            const PotentialSpec spec =
                build_spec(do_n, do_lambda, do_variant, do_k, do_a, do_gamma, do_delta);
            run_drift_opt(c, spec, do_m, do_paths, do_steps, do_max);
            rc = c.finish("drift-opt");
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "argument error: %s\n", e.what());
        return kExitArgs;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "wall_time_s=%.3f\n", secs);
    return rc;
}
