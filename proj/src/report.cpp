#include "lab/report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lab {
namespace {

using json = nlohmann::ordered_json;

// non-finite doubles have no JSON literal; encode them as tagged strings so
// the snapshot loader and the config echo stay lossless
json jnum(double x) {
    if (std::isfinite(x)) return json(x);
    if (std::isnan(x)) return json("nan");
    return json(x > 0 ? "inf" : "-inf");
}

double jget(const json& v) {
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error("not a number: " + s);
}

json jstat(const MeanErr& s) {
    return json{{"mean", jnum(s.mean)}, {"stderr", jnum(s.stderr_)}, {"count", s.count}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// %.17g round-trips doubles and is locale-independent through snprintf
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json spec_echo(const PotentialSpec& s) {
    return json{{"N", s.N},         {"lambda", jnum(s.lambda)}, {"variant", taming_name(s.variant)},
                {"K", jnum(s.K)},   {"A", jnum(s.A)},           {"gamma", jnum(s.gamma)},
                {"delta", jnum(s.delta)}};
}

json cert_echo(const CertificateReport& r) {
    json o;
    o["lambda"] = jnum(r.lambda);
    o["M"] = r.M;
    o["N"] = r.N;
    o["paths"] = r.paths;
    o["alpha"] = jnum(r.alpha);
    o["alpha_pos"] = jnum(r.alpha_pos);
    o["K"] = jnum(r.K);
    o["acceptance"] = jnum(r.acceptance);
    o["cubic"] = jstat(r.cubic);
    o["l2_cubes"] = jstat(r.l2_cubes);
    o["taming_gain"] = jstat(r.taming_gain);
    o["taming_cost"] = jstat(r.taming_cost);
    o["wick_mass"] = jstat(r.wick_mass);
    o["wick_mass_sq"] = jstat(r.wick_mass_sq);
    o["kinetic_closed"] = jnum(r.kinetic_closed);
    o["kinetic_path"] = jstat(r.kinetic_path);
    o["total"] = jstat(r.total);
    o["taming_paths"] = r.taming_paths;
    o["flags"] = r.flags;
    return o;
}

} // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

const char* taming_name(TamingVariant v) {
    switch (v) {
        case TamingVariant::cutoff: return "cutoff";
        case TamingVariant::grand_canonical: return "grand_canonical";
        case TamingVariant::a_norm_tamed: return "a_norm_tamed";
    }
    return "?";
}

TamingVariant taming_from(const std::string& name) {
    if (name == "cutoff") return TamingVariant::cutoff;
    if (name == "grand_canonical") return TamingVariant::grand_canonical;
    if (name == "a_norm_tamed") return TamingVariant::a_norm_tamed;
    throw std::runtime_error("unknown taming variant: " + name);
}

std::string to_json(const PotentialSpec& spec) { return dump(spec_echo(spec)); }

std::string to_json(const std::vector<DiagramRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back(json{{"kind", r.kind},
                           {"N", r.N},
                           {"M", r.M},
                           {"lambda", jnum(r.lambda)},
                           {"value", jnum(r.value)}});
    return dump(json{{"table", "diagrams"}, {"rows", arr}});
}

std::string to_json(const SuiteReport& rep) {
    json o;
    o["table"] = "moment_suite";
    o["config"] = json{{"M", rep.M}, {"N", rep.N},       {"L", rep.L},
                       {"lambda", jnum(rep.lambda)},     {"paths", rep.paths}};
    o["seed"] = rep.seed;
    json arr = json::array();
    for (const auto& e : rep.entries) {
        json row{{"name", e.name}, {"stat", jstat(e.stat)}};
        row["expected"] = jnum(e.expected);
        row["has_expected"] = e.has_expected;
        arr.push_back(row);
    }
    o["entries"] = arr;
    o["flags"] = rep.flags;
    return dump(o);
}

std::string to_json(const VariationalReport& rep) {
    json o;
    o["table"] = "variational";
    o["config"] = spec_echo(rep.spec);
    o["drift"] = rep.drift;
    o["paths"] = rep.paths;
    o["steps"] = rep.steps;
    o["seed"] = rep.seed;
    json arr = json::array();
    for (const auto& t : rep.terms) arr.push_back(json{{"term", t.name}, {"stat", jstat(t.stat)}});
    o["terms"] = arr;
    o["total"] = jstat(rep.total);
    o["coercive"] = jstat(rep.coercive);
    o["kinetic"] = jnum(rep.kinetic);
    o["flags"] = rep.flags;
    return dump(o);
}

std::string to_json(const std::vector<CertificateReport>& reps, std::uint64_t seed) {
    json o;
    o["table"] = "divergence_certificate";
    o["seed"] = seed;
    json arr = json::array();
    for (const auto& r : reps) arr.push_back(cert_echo(r));
    o["rows"] = arr;
    return dump(o);
}

std::string to_json(const ConcentrationReport& rep, std::uint64_t seed) {
    json o;
    o["table"] = "concentration";
    o["config"] = json{{"M", rep.M},
                       {"N", rep.N},
                       {"lambda", jnum(rep.lambda)},
                       {"K", jnum(rep.K)},
                       {"paths", rep.paths}};
    o["seed"] = seed;
    o["mean_sq"] = jstat(rep.mean_sq);
    o["var_q"] = jstat(rep.var_q);
    o["scaled"] = jnum(rep.scaled);
    o["acceptance"] = jnum(rep.acceptance);
    o["flags"] = rep.flags;
    return dump(o);
}

std::string to_json(const std::vector<SingularityRow>& rows, double lambda, int paths,
                    std::uint64_t seed) {
    json o;
    o["table"] = "singularity";
    o["config"] = json{{"lambda", jnum(lambda)}, {"paths", paths}};
    o["seed"] = seed;
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back(json{{"N", r.N},
                           {"rms", jnum(r.rms)},
                           {"se", jnum(r.se)},
                           {"scaled", jnum(r.scaled)},
                           {"exact_rms", jnum(r.exact_rms)}});
    o["rows"] = arr;
    return dump(o);
}

std::string to_json(const std::vector<LogZEstimate>& rows, const PotentialSpec& spec,
                    std::uint64_t seed) {
    json o;
    o["table"] = "logz";
    o["config"] = spec_echo(spec);
    o["seed"] = seed;
    json arr = json::array();
    for (const auto& r : rows) {
        json row;
        row["method"] = r.method;
        row["value"] = jnum(r.value);
        row["ci"] = jnum(r.ci);
        row["paths"] = r.paths;
        row["unreliable"] = r.unreliable;
        row["flags"] = r.flags;
        arr.push_back(row);
    }
    o["rows"] = arr;
    return dump(o);
}

std::string to_json(const ChaosReport& rep, std::uint64_t seed) {
    json o;
    o["table"] = "chaos";
    o["config"] = json{{"order", rep.order}, {"power", rep.power}};
    o["seed"] = seed;
    json arr = json::array();
    for (const auto& c : rep.checks)
        arr.push_back(json{{"name", c.name},
                           {"value", jnum(c.value)},
                           {"target", jnum(c.target)},
                           {"tol", jnum(c.tol)},
                           {"pass", c.pass}});
    o["checks"] = arr;
    o["all_pass"] = rep.all_pass();
    return dump(o);
}

std::string to_csv(const std::vector<DiagramRow>& rows) {
    std::string out = "kind,N,M,lambda,value\n";
    for (const auto& r : rows)
        out += r.kind + "," + std::to_string(r.N) + "," + std::to_string(r.M) + "," +
               fmt(r.lambda) + "," + fmt(r.value) + "\n";
    return out;
}

std::string to_csv(const SuiteReport& rep) {
    std::string out = "name,mean,stderr,count,expected,has_expected\n";
    for (const auto& e : rep.entries)
        out += e.name + "," + fmt(e.stat.mean) + "," + fmt(e.stat.stderr_) + "," +
               std::to_string(e.stat.count) + "," + fmt(e.expected) + "," +
               (e.has_expected ? "1" : "0") + "\n";
    return out;
}

std::string to_csv(const VariationalReport& rep) {
    std::string out = "term,mean,stderr,count\n";
    for (const auto& t : rep.terms)
        out += t.name + "," + fmt(t.stat.mean) + "," + fmt(t.stat.stderr_) + "," +
               std::to_string(t.stat.count) + "\n";
    out += "total," + fmt(rep.total.mean) + "," + fmt(rep.total.stderr_) + "," +
           std::to_string(rep.total.count) + "\n";
    out += "coercive," + fmt(rep.coercive.mean) + "," + fmt(rep.coercive.stderr_) + "," +
           std::to_string(rep.coercive.count) + "\n";
    return out;
}

std::string to_csv(const std::vector<CertificateReport>& reps) {
    std::string out =
        "lambda,M,N,paths,alpha,alpha_pos,K,acceptance,cubic,cubic_se,l2_cubes,l2_cubes_se,"
        "taming_gain,taming_cost,wick_mass,wick_mass_sq,kinetic_closed,kinetic_path,"
        "kinetic_path_se,total,total_se\n";
    for (const auto& r : reps) {
        out += fmt(r.lambda) + "," + std::to_string(r.M) + "," + std::to_string(r.N) + "," +
               std::to_string(r.paths) + "," + fmt(r.alpha) + "," + fmt(r.alpha_pos) + "," +
               fmt(r.K) + "," + fmt(r.acceptance) + "," + fmt(r.cubic.mean) + "," +
               fmt(r.cubic.stderr_) + "," + fmt(r.l2_cubes.mean) + "," + fmt(r.l2_cubes.stderr_) +
               "," + fmt(r.taming_gain.mean) + "," + fmt(r.taming_cost.mean) + "," +
               fmt(r.wick_mass.mean) + "," + fmt(r.wick_mass_sq.mean) + "," +
               fmt(r.kinetic_closed) + "," + fmt(r.kinetic_path.mean) + "," +
               fmt(r.kinetic_path.stderr_) + "," + fmt(r.total.mean) + "," +
               fmt(r.total.stderr_) + "\n";
    }
    return out;
}

std::string to_csv(const ConcentrationReport& rep) {
    std::string out = "M,N,lambda,K,paths,mean_sq,mean_sq_se,var_q,var_q_se,scaled,acceptance\n";
    out += std::to_string(rep.M) + "," + std::to_string(rep.N) + "," + fmt(rep.lambda) + "," +
           fmt(rep.K) + "," + std::to_string(rep.paths) + "," + fmt(rep.mean_sq.mean) + "," +
           fmt(rep.mean_sq.stderr_) + "," + fmt(rep.var_q.mean) + "," + fmt(rep.var_q.stderr_) +
           "," + fmt(rep.scaled) + "," + fmt(rep.acceptance) + "\n";
    return out;
}

std::string to_csv(const std::vector<SingularityRow>& rows) {
    std::string out = "N,rms,se,scaled,exact_rms\n";
    for (const auto& r : rows)
        out += std::to_string(r.N) + "," + fmt(r.rms) + "," + fmt(r.se) + "," + fmt(r.scaled) +
               "," + fmt(r.exact_rms) + "\n";
    return out;
}

std::string to_csv(const std::vector<LogZEstimate>& rows) {
    std::string out = "method,value,ci,paths,unreliable\n";
    for (const auto& r : rows)
        out += r.method + "," + fmt(r.value) + "," + fmt(r.ci) + "," + std::to_string(r.paths) +
               "," + (r.unreliable ? "1" : "0") + "\n";
    return out;
}

std::string to_csv(const ChaosReport& rep) {
    std::string out = "name,value,target,tol,pass\n";
    for (const auto& c : rep.checks)
        out += c.name + "," + fmt(c.value) + "," + fmt(c.target) + "," + fmt(c.tol) + "," +
               (c.pass ? "1" : "0") + "\n";
    return out;
}

std::string field_to_json(const SpectralField& u) {
    json o;
    o["container"] = "spectral-field";
    o["version"] = 1;
    o["grid"] = json{{"band", u.N}, {"storage", "half-cube"}, {"width", 2 * u.N + 1}};
    json modes = json::array();
    json coeff = json::array();
    for (const auto& m : canonical_modes(u.N)) {
        modes.push_back(json::array({m.n.n0, m.n.n1, m.n.n2}));
        auto v = u.a[m.flat];
        coeff.push_back(jnum(v.real()));
        coeff.push_back(jnum(v.imag()));
    }
    o["modes"] = modes;
    o["coeff"] = coeff;
    return dump(o);
}

SpectralField field_from_json(const std::string& text) {
    json o = json::parse(text);
    if (o.value("container", "") != std::string("spectral-field"))
        throw std::runtime_error("not a spectral-field container");
    if (o.value("version", 0) != 1) throw std::runtime_error("unsupported snapshot version");
    const int N = o.at("grid").at("band").get<int>();
    SpectralField u(N);
    const auto& modes = o.at("modes");
    const auto& coeff = o.at("coeff");
    if (coeff.size() != 2 * modes.size()) throw std::runtime_error("coefficient list truncated");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        Index3 n{modes[i][0].get<int>(), modes[i][1].get<int>(), modes[i][2].get<int>()};
        if (!u.hc.stored(n) || !is_canonical(n))
            throw std::runtime_error("mode outside the canonical half-cube");
        u.set(n, {jget(coeff[2 * i]), jget(coeff[2 * i + 1])});
    }
    return u;
}

std::string manifest_json(const std::string& config_canon, std::uint64_t seed,
                          const std::vector<Artifact>& artifacts) {
    json o;
    o["code_version"] = kCodeVersion;
    o["config_hash"] = hash_hex(fnv1a64(config_canon));
    o["config"] = config_canon;
    o["seed"] = seed;
    json arr = json::array();
    for (const auto& a : artifacts)
        arr.push_back(json{{"file", a.file}, {"fnv1a", hash_hex(a.hash)}, {"bytes", a.bytes}});
    o["artifacts"] = arr;
    return dump(o);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(text.data(), (std::streamsize)text.size());
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (!f && !f.eof()) throw std::runtime_error("read failed: " + path);
    return ss.str();
}

} // namespace lab
