#pragma once
#include "lab/diagrams.hpp"
#include "lab/spectrum.hpp"
#include "lab/variational.hpp"
#include "lab/wiener.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lab {

inline constexpr const char* kCodeVersion = "0.1.0";

// FNV-1a, the artifact and config fingerprint used by the manifest
std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(std::uint64_t h);

const char* taming_name(TamingVariant v);
TamingVariant taming_from(const std::string& name);  // throws on unknown name

// JSON renderers. Key order is fixed, doubles round-trip exactly, and every
// Monte Carlo ensemble carries its configuration, per-statistic
// (mean, stderr, count), and the RNG seed; output ends in '\n'.
std::string to_json(const PotentialSpec& spec);
std::string to_json(const std::vector<DiagramRow>& rows);
std::string to_json(const SuiteReport& rep);
std::string to_json(const VariationalReport& rep);
std::string to_json(const std::vector<CertificateReport>& reps, std::uint64_t seed);
std::string to_json(const ConcentrationReport& rep, std::uint64_t seed);
std::string to_json(const std::vector<SingularityRow>& rows, double lambda, int paths,
                    std::uint64_t seed);
std::string to_json(const std::vector<LogZEstimate>& rows, const PotentialSpec& spec,
                    std::uint64_t seed);
std::string to_json(const ChaosReport& rep, std::uint64_t seed);

// CSV renderers with frozen column schemas (one header line, '\n' endings,
// %.17g doubles). JSON mirrors each schema and adds the confidence intervals.
//   diagrams:      kind,N,M,lambda,value
//   suite:         name,mean,stderr,count,expected,has_expected
//   variational:   term,mean,stderr,count
//   certificates:  lambda,M,N,paths,alpha,alpha_pos,K,acceptance,cubic,cubic_se,
//                  l2_cubes,l2_cubes_se,taming_gain,taming_cost,wick_mass,
//                  wick_mass_sq,kinetic_closed,kinetic_path,kinetic_path_se,
//                  total,total_se
//   concentration: M,N,lambda,K,paths,mean_sq,mean_sq_se,var_q,var_q_se,scaled,acceptance
//   singularity:   N,rms,se,scaled,exact_rms
//   logz:          method,value,ci,paths,unreliable
//   chaos:         name,value,target,tol,pass
std::string to_csv(const std::vector<DiagramRow>& rows);
std::string to_csv(const SuiteReport& rep);
std::string to_csv(const VariationalReport& rep);
std::string to_csv(const std::vector<CertificateReport>& reps);
std::string to_csv(const ConcentrationReport& rep);
std::string to_csv(const std::vector<SingularityRow>& rows);
std::string to_csv(const std::vector<LogZEstimate>& rows);
std::string to_csv(const ChaosReport& rep);

// Field snapshot container, version tag 1: band, canonical mode list, and
// interleaved re/im coefficients in the same order. Loading reconstructs the
// plane mirrors, so save/load round-trips bitwise.
std::string field_to_json(const SpectralField& u);
SpectralField field_from_json(const std::string& text);

struct Artifact {
    std::string file;
    std::uint64_t hash = 0;
    std::size_t bytes = 0;
};

// Deterministic run manifest: code version, canonical config text and its
// hash, the seed, and one (file, fnv1a, bytes) entry per artifact. Wall time
// is deliberately not recorded here (it goes to stderr) so identical
// config + seed reruns produce byte-identical manifests.
std::string manifest_json(const std::string& config_canon, std::uint64_t seed,
                          const std::vector<Artifact>& artifacts);

void write_file(const std::string& path, const std::string& text);  // throws on io error
std::string read_file(const std::string& path);                     // throws on io error

} // namespace lab
