#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pir/wire.hpp"

namespace pir {

enum class RunMode { kInProcess, kSockets };

struct RunConfig {
  uint32_t N = 0, T = 0, M = 0, q = 0;
  uint64_t seed = 1;
  RunMode mode = RunMode::kInProcess;
  std::optional<std::string> records_path;     // uniform random when unset
  std::optional<std::string> transcript_path;  // capture when set
  std::optional<uint32_t> only_theta;          // all targets when unset
  // Test hook: bump one answer symbol of this server (1-based) before
  // reconstruction, to exercise mismatch detection end to end.
  std::optional<uint32_t> corrupt_server;
};

struct ThetaOutcome {
  uint32_t theta = 0;
  bool exact = false;
  uint64_t downloaded = 0;  // total symbols received
  std::string mismatch;     // empty when exact
};

struct RunReport {
  SchemeParams prm;
  std::vector<ThetaOutcome> outcomes;
  bool all_exact = false;
};

// Full retrieval of every requested record: builds codes and plans, runs
// queries either in-process or against N forked server processes speaking
// the framed wire protocol over localhost sockets, reconstructs, and
// compares against the source records.
RunReport run_protocol(const RunConfig& cfg);

// ---- privacy audits ---------------------------------------------------------

struct SubsetVerdict {
  std::vector<uint32_t> servers0;  // colluding servers, 0-based ascending
  double statistic = 0.0;
  double threshold = 0.0;
  uint64_t df = 0;
  uint32_t bins = 0;
  bool rejected = false;
};

struct PrivacyAuditReport {
  bool exhaustive = false;
  uint64_t samples_per_theta = 0;
  std::vector<SubsetVerdict> verdicts;
  bool any_rejected = false;
};

// Draws `samples` fresh client states per target, hashes each colluding
// subset's restricted query bytes to 16-bit cells, pools sparse cells, and
// tests row homogeneity across targets at the given significance. One set
// of samples is shared by all audited subsets.
PrivacyAuditReport audit_privacy_sampled(
    const SchemeParams& prm, uint64_t seed, uint64_t samples,
    const std::vector<std::vector<uint32_t>>& subsets,
    double significance = 0.001);
// Same, over the lexicographically first `max_subsets` T-subsets of servers.
PrivacyAuditReport audit_privacy_sampled(const SchemeParams& prm,
                                         uint64_t seed, uint64_t samples,
                                         uint32_t max_subsets = 5,
                                         double significance = 0.001);

// All T-subsets of the N servers (0-based, lexicographic), at most `limit`.
std::vector<std::vector<uint32_t>> collusion_subsets(uint32_t N, uint32_t T,
                                                     uint32_t limit);

// Walks the entire secret space (all tuples of invertible matrices) and
// demands exact multiset equality of restricted query bytes across targets,
// for every T-subset. Only feasible for q = 2, L <= 3, M = 2.
PrivacyAuditReport audit_privacy_exhaustive(const SchemeParams& prm);

// ---- sweeps and benchmarks ----------------------------------------------------

struct SweepEntry {
  uint32_t N = 0, T = 0, M = 0, q = 0;  // q: minimal admissible
};
std::vector<SweepEntry> sweep_configs(uint32_t maxN, uint32_t maxM);

struct BenchReport {
  SchemeParams prm;
  double derive_ms = 0, codes_ms = 0, plan_ms = 0, query_ms = 0,
         answer_ms = 0, reconstruct_ms = 0;
};
// Times each phase for target record 1 with random records.
BenchReport run_bench(uint32_t N, uint32_t T, uint32_t M, uint32_t q,
                      uint64_t seed);

// Upper quantile of the chi-square distribution by the Wilson-Hilferty cube
// approximation; `significance` is the upper tail mass (e.g. 0.001).
double chi_square_quantile(uint64_t df, double significance);

}  // namespace pir
