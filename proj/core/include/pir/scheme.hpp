#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pir/array_code.hpp"

namespace pir {

// Integer skeleton of a retrieval configuration, independent of the field:
// N servers, any T of which may pool their views, M records of L symbols.
//
// Records are split into M-1 "mixing levels": level k combines side
// information from k other records and uses an (N, T; ell[k-1]) block code.
// Per server, a level-k code contributes alpha_k leading slots on the first
// T servers and beta_k on the rest (gamma below); the counts follow from a
// feasibility scan that makes all of them nonnegative integers.
struct SchemeCounts {
  uint32_t N = 0, T = 0, M = 0;
  uint32_t d = 0, n = 0, t = 0;    // d = gcd(N, T), n = N/d, t = T/d
  std::vector<uint64_t> ell;       // size M-1, ell[k-1] for level k
  std::vector<uint64_t> alpha;     // size M (index k-1)
  std::vector<uint64_t> beta;      // size M
  uint64_t L = 0;                  // record length in field symbols
  uint64_t D = 0;                  // total downloaded symbols per retrieval
  Rational rate;                   // L / D
  Rational cap;                    // information-theoretic ceiling for (N,T,M)

  // Per-server slot quota of level s (1-based server index i, 1-based s).
  uint64_t gamma(uint32_t i, uint32_t s) const {
    return i <= T ? alpha[s - 1] : beta[s - 1];
  }
  // Downloaded symbols at server i.
  uint64_t server_download(uint32_t i) const;
};

// How one block code is realized at field size q: a generalized
// Reed-Solomon code over F_{q^sub_ell} expanded to blocks and interleaved
// `copies` times (sub_ell * copies = ell).
struct CodeChoice {
  uint32_t sub_ell = 0;
  uint32_t copies = 0;
  GrsMode mode = GrsMode::kPlain;
  friend bool operator==(const CodeChoice&, const CodeChoice&) = default;
};

struct SchemeParams : SchemeCounts {
  uint32_t q = 0;
  std::vector<CodeChoice> choices;  // size M-1
};

// Exact rate ceiling (1 - T/N) / (1 - (T/N)^M).
Rational capacity(uint32_t N, uint32_t T, uint32_t M);

// Field-independent counts; throws invalid_argument when the feasibility
// scan has no solution or the inputs are out of range (need N > T >= 1,
// M >= 2).
SchemeCounts derive_counts(uint32_t N, uint32_t T, uint32_t M);

// Counts plus a verified code construction per level at field size q
// (prime power). Throws invalid_argument if q does not admit some level.
SchemeParams derive_parameters(uint32_t N, uint32_t T, uint32_t M, uint32_t q);

// Smallest sub_ell | ell whose GRS length bound admits N at field size q,
// smallest extension mode first, each candidate verified MDS before being
// accepted. nullopt when nothing up to ell works.
std::optional<CodeChoice> choose_code(uint32_t N, uint32_t T, uint64_t ell,
                                      uint32_t q);

// Smallest prime power q such that every level of (N, T, M) is
// constructible. Terminates: the first prime power >= N always works.
uint32_t minimal_admissible_q(uint32_t N, uint32_t T, uint32_t M);

// Closed-form sufficient bound for running at q = 2: with mu = min(t, n-t),
// returns 2 + min{e >= 0 : 2^(mu^e) >= N}, or nullopt when mu <= 1. This is
// the plain-mode bound; extension columns can admit q = 2 at smaller M.
std::optional<uint32_t> minimal_binary_m(uint32_t N, uint32_t T);

// The M-1 normalized block codes of a configuration. Built once and shared:
// results are cached per (N, T, q, level shape).
struct SchemeCodes {
  std::vector<std::shared_ptr<const ArrangedCode>> level;  // size M-1
};
SchemeCodes build_scheme_codes(const SchemeParams& prm);

// One downloaded symbol: a known linear combination of record symbols.
// `support` lists the records with nonzero coefficients. For sums tied to a
// level-k code, `col` is the global column of that code the coefficients
// follow; sums that introduce a fresh random-basis coordinate of the target
// record carry its index in `fresh`.
struct PlanSum {
  static constexpr uint32_t kNoFresh = 0xffffffffu;
  std::vector<uint8_t> support;  // ascending record ids, 1-based
  uint32_t group = 0;            // index into QueryPlan::groups
  uint32_t col = 0;              // code column (level groups only)
  uint32_t fresh = kNoFresh;
};

// All sums of one mixing group: the records it combines, where each record's
// coefficient block starts inside its scrambling matrix, and which
// (server, sum) positions hold its leading/fresh slots.
struct PlanGroup {
  uint32_t k = 0;                   // number of side-information records
  std::vector<uint8_t> side;        // ascending, empty for the direct group
  std::vector<uint32_t> range_begin;  // per side record, parallel to `side`
  // (server0, sum index) pairs; leading runs in information-set order.
  std::vector<std::pair<uint32_t, uint32_t>> leading;
  std::vector<std::pair<uint32_t, uint32_t>> fresh_slots;
};

// Deterministic layout of every sum each server must answer for target
// record theta. The per-server sum census (supports and counts) does not
// depend on theta, only the labeling does.
struct QueryPlan {
  uint32_t theta = 0;  // 1-based
  std::vector<std::vector<PlanSum>> server_sums;  // [server0][sum index]
  std::vector<PlanGroup> groups;                  // ascending (k, side)
};
QueryPlan build_query_plan(const SchemeCounts& c, uint32_t theta);

}  // namespace pir
