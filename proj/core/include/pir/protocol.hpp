#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pir/scheme.hpp"

namespace pir {

// The database: M records, each L symbols over F_q.
struct Records {
  uint32_t q = 0;
  uint64_t L = 0;
  std::vector<std::vector<uint32_t>> w;  // [record m-1][symbol]

  void validate() const;
};

Records random_records(uint32_t q, uint64_t L, uint32_t M, Rng& rng);

// Per-record scrambling matrices, the client's private randomness: one
// uniformly random invertible L x L matrix per record, drawn record-major.
struct Secrets {
  std::vector<Mat> s;  // size M
};
Secrets sample_secrets(const SchemeParams& prm, Rng& rng);

// What one server receives: its sums in plan order, each a full M*L
// coefficient block (record-major), so the message reveals nothing about
// which record the client wants beyond the coefficients themselves.
struct QueryMsg {
  uint32_t server = 0;  // 1-based
  std::vector<std::vector<uint32_t>> sums;
};

std::vector<QueryMsg> generate_queries(const SchemeParams& prm,
                                       const SchemeCodes& codes,
                                       const QueryPlan& plan,
                                       const Secrets& secrets);

// The server side: evaluate each requested combination against the records.
std::vector<uint32_t> answer_query(const SchemeParams& prm,
                                   const Records& records,
                                   const QueryMsg& query);

// Client-side decoding from all N answer vectors (indexed by server - 1).
std::vector<uint32_t> reconstruct(const SchemeParams& prm,
                                  const SchemeCodes& codes,
                                  const QueryPlan& plan, const Secrets& secrets,
                                  const std::vector<std::vector<uint32_t>>& answers);

}  // namespace pir
