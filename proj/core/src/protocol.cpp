#include "pir/protocol.hpp"

namespace pir {

void Records::validate() const {
  if (!is_prime_power(q))
    throw invalid_argument("Records: q must be a prime power");
  if (L == 0 || w.empty())
    throw invalid_argument("Records: empty or missing parameters");
  for (const auto& rec : w) {
    if (rec.size() != L) throw invalid_argument("Records: length mismatch");
    for (uint32_t v : rec)
      if (v >= q) throw invalid_argument("Records: symbol out of range");
  }
}

Records random_records(uint32_t q, uint64_t L, uint32_t M, Rng& rng) {
  Records r;
  r.q = q;
  r.L = L;
  r.w.resize(M);
  for (auto& rec : r.w) {
    rec.resize(L);
    for (auto& v : rec) v = uint32_t(rng.below(q));
  }
  return r;
}

Secrets sample_secrets(const SchemeParams& prm, Rng& rng) {
  Secrets s;
  const auto f = Field::make(prm.q);
  s.s.reserve(prm.M);
  for (uint32_t m = 0; m < prm.M; ++m)
    s.s.push_back(sample_invertible(f, uint32_t(prm.L), rng));
  return s;
}

std::vector<QueryMsg> generate_queries(const SchemeParams& prm,
                                       const SchemeCodes& codes,
                                       const QueryPlan& plan,
                                       const Secrets& secrets) {
  const Field& F = *Field::make(prm.q);
  const uint32_t L = uint32_t(prm.L);
  const uint32_t theta = plan.theta;
  std::vector<QueryMsg> out(prm.N);
  for (uint32_t i0 = 0; i0 < prm.N; ++i0) {
    auto& msg = out[i0];
    msg.server = i0 + 1;
    msg.sums.reserve(plan.server_sums[i0].size());
    for (const auto& sum : plan.server_sums[i0]) {
      std::vector<uint32_t> block(size_t(prm.M) * L, 0);
      const auto& g = plan.groups[sum.group];
      if (g.k > 0) {
        const auto& code = *codes.level[g.k - 1];
        const auto colv = code.gen.g.col(sum.col);
        for (size_t pos = 0; pos < g.side.size(); ++pos) {
          const uint32_t m = g.side[pos];
          const Mat& S = secrets.s[m - 1];
          const uint32_t begin = g.range_begin[pos];
          uint32_t* seg = block.data() + size_t(m - 1) * L;
          for (uint32_t r = 0; r < colv.size(); ++r) {
            const uint32_t cf = colv[r];
            if (!cf) continue;
            for (uint32_t row = 0; row < L; ++row) {
              const uint32_t v = S.at(row, begin + r);
              if (v) seg[row] = F.add(seg[row], F.mul(cf, v));
            }
          }
        }
      }
      if (sum.fresh != PlanSum::kNoFresh) {
        const Mat& S = secrets.s[theta - 1];
        uint32_t* seg = block.data() + size_t(theta - 1) * L;
        for (uint32_t row = 0; row < L; ++row)
          seg[row] = F.add(seg[row], S.at(row, sum.fresh));
      }
      msg.sums.push_back(std::move(block));
    }
  }
  return out;
}

std::vector<uint32_t> answer_query(const SchemeParams& prm,
                                   const Records& records,
                                   const QueryMsg& query) {
  if (records.q != prm.q || records.L != prm.L || records.w.size() != prm.M)
    throw invalid_argument("answer_query: records do not match parameters");
  const Field& F = *Field::make(prm.q);
  const uint32_t L = uint32_t(prm.L);
  std::vector<uint32_t> out;
  out.reserve(query.sums.size());
  for (const auto& block : query.sums) {
    if (block.size() != size_t(prm.M) * L)
      throw invalid_argument("answer_query: coefficient block size");
    uint32_t acc = 0;
    for (uint32_t m = 0; m < prm.M; ++m) {
      const uint32_t* seg = block.data() + size_t(m) * L;
      const auto& rec = records.w[m];
      for (uint32_t row = 0; row < L; ++row)
        if (seg[row] && rec[row]) acc = F.add(acc, F.mul(seg[row], rec[row]));
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<uint32_t> reconstruct(
    const SchemeParams& prm, const SchemeCodes& codes, const QueryPlan& plan,
    const Secrets& secrets, const std::vector<std::vector<uint32_t>>& answers) {
  if (answers.size() != prm.N)
    throw invalid_argument("reconstruct: need one answer vector per server");
  for (uint32_t i0 = 0; i0 < prm.N; ++i0)
    if (answers[i0].size() != plan.server_sums[i0].size())
      throw invalid_argument("reconstruct: answer count mismatch");
  const Field& F = *Field::make(prm.q);
  std::vector<uint32_t> y(prm.L, 0);
  for (const auto& g : plan.groups) {
    if (g.k == 0) {
      for (const auto& [i0, si] : g.fresh_slots)
        y[plan.server_sums[i0][si].fresh] = answers[i0][si];
      continue;
    }
    const auto& code = *codes.level[g.k - 1];
    std::vector<uint32_t> leading;
    leading.reserve(g.leading.size());
    for (const auto& [i0, si] : g.leading) leading.push_back(answers[i0][si]);
    const auto cw = recover_full_codeword(code, leading);
    for (const auto& [i0, si] : g.fresh_slots) {
      const auto& sum = plan.server_sums[i0][si];
      y[sum.fresh] = F.sub(answers[i0][si], cw[sum.col]);
    }
  }
  const auto inv = inverse(secrets.s[plan.theta - 1]);
  if (!inv) throw integrity_error("reconstruct: scrambling matrix not invertible");
  return mul_row_vec(y, *inv);
}

}  // namespace pir
