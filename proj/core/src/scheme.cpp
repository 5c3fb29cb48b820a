#include "pir/scheme.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace pir {
namespace {

uint64_t checked_pow(uint64_t b, uint32_t e, uint64_t cap) {
  uint64_t r = 1;
  while (e--) {
    if (b != 0 && r > cap / b)
      throw invalid_argument("parameter magnitude out of range");
    r *= b;
  }
  return r;
}

uint64_t binom(uint32_t n, uint32_t k) {
  if (k > n) return 0;
  uint64_t r = 1;
  for (uint32_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

constexpr uint64_t kCountCap = uint64_t(1) << 40;

}  // namespace

uint64_t SchemeCounts::server_download(uint32_t i) const {
  uint64_t total = 0;
  for (uint32_t s = 1; s <= M; ++s) total += binom(M, s) * gamma(i, s);
  return total;
}

Rational capacity(uint32_t N, uint32_t T, uint32_t M) {
  if (T < 1 || N <= T || M < 1)
    throw invalid_argument("capacity: need N > T >= 1, M >= 1");
  const uint64_t nm1 = checked_pow(N, M - 1, kCountCap);
  const uint64_t nm = checked_pow(N, M, kCountCap);
  const uint64_t tm = checked_pow(T, M, kCountCap);
  return Rational(int64_t(nm1 * (N - T)), int64_t(nm - tm));
}

SchemeCounts derive_counts(uint32_t N, uint32_t T, uint32_t M) {
  if (T < 1 || N <= T || M < 2)
    throw invalid_argument("derive_counts: need N > T >= 1, M >= 2");
  SchemeCounts c;
  c.N = N;
  c.T = T;
  c.M = M;
  c.d = std::gcd(N, T);
  c.n = N / c.d;
  c.t = T / c.d;
  const uint64_t nt = c.n - c.t;

  c.ell.resize(M - 1);
  for (uint32_t k = 1; k <= M - 1; ++k) {
    c.ell[k - 1] = checked_pow(nt, k - 1, kCountCap) *
                   checked_pow(c.t, M - 1 - k, kCountCap);
    if (c.ell[k - 1] > 4096)
      throw invalid_argument(
          "derive_counts: code span exceeds the desk-scale limit (4096)");
  }

  // Feasibility scan: smallest leading split whose whole chain consists of
  // nonnegative integers. Chain: alpha_{k+1} = ell_k - alpha_k,
  // beta_k = t * alpha_{k+1} / (n - t), beta_M = ell_{M-1} - beta_{M-1}.
  bool found = false;
  for (uint64_t a1 = 0; a1 <= c.ell[0] && !found; ++a1) {
    std::vector<uint64_t> alpha(M, 0), beta(M, 0);
    alpha[0] = a1;
    bool ok = true;
    for (uint32_t k = 1; k < M; ++k) {
      if (alpha[k - 1] > c.ell[k - 1]) { ok = false; break; }
      alpha[k] = c.ell[k - 1] - alpha[k - 1];
    }
    if (!ok) continue;
    for (uint32_t k = 1; k <= M - 1 && ok; ++k) {
      const uint64_t num = c.t * alpha[k];
      if (num % nt != 0) { ok = false; break; }
      beta[k - 1] = num / nt;
    }
    if (!ok) continue;
    if (beta[M - 2] > c.ell[M - 2]) continue;
    beta[M - 1] = c.ell[M - 2] - beta[M - 2];
    for (uint32_t k = 0; k + 1 < M; ++k)
      if (beta[k] > c.ell[k]) { ok = false; break; }
    if (!ok) continue;
    c.alpha = std::move(alpha);
    c.beta = std::move(beta);
    found = true;
  }
  if (!found)
    throw invalid_argument("derive_counts: no feasible slot split for (N,T,M)");

  c.L = uint64_t(N) * checked_pow(c.n, M - 2, kCountCap);
  if (c.L > (uint64_t(1) << 20))
    throw invalid_argument(
        "derive_counts: record length exceeds the desk-scale limit (2^20)");
  c.D = 0;
  for (uint32_t s = 1; s <= M; ++s)
    c.D += binom(M, s) *
           (uint64_t(T) * c.alpha[s - 1] + uint64_t(N - T) * c.beta[s - 1]);
  c.rate = Rational(int64_t(c.L), int64_t(c.D));
  c.cap = capacity(N, T, M);
  if (!(c.rate == c.cap))
    throw integrity_error("derive_counts: rate does not meet the ceiling");
  return c;
}

std::optional<CodeChoice> choose_code(uint32_t N, uint32_t T, uint64_t ell,
                                      uint32_t q) {
  if (ell < 1 || T < 1 || N < T) throw invalid_argument("choose_code: shape");
  static std::mutex mu;
  static std::map<std::array<uint64_t, 4>, std::optional<CodeChoice>> cache;
  const std::array<uint64_t, 4> key{N, T, ell, q};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  std::optional<CodeChoice> result;
  for (uint32_t sub = 1; sub <= ell && !result; ++sub) {
    if (ell % sub != 0) continue;
    uint64_t order = 1;
    bool over = false;
    for (uint32_t i = 0; i < sub; ++i) {
      order *= q;
      if (order > Field::kMaxOrder) { over = true; break; }
    }
    if (over) break;  // larger sub-lengths only grow the symbol field
    for (GrsMode mode : {GrsMode::kPlain, GrsMode::kExtended,
                         GrsMode::kDoublyExtended}) {
      const uint64_t bound =
          order + (mode == GrsMode::kPlain ? 0
                                           : mode == GrsMode::kExtended ? 1 : 2);
      if (N > bound) continue;
      const auto tower = Tower::make(Field::make(q), sub);
      const auto code =
          expand_to_array_code(tower, grs_generator(tower.top(), N, T, mode));
      if (!check_mds(code)) continue;
      result = CodeChoice{sub, uint32_t(ell / sub), mode};
      break;
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, result);
  return result;
}

SchemeParams derive_parameters(uint32_t N, uint32_t T, uint32_t M,
                               uint32_t q) {
  if (!is_prime_power(q))
    throw invalid_argument("derive_parameters: q must be a prime power");
  SchemeParams prm;
  static_cast<SchemeCounts&>(prm) = derive_counts(N, T, M);
  prm.q = q;
  prm.choices.resize(M - 1);
  for (uint32_t k = 1; k <= M - 1; ++k) {
    auto ch = choose_code(N, T, prm.ell[k - 1], q);
    if (!ch)
      throw invalid_argument(
          "derive_parameters: q=" + std::to_string(q) +
          " admits no verified code of span " + std::to_string(prm.ell[k - 1]) +
          " for N=" + std::to_string(N) + ", T=" + std::to_string(T) +
          " (a larger field is required)");
    prm.choices[k - 1] = *ch;
  }
  return prm;
}

uint32_t minimal_admissible_q(uint32_t N, uint32_t T, uint32_t M) {
  const auto counts = derive_counts(N, T, M);  // surfaces shape errors early
  for (uint32_t q = 2;; ++q) {
    if (!is_prime_power(q)) continue;
    bool ok = true;
    for (uint32_t k = 1; k <= M - 1 && ok; ++k)
      ok = choose_code(N, T, counts.ell[k - 1], q).has_value();
    if (ok) return q;
    if (q > N + 2)
      throw integrity_error("minimal_admissible_q: search ran past N");
  }
}

std::optional<uint32_t> minimal_binary_m(uint32_t N, uint32_t T) {
  if (T < 1 || N <= T) throw invalid_argument("minimal_binary_m: shape");
  const uint32_t d = std::gcd(N, T), n = N / d, t = T / d;
  const uint64_t mu = std::min<uint64_t>(t, n - t);
  if (mu <= 1) return std::nullopt;
  for (uint32_t e = 0;; ++e) {
    uint64_t width = 1;  // mu^e, saturating well past any practical N
    for (uint32_t i = 0; i < e && width < 64; ++i) width *= mu;
    if (width >= 64 || (uint64_t(1) << width) >= N) return 2 + e;
  }
}

SchemeCodes build_scheme_codes(const SchemeParams& prm) {
  static std::mutex mu;
  static std::map<std::array<uint64_t, 6>,
                  std::shared_ptr<const ArrangedCode>>
      cache;
  SchemeCodes out;
  out.level.resize(prm.M - 1);
  for (uint32_t k = 1; k <= prm.M - 1; ++k) {
    const uint64_t ell = prm.ell[k - 1];
    const uint64_t a = prm.alpha[k - 1], b = prm.beta[k - 1];
    const std::array<uint64_t, 6> key{prm.N, prm.T, prm.q, ell, a, b};
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cache.find(key);
      if (it != cache.end()) {
        out.level[k - 1] = it->second;
        continue;
      }
    }
    const auto& ch = prm.choices[k - 1];
    const auto tower = Tower::make(Field::make(prm.q), ch.sub_ell);
    auto code = expand_to_array_code(
        tower, grs_generator(tower.top(), prm.N, prm.T, ch.mode));
    if (ch.copies > 1) code = interleave(code, ch.copies);
    if (code.prm.ell != ell)
      throw integrity_error("build_scheme_codes: span mismatch");
    if (!check_mds(code))
      throw integrity_error("build_scheme_codes: constructed code fails MDS");
    std::vector<uint32_t> quota(prm.N);
    for (uint32_t i = 0; i < prm.N; ++i)
      quota[i] = uint32_t(i < prm.T ? a : b);
    auto arranged = std::make_shared<const ArrangedCode>(
        normalize_with_quota(code, quota));
    std::lock_guard<std::mutex> lock(mu);
    auto [it, _] = cache.emplace(key, std::move(arranged));
    out.level[k - 1] = it->second;
  }
  return out;
}

QueryPlan build_query_plan(const SchemeCounts& c, uint32_t theta) {
  if (theta < 1 || theta > c.M)
    throw invalid_argument("build_query_plan: theta out of range");
  QueryPlan plan;
  plan.theta = theta;

  // Mixing groups: subsets of the other records, ascending (size, lex).
  std::vector<uint8_t> others;
  for (uint8_t m = 1; m <= c.M; ++m)
    if (m != theta) others.push_back(m);
  std::map<std::vector<uint8_t>, uint32_t> group_of;
  for (uint32_t k = 0; k <= c.M - 1; ++k) {
    if (k == 0) {
      PlanGroup g;
      g.k = 0;
      group_of[{}] = uint32_t(plan.groups.size());
      plan.groups.push_back(std::move(g));
      continue;
    }
    std::vector<uint32_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      PlanGroup g;
      g.k = k;
      for (uint32_t i : idx) g.side.push_back(others[i]);
      g.range_begin.assign(k, 0);
      group_of[g.side] = uint32_t(plan.groups.size());
      plan.groups.push_back(std::move(g));
      uint32_t i = k;
      while (i > 0 && idx[i - 1] == others.size() - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (uint32_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  // Column ranges: each non-target record hands disjoint column blocks of
  // its scrambling matrix to the groups that mix it, in group order.
  for (uint8_t m = 1; m <= c.M; ++m) {
    if (m == theta) continue;
    uint64_t cursor = 0;
    for (auto& g : plan.groups) {
      const auto it = std::find(g.side.begin(), g.side.end(), m);
      if (it == g.side.end()) continue;
      g.range_begin[size_t(it - g.side.begin())] = uint32_t(cursor);
      cursor += uint64_t(c.T) * c.ell[g.k - 1];
    }
    if (cursor > c.L)
      throw integrity_error("build_query_plan: column ranges exceed L");
  }

  // Per-server sums in canonical order: supports ascending by (size, lex),
  // then by in-code position.
  plan.server_sums.assign(c.N, {});
  for (uint32_t i0 = 0; i0 < c.N; ++i0) {
    const uint32_t i = i0 + 1;
    auto& sums = plan.server_sums[i0];
    for (uint32_t s = 1; s <= c.M; ++s) {
      std::vector<uint32_t> idx(s);
      std::iota(idx.begin(), idx.end(), 0);
      for (;;) {
        std::vector<uint8_t> lam(s);
        for (uint32_t j = 0; j < s; ++j) lam[j] = uint8_t(idx[j] + 1);
        const uint64_t cnt = c.gamma(i, s);
        const bool has_theta =
            std::find(lam.begin(), lam.end(), uint8_t(theta)) != lam.end();
        for (uint64_t j = 0; j < cnt; ++j) {
          PlanSum sum;
          sum.support = lam;
          if (!has_theta) {
            // leading slot of the level-s group mixing exactly lam
            sum.group = group_of.at(lam);
            sum.col = uint32_t(i0 * c.ell[s - 1] + j);
            plan.groups[sum.group].leading.emplace_back(i0,
                                                        uint32_t(sums.size()));
          } else if (s == 1) {
            sum.group = group_of.at({});
            plan.groups[sum.group].fresh_slots.emplace_back(
                i0, uint32_t(sums.size()));
          } else {
            std::vector<uint8_t> side;
            for (uint8_t m : lam)
              if (m != theta) side.push_back(m);
            sum.group = group_of.at(side);
            const uint32_t k = s - 1;
            sum.col = uint32_t(i0 * c.ell[k - 1] + c.gamma(i, k) + j);
            plan.groups[sum.group].fresh_slots.emplace_back(
                i0, uint32_t(sums.size()));
          }
          sums.push_back(std::move(sum));
        }
        uint32_t b = s;
        while (b > 0 && idx[b - 1] == c.M - s + (b - 1)) --b;
        if (b == 0) break;
        ++idx[b - 1];
        for (uint32_t j = b; j < s; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }

  // Fresh coordinate assignment: groups in canonical order, slots in
  // (server, position) order as recorded.
  uint64_t fresh = 0;
  for (auto& g : plan.groups)
    for (const auto& [i0, si] : g.fresh_slots)
      plan.server_sums[i0][si].fresh = uint32_t(fresh++);
  if (fresh != c.L)
    throw integrity_error("build_query_plan: fresh coordinate count != L");
  return plan;
}

}  // namespace pir
