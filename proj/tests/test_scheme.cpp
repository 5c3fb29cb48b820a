#include <map>
#include <set>

#include "doctest.h"
#include "pir/scheme.hpp"

using namespace pir;

namespace {

uint64_t binom(uint32_t n, uint32_t k) {
  if (k > n) return 0;
  uint64_t r = 1;
  for (uint32_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

TEST_SUITE("scheme") {

TEST_CASE("capacity formula") {
  CHECK(capacity(5, 3, 3) == Rational(25, 49));
  CHECK(capacity(3, 2, 2) == Rational(3, 5));
  CHECK(capacity(4, 2, 3) == Rational(4, 7));
  CHECK(capacity(2, 1, 2) == Rational(2, 3));
  // M -> infinity limit is 1 - T/N from above; monotone decreasing in M.
  CHECK(capacity(4, 2, 2).value() > capacity(4, 2, 3).value());
  CHECK(capacity(4, 2, 3).value() > 0.5);
}

TEST_CASE("derived counts: five servers, three colluding, three records") {
  const SchemeCounts c = derive_counts(5, 3, 3);
  CHECK(c.d == 1);
  CHECK(c.n == 5);
  CHECK(c.t == 3);
  CHECK(c.ell == std::vector<uint64_t>{3, 2});
  CHECK(c.alpha == std::vector<uint64_t>{1, 2, 0});
  CHECK(c.beta == std::vector<uint64_t>{3, 0, 2});
  CHECK(c.L == 25);
  CHECK(c.D == 49);
  CHECK(c.rate == Rational(25, 49));
  CHECK(c.rate == c.cap);
  const uint64_t per_server[] = {9, 9, 9, 11, 11};
  for (uint32_t i = 1; i <= 5; ++i)
    CHECK(c.server_download(i) == per_server[i - 1]);
}

TEST_CASE("derived counts: frozen table") {
  struct Row {
    uint32_t N, T, M;
    std::vector<uint64_t> ell, alpha, beta;
    uint64_t L, D;
  };
  const Row rows[] = {
      {3, 2, 2, {1}, {1, 0}, {0, 1}, 3, 5},
      {4, 2, 3, {1, 1}, {0, 1, 0}, {1, 0, 1}, 8, 14},
      {5, 3, 4, {9, 6, 4}, {5, 4, 2, 2}, {6, 3, 3, 1}, 125, 272},
      {2, 1, 4, {1, 1, 1}, {0, 1, 0, 1}, {1, 0, 1, 0}, 8, 15},
      {6, 1, 4, {1, 5, 25}, {1, 0, 5, 20}, {0, 1, 4, 21}, 216, 259},
      {6, 5, 4, {25, 5, 1}, {21, 4, 1, 0}, {20, 5, 0, 1}, 216, 671},
  };
  for (const Row& r : rows) {
    CAPTURE(r.N);
    CAPTURE(r.T);
    CAPTURE(r.M);
    const SchemeCounts c = derive_counts(r.N, r.T, r.M);
    CHECK(c.ell == r.ell);
    CHECK(c.alpha == r.alpha);
    CHECK(c.beta == r.beta);
    CHECK(c.L == r.L);
    CHECK(c.D == r.D);
    CHECK(c.rate == c.cap);
  }
}

TEST_CASE("counts validation") {
  CHECK_THROWS_AS(derive_counts(3, 3, 2), invalid_argument);  // T = N
  CHECK_THROWS_AS(derive_counts(3, 0, 2), invalid_argument);
  CHECK_THROWS_AS(derive_counts(0, 0, 2), invalid_argument);
  CHECK_THROWS_AS(derive_counts(5, 3, 1), invalid_argument);  // M < 2
  // Desk-scale guard: record length blows past the cap.
  CHECK_THROWS_AS(derive_counts(6, 5, 12), invalid_argument);
}

TEST_CASE("download decomposes by mixing level") {
  for (const auto& [N, T, M] :
       std::vector<std::array<uint32_t, 3>>{{5, 3, 3}, {4, 2, 3}, {6, 4, 4}}) {
    const SchemeCounts c = derive_counts(N, T, M);
    uint64_t d = 0;
    for (uint32_t s = 1; s <= M; ++s)
      d += binom(M, s) * (uint64_t(T) * c.alpha[s - 1] +
                          uint64_t(N - T) * c.beta[s - 1]);
    CHECK(d == c.D);
    uint64_t per = 0;
    for (uint32_t i = 1; i <= N; ++i) per += c.server_download(i);
    CHECK(per == c.D);
  }
}

TEST_CASE("code choices at q = 2 for the flagship configuration") {
  const SchemeParams prm = derive_parameters(5, 3, 3, 2);
  REQUIRE(prm.choices.size() == 2);
  CHECK(prm.choices[0] == CodeChoice{3, 1, GrsMode::kPlain});
  CHECK(prm.choices[1] == CodeChoice{2, 1, GrsMode::kExtended});
}

TEST_CASE("choose_code picks the smallest workable extension") {
  CHECK(choose_code(5, 3, 3, 2) == CodeChoice{3, 1, GrsMode::kPlain});
  CHECK(choose_code(5, 3, 2, 2) == CodeChoice{2, 1, GrsMode::kExtended});
  CHECK_FALSE(choose_code(5, 3, 1, 2).has_value());
  CHECK(choose_code(3, 2, 1, 2) == CodeChoice{1, 1, GrsMode::kExtended});
  CHECK(choose_code(6, 1, 5, 2) == CodeChoice{5, 1, GrsMode::kPlain});
  // Span 1 forces a scalar code; the two-extension variant is invalid at
  // dimension 2, so GF(2) cannot host four thick columns.
  CHECK_FALSE(choose_code(4, 2, 1, 2).has_value());
  CHECK(choose_code(4, 2, 1, 3) == CodeChoice{1, 1, GrsMode::kExtended});
  // Interleaving kicks in when the smallest divisor already works.
  CHECK(choose_code(6, 1, 25, 4) == CodeChoice{1, 25, GrsMode::kDoublyExtended});
}

TEST_CASE("derive_parameters rejects inadmissible fields with context") {
  CHECK_THROWS_AS(derive_parameters(4, 2, 3, 2), invalid_argument);
  CHECK_THROWS_AS(derive_parameters(5, 3, 3, 6), invalid_argument);  // not a prime power
  const SchemeParams prm = derive_parameters(4, 2, 3, 3);
  CHECK(prm.choices == std::vector<CodeChoice>{{1, 1, GrsMode::kExtended},
                                               {1, 1, GrsMode::kExtended}});
}

TEST_CASE("minimal admissible field sizes") {
  CHECK(minimal_admissible_q(5, 3, 3) == 2);
  CHECK(minimal_admissible_q(5, 3, 4) == 2);
  CHECK(minimal_admissible_q(4, 2, 3) == 3);
  CHECK(minimal_admissible_q(6, 3, 2) == 4);
  CHECK(minimal_admissible_q(6, 3, 4) == 4);
  CHECK(minimal_admissible_q(6, 1, 4) == 4);
  CHECK(minimal_admissible_q(2, 1, 2) == 2);
}

TEST_CASE("binary sufficiency bound") {
  CHECK(minimal_binary_m(5, 3) == 4);
  CHECK(minimal_binary_m(7, 3) == 3);
  CHECK_FALSE(minimal_binary_m(4, 2).has_value());
  CHECK_FALSE(minimal_binary_m(2, 1).has_value());
  // The bound is sufficient, not necessary: extension columns admit q = 2
  // below it (M = 3 already works for five servers).
  CHECK(minimal_admissible_q(5, 3, 3) == 2);
}

TEST_CASE("scheme codes are normalized and verified") {
  const SchemeParams prm = derive_parameters(5, 3, 3, 2);
  const SchemeCodes codes = build_scheme_codes(prm);
  REQUIRE(codes.level.size() == 2);
  for (uint32_t k = 1; k <= 2; ++k) {
    const ArrangedCode& ac = *codes.level[k - 1];
    CHECK(ac.gen.prm.ell == prm.ell[k - 1]);
    CHECK(check_mds(ac.gen));
    for (uint32_t i = 1; i <= 5; ++i)
      CHECK(ac.quota[i - 1] == prm.gamma(i, k));
  }
  // Shared construction: the cache hands out one instance.
  const SchemeCodes again = build_scheme_codes(prm);
  CHECK(codes.level[0].get() == again.level[0].get());
}

TEST_CASE("query plans: census is independent of the target") {
  for (const auto& [N, T, M] :
       std::vector<std::array<uint32_t, 3>>{{5, 3, 3}, {4, 2, 3}, {3, 2, 2},
                                            {2, 1, 4}}) {
    CAPTURE(N);
    CAPTURE(T);
    CAPTURE(M);
    const SchemeCounts c = derive_counts(N, T, M);
    // support multiset per server, per theta
    std::vector<std::map<std::vector<uint8_t>, uint32_t>> reference(N);
    for (uint32_t theta = 1; theta <= M; ++theta) {
      const QueryPlan plan = build_query_plan(c, theta);
      REQUIRE(plan.server_sums.size() == N);
      for (uint32_t i0 = 0; i0 < N; ++i0) {
        CHECK(plan.server_sums[i0].size() == c.server_download(i0 + 1));
        std::map<std::vector<uint8_t>, uint32_t> census;
        for (const PlanSum& sum : plan.server_sums[i0])
          census[sum.support]++;
        if (theta == 1) {
          reference[i0] = census;
          // Every nonempty support of size s appears exactly gamma(i, s)
          // times.
          for (const auto& [supp, cnt] : census)
            CHECK(cnt == c.gamma(i0 + 1, uint32_t(supp.size())));
        } else {
          CHECK(census == reference[i0]);
        }
      }
    }
  }
}

TEST_CASE("query plans: group structure and slot accounting") {
  const SchemeCounts c = derive_counts(5, 3, 3);
  for (uint32_t theta = 1; theta <= 3; ++theta) {
    CAPTURE(theta);
    const QueryPlan plan = build_query_plan(c, theta);
    CHECK(plan.theta == theta);
    CHECK(plan.groups.size() == 4);  // subsets of the other two records
    CHECK(plan.groups[0].k == 0);
    CHECK(plan.groups[0].side.empty());

    // Fresh coordinates cover the record exactly once.
    std::set<uint32_t> fresh;
    for (const auto& sums : plan.server_sums)
      for (const PlanSum& s : sums)
        if (s.fresh != PlanSum::kNoFresh) {
          CHECK(fresh.insert(s.fresh).second);
          CHECK(s.fresh < c.L);
        }
    CHECK(fresh.size() == c.L);

    // Side-information ranges: disjoint inside each record, within bounds.
    std::map<uint8_t, std::vector<std::pair<uint64_t, uint64_t>>> spans;
    for (const PlanGroup& g : plan.groups) {
      if (g.k == 0) continue;
      CHECK(g.leading.size() ==
            uint64_t(c.T) * c.alpha[g.k - 1] +
                uint64_t(c.N - c.T) * c.beta[g.k - 1]);
      REQUIRE(g.range_begin.size() == g.side.size());
      for (size_t r = 0; r < g.side.size(); ++r) {
        const uint64_t len = uint64_t(c.T) * c.ell[g.k - 1];
        spans[g.side[r]].push_back(
            {g.range_begin[r], g.range_begin[r] + len});
        CHECK(g.range_begin[r] + len <= c.L);
      }
    }
    for (auto& [m, list] : spans) {
      CHECK(m != theta);
      std::sort(list.begin(), list.end());
      for (size_t i = 1; i < list.size(); ++i)
        CHECK(list[i - 1].second <= list[i].first);
    }
  }
}

TEST_CASE("query plans validate the target index") {
  const SchemeCounts c = derive_counts(3, 2, 2);
  CHECK_THROWS_AS(build_query_plan(c, 0), invalid_argument);
  CHECK_THROWS_AS(build_query_plan(c, 3), invalid_argument);
}

}  // TEST_SUITE
