#include <vector>

#include "doctest.h"
#include "pir/mat.hpp"

using namespace pir;

namespace {

Mat from_rows(FieldPtr f, const std::vector<std::vector<uint32_t>>& rows) {
  Mat m(f, uint32_t(rows.size()), uint32_t(rows[0].size()));
  for (uint32_t r = 0; r < m.rows(); ++r)
    for (uint32_t c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

Mat random_mat(FieldPtr f, uint32_t r, uint32_t c, Rng& rng) {
  Mat m(f, r, c);
  for (uint32_t i = 0; i < r; ++i)
    for (uint32_t j = 0; j < c; ++j) m.at(i, j) = uint32_t(rng.below(f->q()));
  return m;
}

}  // namespace

TEST_SUITE("mat") {

TEST_CASE("multiplication fundamentals") {
  const auto f = Field::make(5);
  Rng rng(3);
  for (int it = 0; it < 20; ++it) {
    const Mat a = random_mat(f, 3, 4, rng);
    const Mat b = random_mat(f, 4, 2, rng);
    const Mat c = random_mat(f, 2, 5, rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(Mat::identity(f, 3) * a == a);
    CHECK(a * Mat::identity(f, 4) == a);
  }
  CHECK_THROWS_AS(random_mat(f, 2, 3, rng) * random_mat(f, 2, 3, rng),
                  invalid_argument);
}

TEST_CASE("addition and transpose") {
  const auto f = Field::make(3);
  Rng rng(9);
  const Mat a = random_mat(f, 4, 6, rng);
  const Mat b = random_mat(f, 4, 6, rng);
  CHECK(a + b == b + a);
  CHECK(a.transpose().transpose() == a);
  CHECK((a + b).transpose() == a.transpose() + b.transpose());
}

TEST_CASE("rank and rref") {
  const auto f = Field::make(2);
  const Mat m = from_rows(f, {{1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
  CHECK(rank(m) == 2);  // row3 = row1 + row2
  const Echelon e = rref(m);
  CHECK(e.pivot_cols == std::vector<uint32_t>{0, 1});
  // rref is idempotent.
  CHECK(rref(e.mat).mat == e.mat);
  CHECK(rank(Mat::identity(f, 5)) == 5);
  CHECK(rank(Mat(f, 3, 3)) == 0);
}

TEST_CASE("solve: unique, none, many") {
  const auto f = Field::make(7);
  const Mat a = from_rows(f, {{1, 2}, {3, 4}});
  // x = (1, 5): b = (1*1+2*5, 3*1+4*5) = (11, 23) = (4, 2) mod 7.
  const auto r = solve(a, std::vector<uint32_t>{4, 2});
  REQUIRE(r.status == SolveStatus::kOk);
  CHECK(r.x == std::vector<uint32_t>{1, 5});

  const Mat sing = from_rows(f, {{1, 2}, {2, 4}});
  CHECK(solve(sing, std::vector<uint32_t>{1, 3}).status ==
        SolveStatus::kNoSolution);
  CHECK(solve(sing, std::vector<uint32_t>{1, 2}).status ==
        SolveStatus::kNotUnique);
}

TEST_CASE("inverse") {
  const auto f = Field::make(4);
  Rng rng(11);
  for (int it = 0; it < 25; ++it) {
    const Mat a = sample_invertible(f, 4, rng);
    const auto inv = inverse(a);
    REQUIRE(inv.has_value());
    CHECK(a * *inv == Mat::identity(f, 4));
    CHECK(*inv * a == Mat::identity(f, 4));
  }
  const Mat sing = from_rows(f, {{1, 1}, {1, 1}});
  CHECK_FALSE(inverse(sing).has_value());
}

TEST_CASE("sample_invertible is deterministic per seed") {
  const auto f = Field::make(2);
  Rng a(5), b(5);
  CHECK(sample_invertible(f, 6, a) == sample_invertible(f, 6, b));
  Rng c(6);
  for (int it = 0; it < 50; ++it)
    CHECK(rank(sample_invertible(f, 4, c)) == 4);
}

TEST_CASE("row and column products agree with full multiplication") {
  const auto f = Field::make(9);
  Rng rng(2);
  const Mat a = random_mat(f, 3, 5, rng);
  std::vector<uint32_t> v{1, 4, 7};
  Mat vm(f, 1, 3);
  for (uint32_t j = 0; j < 3; ++j) vm.at(0, j) = v[j];
  const Mat ref = vm * a;
  const auto got = mul_row_vec(v, a);
  for (uint32_t j = 0; j < 5; ++j) CHECK(got[j] == ref.at(0, j));

  std::vector<uint32_t> w{2, 0, 3, 8, 1};
  const auto col = mul_mat_col(a, w);
  Mat wm(f, 5, 1);
  for (uint32_t i = 0; i < 5; ++i) wm.at(i, 0) = w[i];
  const Mat ref2 = a * wm;
  for (uint32_t i = 0; i < 3; ++i) CHECK(col[i] == ref2.at(i, 0));
}

TEST_CASE("permutation matrices route sources to destinations") {
  const auto f = Field::make(5);
  // 0 -> 1, 1 -> 2, 2 -> 0
  const std::vector<uint32_t> perm{1, 2, 0};
  const Mat p = permutation_matrix(f, perm);
  const auto moved = mul_row_vec(std::vector<uint32_t>{3, 4, 2}, p);
  CHECK(moved == std::vector<uint32_t>{2, 3, 4});
  // Permutation matrices are orthogonal: P * P^T = I.
  CHECK(p * p.transpose() == Mat::identity(f, 3));
}

TEST_CASE("companion matrix layout") {
  const auto f2 = Field::make(2);
  const Mat c1 = companion_matrix(f2, std::vector<uint32_t>{1, 1, 1});
  CHECK(c1 == from_rows(f2, {{0, 1}, {1, 1}}));
  const Mat c2 = companion_matrix(f2, std::vector<uint32_t>{1, 1, 0, 1});
  CHECK(c2 == from_rows(f2, {{0, 0, 1}, {1, 0, 1}, {0, 1, 0}}));
  // Over GF(3), negation matters: x^2 + 1 -> last column (-1, 0) = (2, 0).
  const auto f3 = Field::make(3);
  const Mat c3 = companion_matrix(f3, std::vector<uint32_t>{1, 0, 1});
  CHECK(c3 == from_rows(f3, {{0, 2}, {1, 0}}));
}

TEST_CASE("companion matrix satisfies its polynomial") {
  const auto f = Field::make(2);
  const std::vector<uint32_t> poly{1, 1, 0, 1};  // x^3 + x + 1
  const Mat c = companion_matrix(f, poly);
  // c^3 + c + I = 0
  const Mat acc = c * c * c + c + Mat::identity(f, 3);
  CHECK(acc == Mat(f, 3, 3));
}

TEST_CASE("select and paste round trip") {
  const auto f = Field::make(7);
  Rng rng(4);
  const Mat a = random_mat(f, 4, 6, rng);
  const std::vector<uint32_t> idx{5, 0, 3};
  const Mat sel = a.select_cols(idx);
  CHECK(sel.rows() == 4);
  CHECK(sel.cols() == 3);
  for (uint32_t r = 0; r < 4; ++r)
    for (uint32_t j = 0; j < 3; ++j) CHECK(sel.at(r, j) == a.at(r, idx[j]));

  Mat big(f, 6, 8);
  big.paste(1, 2, a);
  for (uint32_t r = 0; r < 4; ++r)
    for (uint32_t c = 0; c < 6; ++c) CHECK(big.at(r + 1, c + 2) == a.at(r, c));
  CHECK(big.at(0, 0) == 0);
}

}  // TEST_SUITE
