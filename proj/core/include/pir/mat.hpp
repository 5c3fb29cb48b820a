#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pir/field.hpp"

namespace pir {

// Dense row-major matrix over a finite field. Vectors are row vectors;
// v * A is the basic product used throughout.
class Mat {
 public:
  Mat() = default;
  Mat(FieldPtr f, uint32_t rows, uint32_t cols)
      : f_(std::move(f)), nr_(rows), nc_(cols), a_(size_t(rows) * cols, 0) {}

  static Mat identity(FieldPtr f, uint32_t n);

  const FieldPtr& field() const { return f_; }
  uint32_t rows() const { return nr_; }
  uint32_t cols() const { return nc_; }

  uint32_t& at(uint32_t r, uint32_t c) { return a_[size_t(r) * nc_ + c]; }
  uint32_t at(uint32_t r, uint32_t c) const { return a_[size_t(r) * nc_ + c]; }
  std::span<const uint32_t> row(uint32_t r) const {
    return {a_.data() + size_t(r) * nc_, nc_};
  }
  std::span<uint32_t> row(uint32_t r) {
    return {a_.data() + size_t(r) * nc_, nc_};
  }

  Mat operator*(const Mat& rhs) const;
  Mat operator+(const Mat& rhs) const;
  Mat transpose() const;

  // Copies `src` into this matrix with its top-left corner at (r0, c0).
  void paste(uint32_t r0, uint32_t c0, const Mat& src);

  // Column / row selections, in the order given by `idx`.
  Mat select_cols(std::span<const uint32_t> idx) const;
  Mat select_rows(std::span<const uint32_t> idx) const;

  std::vector<uint32_t> col(uint32_t c) const;

  friend bool operator==(const Mat&, const Mat&);

 private:
  FieldPtr f_;
  uint32_t nr_ = 0, nc_ = 0;
  std::vector<uint32_t> a_;
};

// row vector v (length A.rows()) times A -> length A.cols().
std::vector<uint32_t> mul_row_vec(std::span<const uint32_t> v, const Mat& A);
// A times column vector v (length A.cols()) -> length A.rows().
std::vector<uint32_t> mul_mat_col(const Mat& A, std::span<const uint32_t> v);

uint32_t rank(Mat A);  // by value: elimination destroys the copy

// Reduced row echelon form with pivot bookkeeping.
struct Echelon {
  Mat mat;
  std::vector<uint32_t> pivot_cols;  // ascending
};
Echelon rref(Mat A);

enum class SolveStatus { kOk, kNoSolution, kNotUnique };
struct SolveResult {
  SolveStatus status = SolveStatus::kNoSolution;
  std::vector<uint32_t> x;  // set iff status == kOk
};
// Solves A x = b (b column vector, length A.rows()). A unique solution is
// required for kOk; underdetermined consistent systems report kNotUnique.
SolveResult solve(const Mat& A, std::span<const uint32_t> b);

std::optional<Mat> inverse(const Mat& A);

// Uniform over GL(n, q) by rejection: fill all n^2 entries uniformly
// (row-major draw order), retry until invertible.
Mat sample_invertible(FieldPtr f, uint32_t n, Rng& rng);

// P with P[i][perm[i]] = 1: as a row-vector map, (v * P)[perm[i]] = v[i],
// i.e. perm gives the destination of each source position.
Mat permutation_matrix(FieldPtr f, std::span<const uint32_t> perm);

// Companion matrix of a monic polynomial c_0 + c_1 x + ... + x^n: ones on
// the subdiagonal, last column (-c_0, ..., -c_{n-1}).
Mat companion_matrix(FieldPtr f, std::span<const uint32_t> monic);

// Matrix representation of a top-field element over the base field:
// sum_i u_i C^i with u the base coordinates of `a` and C the companion
// matrix of the top generator's minimal polynomial. Column j holds the base
// coordinates of a * alpha^j, so the map is a ring homomorphism
// (images multiply like the elements themselves).
Mat matrix_rep(const Tower& tw, uint32_t a);

}  // namespace pir
