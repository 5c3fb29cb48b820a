#include "pir/mat.hpp"

#include <algorithm>

namespace pir {

Mat Mat::identity(FieldPtr f, uint32_t n) {
  Mat m(std::move(f), n, n);
  for (uint32_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Mat Mat::operator+(const Mat& rhs) const {
  if (!f_ || f_ != rhs.f_ || nr_ != rhs.nr_ || nc_ != rhs.nc_)
    throw invalid_argument("Mat::operator+: shape/field mismatch");
  Mat out(f_, nr_, nc_);
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = f_->add(a_[i], rhs.a_[i]);
  return out;
}

Mat Mat::operator*(const Mat& rhs) const {
  if (!f_ || f_ != rhs.f_ || nc_ != rhs.nr_)
    throw invalid_argument("Mat::operator*: shape/field mismatch");
  const Field& F = *f_;
  Mat out(f_, nr_, rhs.nc_);
  for (uint32_t i = 0; i < nr_; ++i) {
    for (uint32_t k = 0; k < nc_; ++k) {
      const uint32_t v = at(i, k);
      if (!v) continue;
      const auto r = rhs.row(k);
      auto o = out.row(i);
      for (uint32_t j = 0; j < rhs.nc_; ++j)
        if (r[j]) o[j] = F.add(o[j], F.mul(v, r[j]));
    }
  }
  return out;
}

Mat Mat::transpose() const {
  Mat out(f_, nc_, nr_);
  for (uint32_t i = 0; i < nr_; ++i)
    for (uint32_t j = 0; j < nc_; ++j) out.at(j, i) = at(i, j);
  return out;
}

void Mat::paste(uint32_t r0, uint32_t c0, const Mat& src) {
  if (r0 + src.nr_ > nr_ || c0 + src.nc_ > nc_)
    throw invalid_argument("Mat::paste: out of bounds");
  for (uint32_t i = 0; i < src.nr_; ++i)
    for (uint32_t j = 0; j < src.nc_; ++j) at(r0 + i, c0 + j) = src.at(i, j);
}

Mat Mat::select_cols(std::span<const uint32_t> idx) const {
  Mat out(f_, nr_, uint32_t(idx.size()));
  for (uint32_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= nc_) throw invalid_argument("Mat::select_cols: out of range");
    for (uint32_t i = 0; i < nr_; ++i) out.at(i, j) = at(i, idx[j]);
  }
  return out;
}

Mat Mat::select_rows(std::span<const uint32_t> idx) const {
  Mat out(f_, uint32_t(idx.size()), nc_);
  for (uint32_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= nr_) throw invalid_argument("Mat::select_rows: out of range");
    std::copy_n(row(idx[i]).data(), nc_, out.row(i).data());
  }
  return out;
}

std::vector<uint32_t> Mat::col(uint32_t c) const {
  std::vector<uint32_t> v(nr_);
  for (uint32_t i = 0; i < nr_; ++i) v[i] = at(i, c);
  return v;
}

bool operator==(const Mat& a, const Mat& b) {
  return a.nr_ == b.nr_ && a.nc_ == b.nc_ && a.a_ == b.a_ &&
         (!a.f_ || !b.f_ || a.f_->q() == b.f_->q());
}

std::vector<uint32_t> mul_row_vec(std::span<const uint32_t> v, const Mat& A) {
  if (v.size() != A.rows()) throw invalid_argument("mul_row_vec: size");
  const Field& F = *A.field();
  std::vector<uint32_t> out(A.cols(), 0);
  for (uint32_t i = 0; i < A.rows(); ++i) {
    const uint32_t s = v[i];
    if (!s) continue;
    const auto r = A.row(i);
    for (uint32_t j = 0; j < A.cols(); ++j)
      if (r[j]) out[j] = F.add(out[j], F.mul(s, r[j]));
  }
  return out;
}

std::vector<uint32_t> mul_mat_col(const Mat& A, std::span<const uint32_t> v) {
  if (v.size() != A.cols()) throw invalid_argument("mul_mat_col: size");
  const Field& F = *A.field();
  std::vector<uint32_t> out(A.rows(), 0);
  for (uint32_t i = 0; i < A.rows(); ++i) {
    uint32_t acc = 0;
    const auto r = A.row(i);
    for (uint32_t j = 0; j < A.cols(); ++j)
      if (r[j] && v[j]) acc = F.add(acc, F.mul(r[j], v[j]));
    out[i] = acc;
  }
  return out;
}

namespace {

// In-place forward elimination to (non-reduced) row echelon form.
// Returns pivot columns. If `reduce` is set, continues to RREF.
std::vector<uint32_t> eliminate(Mat& A, bool reduce) {
  const Field& F = *A.field();
  const uint32_t nr = A.rows(), nc = A.cols();
  std::vector<uint32_t> pivots;
  uint32_t r = 0;
  for (uint32_t c = 0; c < nc && r < nr; ++c) {
    uint32_t piv = r;
    while (piv < nr && A.at(piv, c) == 0) ++piv;
    if (piv == nr) continue;
    if (piv != r)
      for (uint32_t j = c; j < nc; ++j) std::swap(A.at(piv, j), A.at(r, j));
    const uint32_t s = F.inv(A.at(r, c));
    if (s != 1)
      for (uint32_t j = c; j < nc; ++j) A.at(r, j) = F.mul(A.at(r, j), s);
    const uint32_t lo = reduce ? 0 : r + 1;
    for (uint32_t i = lo; i < nr; ++i) {
      if (i == r) continue;
      const uint32_t f = A.at(i, c);
      if (!f) continue;
      for (uint32_t j = c; j < nc; ++j)
        A.at(i, j) = F.sub(A.at(i, j), F.mul(f, A.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

uint32_t rank(Mat A) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  return uint32_t(eliminate(A, /*reduce=*/false).size());
}

Echelon rref(Mat A) {
  Echelon e;
  e.pivot_cols = eliminate(A, /*reduce=*/true);
  e.mat = std::move(A);
  return e;
}

SolveResult solve(const Mat& A, std::span<const uint32_t> b) {
  if (b.size() != A.rows()) throw invalid_argument("solve: rhs size");
  Mat aug(A.field(), A.rows(), A.cols() + 1);
  aug.paste(0, 0, A);
  for (uint32_t i = 0; i < A.rows(); ++i) aug.at(i, A.cols()) = b[i];
  auto ech = rref(std::move(aug));
  SolveResult res;
  // Inconsistent iff the rhs column turned into a pivot.
  if (!ech.pivot_cols.empty() && ech.pivot_cols.back() == A.cols()) {
    res.status = SolveStatus::kNoSolution;
    return res;
  }
  if (ech.pivot_cols.size() < A.cols()) {
    res.status = SolveStatus::kNotUnique;
    return res;
  }
  res.status = SolveStatus::kOk;
  res.x.assign(A.cols(), 0);
  for (uint32_t r = 0; r < ech.pivot_cols.size(); ++r)
    res.x[ech.pivot_cols[r]] = ech.mat.at(r, A.cols());
  return res;
}

std::optional<Mat> inverse(const Mat& A) {
  if (A.rows() != A.cols()) throw invalid_argument("inverse: not square");
  const uint32_t n = A.rows();
  Mat aug(A.field(), n, 2 * n);
  aug.paste(0, 0, A);
  for (uint32_t i = 0; i < n; ++i) aug.at(i, n + i) = 1;
  auto ech = rref(std::move(aug));
  for (uint32_t i = 0; i < n; ++i)
    if (i >= ech.pivot_cols.size() || ech.pivot_cols[i] != i)
      return std::nullopt;
  Mat inv(A.field(), n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) inv.at(i, j) = ech.mat.at(i, n + j);
  return inv;
}

Mat sample_invertible(FieldPtr f, uint32_t n, Rng& rng) {
  if (n == 0) throw invalid_argument("sample_invertible: n must be >= 1");
  const uint32_t q = f->q();
  for (;;) {
    Mat m(f, n, n);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j) m.at(i, j) = uint32_t(rng.below(q));
    if (rank(m) == n) return m;
  }
}

Mat permutation_matrix(FieldPtr f, std::span<const uint32_t> perm) {
  const uint32_t n = uint32_t(perm.size());
  std::vector<bool> seen(n, false);
  Mat m(std::move(f), n, n);
  for (uint32_t i = 0; i < n; ++i) {
    if (perm[i] >= n || seen[perm[i]])
      throw invalid_argument("permutation_matrix: not a permutation");
    seen[perm[i]] = true;
    m.at(i, perm[i]) = 1;
  }
  return m;
}

Mat companion_matrix(FieldPtr f, std::span<const uint32_t> monic) {
  if (monic.size() < 2 || monic.back() != 1)
    throw invalid_argument("companion_matrix: need a monic polynomial");
  const uint32_t n = uint32_t(monic.size()) - 1;
  const Field& F = *f;
  Mat m(f, n, n);
  for (uint32_t i = 0; i + 1 < n; ++i) m.at(i + 1, i) = 1;
  for (uint32_t i = 0; i < n; ++i) m.at(i, n - 1) = F.neg(monic[i]);
  return m;
}

Mat matrix_rep(const Tower& tw, uint32_t a) {
  const uint32_t ell = tw.ell();
  const Mat C = companion_matrix(tw.base(), tw.minimal_polynomial());
  const auto u = tw.coords(a);
  const Field& F = *tw.base();
  // Horner: M = (...(u_{l-1} I) C + u_{l-2} I) C + ... + u_0 I
  Mat M(tw.base(), ell, ell);
  for (uint32_t i = 0; i < ell; ++i) M.at(i, i) = u[ell - 1];
  for (uint32_t k = ell - 1; k-- > 0;) {
    M = M * C;
    for (uint32_t i = 0; i < ell; ++i) M.at(i, i) = F.add(M.at(i, i), u[k]);
  }
  return M;
}

}  // namespace pir
