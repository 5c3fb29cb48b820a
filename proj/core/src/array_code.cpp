#include "pir/array_code.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace pir {

Mat BlockGenerator::thick(uint32_t i) const {
  if (i >= prm.N) throw invalid_argument("BlockGenerator::thick: index");
  std::vector<uint32_t> idx(prm.ell);
  std::iota(idx.begin(), idx.end(), i * prm.ell);
  return g.select_cols(idx);
}

Mat grs_generator(FieldPtr f, uint32_t n, uint32_t k, GrsMode mode) {
  if (k < 1 || n < k) throw invalid_argument("grs_generator: need n >= k >= 1");
  const uint32_t q = f->q();
  const uint32_t special =
      mode == GrsMode::kPlain ? 0 : (mode == GrsMode::kExtended ? 1 : 2);
  if (n < special) throw invalid_argument("grs_generator: length too small");
  const uint32_t finite = n - special;
  if (finite > q)
    throw invalid_argument("grs_generator: length exceeds field bound");
  const Field& F = *f;
  Mat g(f, k, n);
  for (uint32_t j = 0; j < finite; ++j) {
    const uint32_t x = F.element_by_index(j);
    for (uint32_t i = 0; i < k; ++i) g.at(i, j) = F.pow(x, i);
  }
  if (special >= 1) g.at(k - 1, finite) = 1;  // coefficient of x^{k-1}
  if (special == 2) g.at(k >= 2 ? k - 2 : 0, finite + 1) = 1;
  return g;
}

BlockGenerator expand_to_array_code(const Tower& tw, const Mat& symbol_gen) {
  if (symbol_gen.field() != tw.top())
    throw invalid_argument("expand_to_array_code: generator not over top field");
  const uint32_t k = symbol_gen.rows(), n = symbol_gen.cols();
  const uint32_t ell = tw.ell();
  BlockGenerator out;
  out.prm = {n, k, ell, tw.base()->q()};
  out.prm.validate();
  out.g = Mat(tw.base(), k * ell, n * ell);
  for (uint32_t i = 0; i < k; ++i)
    for (uint32_t j = 0; j < n; ++j)
      out.g.paste(i * ell, j * ell, matrix_rep(tw, symbol_gen.at(i, j)));
  return out;
}

BlockGenerator interleave(const BlockGenerator& base, uint32_t copies) {
  if (copies == 0) throw invalid_argument("interleave: copies must be >= 1");
  const auto& p = base.prm;
  BlockGenerator out;
  out.prm = {p.N, p.T, p.ell * copies, p.q};
  out.g = Mat(base.g.field(), p.T * p.ell * copies, p.N * p.ell * copies);
  for (uint32_t c = 0; c < copies; ++c)
    for (uint32_t r = 0; r < p.T * p.ell; ++r)
      for (uint32_t i = 0; i < p.N; ++i)
        for (uint32_t u = 0; u < p.ell; ++u)
          out.g.at(c * p.T * p.ell + r,
                   i * out.prm.ell + c * p.ell + u) =
              base.g.at(r, i * p.ell + u);
  return out;
}

BlockGenerator permute_blocks(const BlockGenerator& gen,
                              const std::vector<std::vector<uint32_t>>& perms) {
  const auto& p = gen.prm;
  if (perms.size() != p.N)
    throw invalid_argument("permute_blocks: need one permutation per thick column");
  std::vector<uint32_t> order;
  order.reserve(size_t(p.N) * p.ell);
  for (uint32_t i = 0; i < p.N; ++i) {
    if (perms[i].size() != p.ell)
      throw invalid_argument("permute_blocks: permutation size mismatch");
    std::vector<bool> seen(p.ell, false);
    for (uint32_t j : perms[i]) {
      if (j >= p.ell || seen[j])
        throw invalid_argument("permute_blocks: not a permutation");
      seen[j] = true;
      order.push_back(i * p.ell + j);
    }
  }
  return {p, gen.g.select_cols(order)};
}

bool check_mds_subset(const BlockGenerator& gen,
                      std::span<const uint32_t> thick_idx) {
  const auto& p = gen.prm;
  if (thick_idx.size() != p.T)
    throw invalid_argument("check_mds_subset: need exactly T thick columns");
  std::vector<uint32_t> cols;
  cols.reserve(size_t(p.T) * p.ell);
  for (uint32_t i : thick_idx) {
    if (i >= p.N) throw invalid_argument("check_mds_subset: index");
    for (uint32_t u = 0; u < p.ell; ++u) cols.push_back(i * p.ell + u);
  }
  return rank(gen.g.select_cols(cols)) == p.T * p.ell;
}

bool check_mds(const BlockGenerator& gen) {
  const auto& p = gen.prm;
  std::vector<uint32_t> idx(p.T);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (!check_mds_subset(gen, idx)) return false;
    // next combination in ascending order
    uint32_t i = p.T;
    while (i > 0 && idx[i - 1] == p.N - p.T + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (uint32_t j = i; j < p.T; ++j) idx[j] = idx[j - 1] + 1;
  }
}

namespace {

// Incremental column-space basis used by the greedy seeding step.
class ColumnBasis {
 public:
  explicit ColumnBasis(const Field& f) : f_(f) {}

  // Tries to add v to the span; true (and keeps the reduced vector) if v was
  // independent of the current basis.
  bool add(std::vector<uint32_t> v) {
    reduce(v);
    for (uint32_t i = 0; i < v.size(); ++i) {
      if (v[i]) {
        const uint32_t s = f_.inv(v[i]);
        for (auto& x : v) x = f_.mul(x, s);
        rows_.emplace_back(i, std::move(v));
        return true;
      }
    }
    return false;
  }

 private:
  void reduce(std::vector<uint32_t>& v) const {
    for (const auto& [piv, w] : rows_) {
      const uint32_t c = v[piv];
      if (!c) continue;
      for (uint32_t j = 0; j < v.size(); ++j)
        if (w[j]) v[j] = f_.sub(v[j], f_.mul(c, w[j]));
    }
  }

  const Field& f_;
  std::vector<std::pair<uint32_t, std::vector<uint32_t>>> rows_;
};

}  // namespace

std::optional<std::vector<uint32_t>> find_recovery_arrangement(
    const BlockGenerator& gen, std::span<const uint32_t> quota) {
  const auto& p = gen.prm;
  if (quota.size() != p.N)
    throw invalid_argument("find_recovery_arrangement: quota size");
  const uint32_t E = p.N * p.ell;
  uint64_t want = 0;
  for (uint32_t i = 0; i < p.N; ++i) {
    if (quota[i] > p.ell) return std::nullopt;
    want += quota[i];
  }
  if (want > uint64_t(p.T) * p.ell) return std::nullopt;

  std::vector<char> in_set(E, 0);
  std::vector<uint32_t> cnt(p.N, 0);
  uint32_t size = 0;
  const auto thick_of = [&](uint32_t e) { return e / p.ell; };

  // Greedy seed: take any column that fits both the span and the quota.
  {
    ColumnBasis basis(*gen.g.field());
    for (uint32_t e = 0; e < E && size < want; ++e) {
      const uint32_t i = thick_of(e);
      if (cnt[i] == quota[i]) continue;
      if (basis.add(gen.g.col(e))) {
        in_set[e] = 1;
        ++cnt[i];
        ++size;
      }
    }
  }

  // Augment along shortest exchange paths until the quota total is reached
  // or provably unreachable.
  while (size < want) {
    // Row-reduce with the current set's columns in front so that membership
    // and exchange coefficients drop out of one elimination.
    std::vector<uint32_t> order;
    order.reserve(E);
    std::vector<uint32_t> members;  // selected columns, ascending
    for (uint32_t e = 0; e < E; ++e)
      if (in_set[e]) { order.push_back(e); members.push_back(e); }
    for (uint32_t e = 0; e < E; ++e)
      if (!in_set[e]) order.push_back(e);
    const auto ech = rref(gen.g.select_cols(order));

    // arcs_to[y]: selected columns x with (set - x + y) still independent.
    std::vector<std::vector<uint32_t>> arcs_to(E);
    std::vector<char> grows_span(E, 0);
    for (uint32_t jpos = size; jpos < E; ++jpos) {
      const uint32_t y = order[jpos];
      bool in_span = true;
      for (uint32_t r = size; r < ech.mat.rows(); ++r)
        if (ech.mat.at(r, jpos)) { in_span = false; break; }
      if (!in_span) {
        grows_span[y] = 1;
        continue;
      }
      for (uint32_t r = 0; r < size; ++r)
        if (ech.mat.at(r, jpos)) arcs_to[y].push_back(members[r]);
    }

    // BFS: sources are columns addable to the span, sinks columns whose
    // thick column still has quota room.
    std::vector<int32_t> parent(E, -1);
    std::vector<char> visited(E, 0);
    std::deque<uint32_t> queue;
    for (uint32_t e = 0; e < E; ++e) {
      if (!in_set[e] && grows_span[e]) {
        visited[e] = 1;
        queue.push_back(e);
      }
    }
    int32_t goal = -1;
    while (!queue.empty() && goal < 0) {
      const uint32_t v = queue.front();
      queue.pop_front();
      if (!in_set[v]) {
        if (cnt[thick_of(v)] < quota[thick_of(v)]) { goal = int32_t(v); break; }
        // must evict some member of the same thick column
        for (uint32_t x = thick_of(v) * p.ell; x < (thick_of(v) + 1) * p.ell; ++x) {
          if (in_set[x] && !visited[x]) {
            visited[x] = 1;
            parent[x] = int32_t(v);
            queue.push_back(x);
          }
        }
      } else {
        // leaving v: any y that can replace v in the span
        for (uint32_t y = 0; y < E; ++y) {
          if (visited[y] || in_set[y]) continue;
          const auto& a = arcs_to[y];
          if (std::find(a.begin(), a.end(), v) != a.end()) {
            visited[y] = 1;
            parent[y] = int32_t(v);
            queue.push_back(y);
          }
        }
      }
    }
    if (goal < 0) return std::nullopt;  // maximum common independent set < quota
    for (int32_t v = goal; v >= 0; v = parent[v]) {
      const uint32_t u = uint32_t(v);
      if (in_set[u]) {
        in_set[u] = 0;
        --cnt[thick_of(u)];
      } else {
        in_set[u] = 1;
        ++cnt[thick_of(u)];
      }
    }
    ++size;  // paths alternate add/remove and net exactly one element
  }

  std::vector<uint32_t> out;
  out.reserve(want);
  for (uint32_t e = 0; e < E; ++e)
    if (in_set[e]) out.push_back(e);
  return out;
}

std::optional<std::vector<uint32_t>> brute_force_arrangement(
    const BlockGenerator& gen, std::span<const uint32_t> quota) {
  const auto& p = gen.prm;
  if (quota.size() != p.N)
    throw invalid_argument("brute_force_arrangement: quota size");
  if (p.N * p.ell > 24)
    throw invalid_argument("brute_force_arrangement: instance too large");
  std::vector<uint32_t> chosen;
  std::vector<uint32_t> result;
  bool found = false;

  // Depth-first over thick columns, combinations in lexicographic order.
  auto rec = [&](auto&& self, uint32_t i) -> void {
    if (found) return;
    if (i == p.N) {
      if (rank(gen.g.select_cols(chosen)) == chosen.size() &&
          chosen.size() == uint64_t(p.T) * p.ell) {
        result = chosen;
        found = true;
      }
      return;
    }
    std::vector<uint32_t> comb(quota[i]);
    if (quota[i] > p.ell) return;
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
      for (uint32_t c : comb) chosen.push_back(i * p.ell + c);
      self(self, i + 1);
      for (uint32_t c = 0; c < quota[i]; ++c) chosen.pop_back();
      if (found || quota[i] == 0) return;
      uint32_t k = quota[i];
      while (k > 0 && comb[k - 1] == p.ell - quota[i] + (k - 1)) --k;
      if (k == 0) return;
      ++comb[k - 1];
      for (uint32_t j = k; j < quota[i]; ++j) comb[j] = comb[j - 1] + 1;
    }
  };
  rec(rec, 0);
  if (!found) return std::nullopt;
  return result;
}

ArrangedCode normalize_with_quota(const BlockGenerator& gen,
                                  std::span<const uint32_t> quota) {
  const auto& p = gen.prm;
  auto arr = find_recovery_arrangement(gen, quota);
  if (!arr || arr->size() != uint64_t(p.T) * p.ell)
    throw integrity_error(
        "normalize_with_quota: no independent selection matches the quota");
  auto inv = inverse(gen.g.select_cols(*arr));
  if (!inv) throw integrity_error("normalize_with_quota: selection not invertible");
  BlockGenerator reduced{p, *inv * gen.g};

  // Shift each thick column's selected columns to its front, preserving order.
  std::vector<std::vector<uint32_t>> perms(p.N);
  size_t pos = 0;
  for (uint32_t i = 0; i < p.N; ++i) {
    std::vector<char> sel(p.ell, 0);
    while (pos < arr->size() && (*arr)[pos] / p.ell == i) {
      sel[(*arr)[pos] % p.ell] = 1;
      ++pos;
    }
    for (uint32_t j = 0; j < p.ell; ++j)
      if (sel[j]) perms[i].push_back(j);
    for (uint32_t j = 0; j < p.ell; ++j)
      if (!sel[j]) perms[i].push_back(j);
  }
  ArrangedCode ac;
  ac.gen = permute_blocks(reduced, perms);
  ac.quota.assign(quota.begin(), quota.end());
  ac.offsets.resize(p.N);
  uint32_t off = 0;
  for (uint32_t i = 0; i < p.N; ++i) {
    ac.offsets[i] = off;
    off += quota[i];
  }
  return ac;
}

std::vector<uint32_t> recover_full_codeword(const ArrangedCode& ac,
                                            std::span<const uint32_t> leading) {
  const auto& p = ac.gen.prm;
  if (leading.size() != uint64_t(p.T) * p.ell)
    throw invalid_argument("recover_full_codeword: need T*ell leading values");
  return mul_row_vec(leading, ac.gen.g);
}

}  // namespace pir
