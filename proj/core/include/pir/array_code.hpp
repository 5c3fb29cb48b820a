#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pir/mat.hpp"

namespace pir {

// Shape of a block code over GF(q): N thick columns of ell columns each,
// dimension T*ell. "MDS" here means every selection of T thick columns has
// full rank T*ell.
struct ArrayCodeParams {
  uint32_t N = 0, T = 0, ell = 0, q = 0;

  void validate() const {
    if (T < 1 || N < T || ell < 1)
      throw invalid_argument("ArrayCodeParams: need N >= T >= 1, ell >= 1");
  }
  friend bool operator==(const ArrayCodeParams&,
                         const ArrayCodeParams&) = default;
};

struct BlockGenerator {
  ArrayCodeParams prm;
  Mat g;  // (T*ell) x (N*ell) over GF(q)

  // The ell columns of thick column i, as a (T*ell) x ell matrix.
  Mat thick(uint32_t i) const;
};

enum class GrsMode { kPlain, kExtended, kDoublyExtended };

// k x n generalized Reed-Solomon generator over the given field, all column
// multipliers 1. Evaluation points follow the field's fixed enumeration
// 0, 1, g, g^2, ...; kExtended appends the column picking the coefficient of
// x^{k-1} ("infinity"), kDoublyExtended uses n-2 finite points plus that
// column and the x^{k-2} coefficient column (for k = 1 both degenerate to
// the constant column). Length bounds: q / q+1 / q+2. The result is NOT
// guaranteed MDS in every mode (e.g. the doubly-extended variant fails for
// k = 2); callers verify with check_mds.
Mat grs_generator(FieldPtr f, uint32_t n, uint32_t k, GrsMode mode);

// Expands a k x n generator over the tower's top field into a block
// generator over the base field by replacing each entry with its ell x ell
// matrix representation. Any T thick columns of the result have full rank
// exactly when the corresponding T columns of the input are independent, so
// MDS inputs yield MDS block codes.
BlockGenerator expand_to_array_code(const Tower& tw, const Mat& symbol_gen);

// Block-diagonal interleaving: `copies` independent instances of the input
// code stacked per thick column. Takes (N, T; l') to (N, T; copies*l') and
// preserves the MDS property.
BlockGenerator interleave(const BlockGenerator& base, uint32_t copies);

// Applies a column permutation inside each thick column: new column j of
// thick column i is old column perms[i][j].
BlockGenerator permute_blocks(const BlockGenerator& gen,
                              const std::vector<std::vector<uint32_t>>& perms);

bool check_mds_subset(const BlockGenerator& gen,
                      std::span<const uint32_t> thick_idx);
// All C(N, T) thick-column selections.
bool check_mds(const BlockGenerator& gen);

// Finds a set of T*ell independent columns containing exactly quota[i]
// columns from thick column i (sum of quotas must equal the dimension for
// success; the returned global column indices are sorted ascending).
// Maximizes a common independent set of the column matroid and the
// per-thick-column partition matroid via shortest augmenting paths, so a
// failure is a certificate that no such selection exists.
std::optional<std::vector<uint32_t>> find_recovery_arrangement(
    const BlockGenerator& gen, std::span<const uint32_t> quota);

// Exhaustive reference for the above; only for tiny instances (N*ell <= 24):
// first solution in lexicographic column order.
std::optional<std::vector<uint32_t>> brute_force_arrangement(
    const BlockGenerator& gen, std::span<const uint32_t> quota);

// A block generator row-reduced and internally permuted so that, for each
// thick column i, the leading quota[i] columns are distinct unit vectors:
// thick column i's leading column j equals e_{offsets[i]+j}. Message
// symbols thus appear verbatim in the leading positions ("systematic on a
// quota-shaped information set").
struct ArrangedCode {
  BlockGenerator gen;
  std::vector<uint32_t> quota;    // per thick column, sums to T*ell
  std::vector<uint32_t> offsets;  // prefix sums of quota
};
ArrangedCode normalize_with_quota(const BlockGenerator& gen,
                                  std::span<const uint32_t> quota);

// Evaluates the full codeword (length N*ell) whose leading-position values
// are as given (length T*ell, in offsets order).
std::vector<uint32_t> recover_full_codeword(const ArrangedCode& ac,
                                            std::span<const uint32_t> leading);

}  // namespace pir
