#pragma once

#include <optional>

#include "cokmat/ring.hpp"

// Dense matrices over a chain ring.  Entries live in one flat digit buffer
// (row-major, `deg` digits per entry) with the ring descriptor stored once,
// so enumeration loops can walk and mutate raw spans without allocation.
// Matrices are immutable values from the caller's point of view: every
// operation returns a fresh matrix.

namespace cokmat {

class RingMatrix {
 public:
  RingMatrix(RingPtr ring, unsigned rows, unsigned cols);  // zero matrix
  static RingMatrix identity(RingPtr ring, unsigned n);
  static RingMatrix from_ints(RingPtr ring, const std::vector<std::vector<long long>>& rows);
  // Companion matrix of P over `ring` (deg P x deg P, last column -a_i).
  static RingMatrix companion(RingPtr ring, const PolySpec& P);
  // "a,b;c,d" -- rows split by ';', entries by ',', entry grammar from ring.
  static RingMatrix parse(RingPtr ring, const std::string& text);

  const RingPtr& ring() const { return ring_; }
  unsigned rows() const { return rows_; }
  unsigned cols() const { return cols_; }

  std::uint64_t* entry(unsigned r, unsigned c) {
    return digits_.data() + (static_cast<std::size_t>(r) * cols_ + c) * ring_->deg;
  }
  const std::uint64_t* entry(unsigned r, unsigned c) const {
    return digits_.data() + (static_cast<std::size_t>(r) * cols_ + c) * ring_->deg;
  }
  std::vector<std::uint64_t>& raw() { return digits_; }
  const std::vector<std::uint64_t>& raw() const { return digits_; }

  ChainRingElement at(unsigned r, unsigned c) const;
  void set(unsigned r, unsigned c, const ChainRingElement& v);
  void set_int(unsigned r, unsigned c, long long v);

  bool operator==(const RingMatrix& o) const;
  std::string str() const;

 private:
  RingPtr ring_;
  unsigned rows_, cols_;
  std::vector<std::uint64_t> digits_;
};

RingMatrix mat_add(const RingMatrix& a, const RingMatrix& b);
RingMatrix mat_sub(const RingMatrix& a, const RingMatrix& b);
RingMatrix mat_mul(const RingMatrix& a, const RingMatrix& b);
RingMatrix mat_scale(const RingMatrix& a, const ChainRingElement& c);
RingMatrix transpose(const RingMatrix& a);

// Horner evaluation X^d + a_{d-1} X^{d-1} + ... + a_0 I; X must be square.
RingMatrix poly_eval(const PolySpec& P, const RingMatrix& x);

// Rank of the reduction mod p, by Gaussian elimination over the residue
// field F_q.  Works for any shape.
unsigned residue_rank(const RingMatrix& x);
// Low-level variant for hot loops: `digits` is a rows x cols flat buffer in
// `ring`'s layout; `scratch` must hold rows*cols*deg words.
unsigned residue_rank_raw(const ChainRing& ring, const std::uint64_t* digits, unsigned rows,
                          unsigned cols, std::uint64_t* scratch);

// A square matrix over a chain ring is invertible iff its reduction mod p is
// nonsingular over the residue field.
bool is_invertible(const RingMatrix& x);

// Entrywise precision change.  reduce_mod truncates digits into [0, p^k');
// lift_canonical reinterprets the least-nonnegative digits at the higher
// precision (the unique digit-canonical lift).
RingMatrix reduce_mod(const RingMatrix& x, unsigned k_new);
RingMatrix lift_canonical(const RingMatrix& xbar, unsigned k_new);

// ---- block elementary operations ----------------------------------------
// Row blocks of sizes n_1..n_s; the three operations below are exactly left
// (resp. right) multiplication by an invertible matrix, which is what the
// tests assert by building that multiplier explicitly.

struct BlockPartition {
  std::vector<unsigned> sizes;
  unsigned total() const;
  unsigned offset(unsigned i) const;  // start index of block i
  void validate(unsigned dim) const;  // sizes positive, sum == dim
};

struct BlockOp {
  enum Kind { kSwap, kScale, kAddMultiple } kind;
  unsigned i, j;                  // block indices; j unused for kScale
  std::optional<RingMatrix> mat;  // g (n_i x n_i) for scale, A (n_i x n_j) for add

  static BlockOp swap_blocks(unsigned i, unsigned j);
  static BlockOp scale_block(unsigned i, RingMatrix g);
  static BlockOp add_multiple(unsigned i, unsigned j, RingMatrix a);
};

// Row version: swap exchanges row blocks i and j; scale replaces rows_i by
// g * rows_i (g invertible); add_multiple adds A * rows_j to rows_i (i != j).
RingMatrix block_row_op(const RingMatrix& x, const BlockPartition& part, const BlockOp& op);
// Column version, the transpose-dual: scale maps cols_i to cols_i * g;
// add_multiple adds cols_j * A to cols_i with A of shape n_j x n_i.
RingMatrix block_col_op(const RingMatrix& x, const BlockPartition& part, const BlockOp& op);

// The invertible multipliers realizing the operations: block_row_op(x) equals
// block_row_matrix(...) * x, and block_col_op(x) equals x * block_col_matrix(...).
RingMatrix block_row_matrix(const RingPtr& ring, const BlockPartition& part, const BlockOp& op);
RingMatrix block_col_matrix(const RingPtr& ring, const BlockPartition& part, const BlockOp& op);

}  // namespace cokmat
