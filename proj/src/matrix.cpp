#include "cokmat/matrix.hpp"

#include <sstream>

namespace cokmat {

namespace {

void require_same_ring(const RingMatrix& a, const RingMatrix& b) {
  if (!same_ring(*a.ring(), *b.ring()))
    throw std::invalid_argument("ring mismatch between matrices");
}

}  // namespace

RingMatrix::RingMatrix(RingPtr ring, unsigned rows, unsigned cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("matrix dimensions must be positive");
  digits_.assign(static_cast<std::size_t>(rows_) * cols_ * ring_->deg, 0);
}

RingMatrix RingMatrix::identity(RingPtr ring, unsigned n) {
  RingMatrix m(std::move(ring), n, n);
  for (unsigned i = 0; i < n; ++i) m.entry(i, i)[0] = 1;
  return m;
}

RingMatrix RingMatrix::from_ints(RingPtr ring, const std::vector<std::vector<long long>>& rows) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("empty matrix literal");
  RingMatrix m(ring, static_cast<unsigned>(rows.size()), static_cast<unsigned>(rows[0].size()));
  for (unsigned r = 0; r < m.rows(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("ragged matrix literal");
    for (unsigned c = 0; c < m.cols(); ++c) m.set_int(r, c, rows[r][c]);
  }
  return m;
}

RingMatrix RingMatrix::companion(RingPtr ring, const PolySpec& P) {
  unsigned d = P.degree();
  RingMatrix m(ring, d, d);
  for (unsigned i = 0; i + 1 < d; ++i) m.entry(i + 1, i)[0] = 1;  // subdiagonal
  for (unsigned i = 0; i < d; ++i)
    m.entry(i, d - 1)[0] = m.ring()->submod(0, m.ring()->reduce_int(P.coeffs[i]));
  return m;
}

RingMatrix RingMatrix::parse(RingPtr ring, const std::string& text) {
  std::vector<std::vector<std::string>> cells;
  std::stringstream row_stream(text);
  std::string row;
  while (std::getline(row_stream, row, ';')) {
    cells.emplace_back();
    std::stringstream cell_stream(row);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.back().push_back(cell);
    if (cells.back().empty()) throw std::invalid_argument("empty matrix row in '" + text + "'");
  }
  if (cells.empty()) throw std::invalid_argument("empty matrix literal");
  RingMatrix m(ring, static_cast<unsigned>(cells.size()),
               static_cast<unsigned>(cells[0].size()));
  for (unsigned r = 0; r < m.rows(); ++r) {
    if (cells[r].size() != cells[0].size()) throw std::invalid_argument("ragged matrix literal");
    for (unsigned c = 0; c < m.cols(); ++c) {
      auto digits = ring->parse(cells[r][c]);
      std::copy(digits.begin(), digits.end(), m.entry(r, c));
    }
  }
  return m;
}

ChainRingElement RingMatrix::at(unsigned r, unsigned c) const {
  std::vector<long long> d(ring_->deg);
  const std::uint64_t* e = entry(r, c);
  for (unsigned i = 0; i < ring_->deg; ++i) d[i] = static_cast<long long>(e[i]);
  return ChainRingElement(ring_, d);
}

void RingMatrix::set(unsigned r, unsigned c, const ChainRingElement& v) {
  if (!same_ring(*ring_, *v.ring())) throw std::invalid_argument("ring mismatch in set()");
  std::copy(v.digits().begin(), v.digits().end(), entry(r, c));
}

void RingMatrix::set_int(unsigned r, unsigned c, long long v) {
  std::uint64_t* e = entry(r, c);
  for (unsigned i = 0; i < ring_->deg; ++i) e[i] = 0;
  e[0] = ring_->reduce_int(v);
}

bool RingMatrix::operator==(const RingMatrix& o) const {
  return same_ring(*ring_, *o.ring_) && rows_ == o.rows_ && cols_ == o.cols_ &&
         digits_ == o.digits_;
}

std::string RingMatrix::str() const {
  std::string s;
  for (unsigned r = 0; r < rows_; ++r) {
    if (r) s += ";";
    for (unsigned c = 0; c < cols_; ++c) {
      if (c) s += ",";
      s += ring_->format(entry(r, c));
    }
  }
  return s;
}

RingMatrix mat_add(const RingMatrix& a, const RingMatrix& b) {
  require_same_ring(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("shape mismatch in mat_add");
  RingMatrix out(a.ring(), a.rows(), a.cols());
  const ChainRing& R = *a.ring();
  for (std::size_t i = 0; i < a.raw().size(); i += R.deg)
    R.add_into(a.raw().data() + i, b.raw().data() + i, out.raw().data() + i);
  return out;
}

RingMatrix mat_sub(const RingMatrix& a, const RingMatrix& b) {
  require_same_ring(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("shape mismatch in mat_sub");
  RingMatrix out(a.ring(), a.rows(), a.cols());
  const ChainRing& R = *a.ring();
  for (std::size_t i = 0; i < a.raw().size(); i += R.deg)
    R.sub_into(a.raw().data() + i, b.raw().data() + i, out.raw().data() + i);
  return out;
}

RingMatrix mat_mul(const RingMatrix& a, const RingMatrix& b) {
  require_same_ring(a, b);
  if (a.cols() != b.rows()) throw std::invalid_argument("shape mismatch in mat_mul");
  const ChainRing& R = *a.ring();
  RingMatrix out(a.ring(), a.rows(), b.cols());
  std::uint64_t tmp[kMaxPolyDegree];
  for (unsigned i = 0; i < a.rows(); ++i)
    for (unsigned j = 0; j < b.cols(); ++j) {
      std::uint64_t* acc = out.entry(i, j);
      for (unsigned l = 0; l < a.cols(); ++l) {
        R.mul_into(a.entry(i, l), b.entry(l, j), tmp);
        R.add_into(acc, tmp, acc);
      }
    }
  return out;
}

RingMatrix mat_scale(const RingMatrix& a, const ChainRingElement& c) {
  if (!same_ring(*a.ring(), *c.ring())) throw std::invalid_argument("ring mismatch in mat_scale");
  const ChainRing& R = *a.ring();
  RingMatrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.raw().size(); i += R.deg)
    R.mul_into(a.raw().data() + i, c.digits().data(), out.raw().data() + i);
  return out;
}

RingMatrix transpose(const RingMatrix& a) {
  RingMatrix out(a.ring(), a.cols(), a.rows());
  unsigned d = a.ring()->deg;
  for (unsigned r = 0; r < a.rows(); ++r)
    for (unsigned c = 0; c < a.cols(); ++c)
      std::copy(a.entry(r, c), a.entry(r, c) + d, out.entry(c, r));
  return out;
}

RingMatrix poly_eval(const PolySpec& P, const RingMatrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("poly_eval needs a square matrix");
  const ChainRing& R = *x.ring();
  unsigned n = x.rows();
  // Horner: start from the (monic) leading coefficient.
  RingMatrix res = RingMatrix::identity(x.ring(), n);
  for (unsigned step = P.degree(); step-- > 0;) {
    res = mat_mul(res, x);
    std::uint64_t a = R.reduce_int(P.coeffs[step]);
    for (unsigned i = 0; i < n; ++i) res.entry(i, i)[0] = R.addmod(res.entry(i, i)[0], a);
  }
  return res;
}

unsigned residue_rank_raw(const ChainRing& ring, const std::uint64_t* digits, unsigned rows,
                          unsigned cols, std::uint64_t* scratch) {
  const unsigned d = ring.deg;
  const std::size_t total = static_cast<std::size_t>(rows) * cols * d;
  for (std::size_t i = 0; i < total; ++i) scratch[i] = digits[i] % ring.p;

  auto cell = [&](unsigned r, unsigned c) {
    return scratch + (static_cast<std::size_t>(r) * cols + c) * d;
  };
  std::uint64_t inv[kMaxPolyDegree], f[kMaxPolyDegree], t[kMaxPolyDegree];
  unsigned rank = 0;
  for (unsigned c = 0; c < cols && rank < rows; ++c) {
    unsigned pr = rows;
    for (unsigned r = rank; r < rows; ++r)
      if (!ring.is_zero(cell(r, c))) {
        pr = r;
        break;
      }
    if (pr == rows) continue;
    if (pr != rank)
      for (unsigned cc = c; cc < cols; ++cc)
        std::swap_ranges(cell(pr, cc), cell(pr, cc) + d, cell(rank, cc));
    // Nonzero in F_q means unit; invert mod p^k and reduce mod p.
    ring.inverse_into(cell(rank, c), inv);
    for (unsigned i = 0; i < d; ++i) inv[i] %= ring.p;
    for (unsigned r = rank + 1; r < rows; ++r) {
      if (ring.is_zero(cell(r, c))) continue;
      ring.mul_into(cell(r, c), inv, f);
      for (unsigned i = 0; i < d; ++i) f[i] %= ring.p;
      for (unsigned cc = c; cc < cols; ++cc) {
        ring.mul_into(f, cell(rank, cc), t);
        ring.sub_into(cell(r, cc), t, t);
        for (unsigned i = 0; i < d; ++i) cell(r, cc)[i] = t[i] % ring.p;
      }
    }
    ++rank;
  }
  return rank;
}

unsigned residue_rank(const RingMatrix& x) {
  static thread_local std::vector<std::uint64_t> scratch;
  scratch.resize(x.raw().size());
  return residue_rank_raw(*x.ring(), x.raw().data(), x.rows(), x.cols(), scratch.data());
}

bool is_invertible(const RingMatrix& x) {
  if (x.rows() != x.cols()) return false;
  return residue_rank(x) == x.rows();
}

RingMatrix reduce_mod(const RingMatrix& x, unsigned k_new) {
  if (k_new > x.ring()->k)
    throw std::invalid_argument("reduce_mod target precision exceeds source");
  RingMatrix out(with_precision(x.ring(), k_new), x.rows(), x.cols());
  std::uint64_t m = out.ring()->pk;
  for (std::size_t i = 0; i < x.raw().size(); ++i) out.raw()[i] = x.raw()[i] % m;
  return out;
}

RingMatrix lift_canonical(const RingMatrix& xbar, unsigned k_new) {
  if (k_new < xbar.ring()->k)
    throw std::invalid_argument("lift_canonical target precision below source");
  RingMatrix out(with_precision(xbar.ring(), k_new), xbar.rows(), xbar.cols());
  out.raw() = xbar.raw();  // least-nonnegative digits are already canonical
  return out;
}

// ---- block operations ----------------------------------------------------

unsigned BlockPartition::total() const {
  unsigned s = 0;
  for (unsigned v : sizes) s += v;
  return s;
}

unsigned BlockPartition::offset(unsigned i) const {
  unsigned s = 0;
  for (unsigned j = 0; j < i; ++j) s += sizes[j];
  return s;
}

void BlockPartition::validate(unsigned dim) const {
  if (sizes.empty()) throw std::invalid_argument("empty block partition");
  for (unsigned v : sizes)
    if (v == 0) throw std::invalid_argument("block sizes must be positive");
  if (total() != dim)
    throw std::invalid_argument("block partition sums to " + std::to_string(total()) +
                                ", expected " + std::to_string(dim));
}

BlockOp BlockOp::swap_blocks(unsigned i, unsigned j) { return BlockOp{kSwap, i, j, std::nullopt}; }
BlockOp BlockOp::scale_block(unsigned i, RingMatrix g) {
  return BlockOp{kScale, i, 0, std::move(g)};
}
BlockOp BlockOp::add_multiple(unsigned i, unsigned j, RingMatrix a) {
  return BlockOp{kAddMultiple, i, j, std::move(a)};
}

namespace {

void check_block_indices(const BlockPartition& part, const BlockOp& op) {
  unsigned s = static_cast<unsigned>(part.sizes.size());
  if (op.i >= s || (op.kind != BlockOp::kScale && op.j >= s))
    throw std::invalid_argument("block index out of range");
  if (op.kind == BlockOp::kAddMultiple && op.i == op.j)
    throw std::invalid_argument("add_multiple requires distinct blocks");
}

}  // namespace

RingMatrix block_row_op(const RingMatrix& x, const BlockPartition& part, const BlockOp& op) {
  part.validate(x.rows());
  check_block_indices(part, op);
  const unsigned d = x.ring()->deg;
  RingMatrix out = x;
  auto copy_rows = [&](const RingMatrix& src, unsigned src_row, unsigned dst_row, unsigned count,
                       RingMatrix& dst) {
    for (unsigned r = 0; r < count; ++r)
      for (unsigned c = 0; c < x.cols(); ++c)
        std::copy(src.entry(src_row + r, c), src.entry(src_row + r, c) + d,
                  dst.entry(dst_row + r, c));
  };
  switch (op.kind) {
    case BlockOp::kSwap: {
      // General block interchange: emit the blocks in swapped order (a row
      // permutation, so still left multiplication by an invertible matrix).
      std::vector<unsigned> order(part.sizes.size());
      for (unsigned b = 0; b < order.size(); ++b) order[b] = b;
      std::swap(order[op.i], order[op.j]);
      unsigned dst = 0;
      for (unsigned b : order) {
        copy_rows(x, part.offset(b), dst, part.sizes[b], out);
        dst += part.sizes[b];
      }
      return out;
    }
    case BlockOp::kScale: {
      const RingMatrix& g = *op.mat;
      if (!same_ring(*g.ring(), *x.ring())) throw std::invalid_argument("scale block ring mismatch");
      if (g.rows() != part.sizes[op.i] || g.cols() != part.sizes[op.i])
        throw std::invalid_argument("scale block has wrong shape");
      if (!is_invertible(g)) throw std::invalid_argument("scale block is not invertible");
      RingMatrix sub(x.ring(), part.sizes[op.i], x.cols());
      copy_rows(x, part.offset(op.i), 0, part.sizes[op.i], sub);
      RingMatrix prod = mat_mul(g, sub);
      copy_rows(prod, 0, part.offset(op.i), part.sizes[op.i], out);
      return out;
    }
    case BlockOp::kAddMultiple: {
      const RingMatrix& a = *op.mat;
      if (!same_ring(*a.ring(), *x.ring())) throw std::invalid_argument("block ring mismatch");
      if (a.rows() != part.sizes[op.i] || a.cols() != part.sizes[op.j])
        throw std::invalid_argument("add_multiple block has wrong shape");
      RingMatrix subj(x.ring(), part.sizes[op.j], x.cols());
      copy_rows(x, part.offset(op.j), 0, part.sizes[op.j], subj);
      RingMatrix prod = mat_mul(a, subj);
      const ChainRing& R = *x.ring();
      std::uint64_t t[kMaxPolyDegree];
      for (unsigned r = 0; r < part.sizes[op.i]; ++r)
        for (unsigned c = 0; c < x.cols(); ++c) {
          R.add_into(out.entry(part.offset(op.i) + r, c), prod.entry(r, c), t);
          std::copy(t, t + d, out.entry(part.offset(op.i) + r, c));
        }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

RingMatrix block_col_op(const RingMatrix& x, const BlockPartition& part, const BlockOp& op) {
  part.validate(x.cols());
  check_block_indices(part, op);
  // Column operations are the transpose duals: A acts as its transpose on
  // the right, so pass the same op matrices through transposition.
  BlockOp t_op = op;
  if (op.mat) t_op.mat = transpose(*op.mat);
  return transpose(block_row_op(transpose(x), part, t_op));
}

RingMatrix block_row_matrix(const RingPtr& ring, const BlockPartition& part, const BlockOp& op) {
  return block_row_op(RingMatrix::identity(ring, part.total()), part, op);
}

RingMatrix block_col_matrix(const RingPtr& ring, const BlockPartition& part, const BlockOp& op) {
  return block_col_op(RingMatrix::identity(ring, part.total()), part, op);
}

}  // namespace cokmat
