#include "cokmat/matrix.hpp"

#include "test_util.hpp"

using namespace cokmat;
using testutil::Rng;

namespace {

RingMatrix random_matrix(const RingPtr& r, unsigned rows, unsigned cols, Rng& rng) {
  RingMatrix m(r, rows, cols);
  for (auto& d : m.raw()) d = rng.below(r->pk);
  return m;
}

void test_arithmetic() {
  auto z8 = make_ring(2, 3);
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    auto a = random_matrix(z8, 3, 3, rng);
    CHECK(mat_mul(RingMatrix::identity(z8, 3), a) == a);
    CHECK(mat_mul(a, RingMatrix::identity(z8, 3)) == a);
  }

  auto z4 = make_ring(2, 2);
  auto two = RingMatrix::from_ints(z4, {{2, 0}, {0, 2}});
  auto prod = mat_mul(two, two);
  CHECK(prod == RingMatrix(z4, 2, 2));  // 2*2 = 0 mod 4

  // Cayley-Hamilton for the companion matrix of t^2+t+1 over F_2.
  auto f2 = make_ring(2, 1);
  PolySpec P(2, {1, 1});
  auto c = RingMatrix::companion(f2, P);
  auto zero = mat_add(mat_add(mat_mul(c, c), c), RingMatrix::identity(f2, 2));
  CHECK(zero == RingMatrix(f2, 2, 2));
  CHECK(poly_eval(P, c) == RingMatrix(f2, 2, 2));
}

void test_poly_eval() {
  auto z4 = make_ring(2, 2);
  Rng rng(5);
  auto x = random_matrix(z4, 3, 3, rng);
  PolySpec pt(2, {0});  // P = t
  CHECK(poly_eval(pt, x) == x);

  PolySpec pm1(2, {-1});  // P = t-1
  CHECK(poly_eval(pm1, RingMatrix::identity(z4, 2)) == RingMatrix(z4, 2, 2));

  PolySpec pq(2, {1, 1});  // t^2+t+1
  auto comp = RingMatrix::from_ints(z4, {{0, 1}, {1, 1}});
  CHECK(poly_eval(pq, comp) == RingMatrix::from_ints(z4, {{2, 2}, {2, 0}}));

  CHECK_THROWS(poly_eval(pt, random_matrix(z4, 2, 3, rng)), std::invalid_argument);
}

void test_invertibility() {
  auto z8 = make_ring(2, 3);
  CHECK(is_invertible(RingMatrix::identity(z8, 3)));
  auto z4 = make_ring(2, 2);
  CHECK(!is_invertible(RingMatrix::from_ints(z4, {{2, 0}, {0, 1}})));
  CHECK(is_invertible(RingMatrix::from_ints(z4, {{1, 2}, {2, 1}})));

  // Rank over an extension residue field: companion of t^2+t+1 is invertible
  // over F_4 (its determinant is the constant term, a unit).
  auto r = make_ring(2, 2, PolySpec(2, {1, 1}));
  RingMatrix shift(r, 2, 2);  // diag(t, t)
  shift.set(0, 0, ChainRingElement(r, {0, 1}));
  shift.set(1, 1, ChainRingElement(r, {0, 1}));
  CHECK(is_invertible(shift));
  CHECK_EQ(residue_rank(RingMatrix(r, 2, 2)), 0u);
}

void test_block_ops_scalar_cases() {
  auto z8 = make_ring(2, 3);
  auto x = RingMatrix::from_ints(z8, {{1, 2}, {3, 4}});
  BlockPartition ones{{1, 1}};
  auto swapped = block_row_op(x, ones, BlockOp::swap_blocks(0, 1));
  CHECK(swapped == RingMatrix::from_ints(z8, {{3, 4}, {1, 2}}));
  auto cswapped = block_col_op(x, ones, BlockOp::swap_blocks(0, 1));
  CHECK(cswapped == RingMatrix::from_ints(z8, {{2, 1}, {4, 3}}));

  // scale(0, g) on partition [2,1] of a 3x3 over Z/4 replaces the first two
  // rows by g * (those rows).
  auto z4 = make_ring(2, 2);
  auto y = RingMatrix::from_ints(z4, {{1, 0, 2}, {0, 1, 3}, {1, 1, 1}});
  auto g = RingMatrix::from_ints(z4, {{1, 1}, {0, 1}});
  auto scaled = block_row_op(y, BlockPartition{{2, 1}}, BlockOp::scale_block(0, g));
  CHECK(scaled == RingMatrix::from_ints(z4, {{1, 1, 1}, {0, 1, 3}, {1, 1, 1}}));

  CHECK_THROWS(block_row_op(y, BlockPartition{{2, 2}}, BlockOp::swap_blocks(0, 1)),
               std::invalid_argument);
  CHECK_THROWS(block_row_op(y, BlockPartition{{2, 1}}, BlockOp::swap_blocks(0, 2)),
               std::invalid_argument);
  auto bad = RingMatrix::from_ints(z4, {{2, 0}, {0, 1}});
  CHECK_THROWS(block_row_op(y, BlockPartition{{2, 1}}, BlockOp::scale_block(0, bad)),
               std::invalid_argument);
}

BlockOp random_block_op(const RingPtr& ring, const BlockPartition& part, Rng& rng,
                        bool for_rows) {
  unsigned s = static_cast<unsigned>(part.sizes.size());
  while (true) {
    unsigned kind = static_cast<unsigned>(rng.below(3));
    unsigned i = static_cast<unsigned>(rng.below(s));
    unsigned j = static_cast<unsigned>(rng.below(s));
    if (kind == 0) {
      if (i == j) continue;
      return BlockOp::swap_blocks(i, j);
    }
    if (kind == 1) {
      RingMatrix g(ring, part.sizes[i], part.sizes[i]);
      do {
        for (auto& d : g.raw()) d = rng.below(ring->pk);
      } while (!is_invertible(g));
      return BlockOp::scale_block(i, g);
    }
    if (i == j) continue;
    unsigned ri = for_rows ? part.sizes[i] : part.sizes[j];
    unsigned ci = for_rows ? part.sizes[j] : part.sizes[i];
    RingMatrix a(ring, ri, ci);
    for (auto& d : a.raw()) d = rng.below(ring->pk);
    return BlockOp::add_multiple(i, j, a);
  }
}

void test_block_ops_are_multiplications() {
  auto z8 = make_ring(2, 3);
  Rng rng(23);
  BlockPartition part{{2, 1, 1}};
  for (int iter = 0; iter < 200; ++iter) {
    auto x = random_matrix(z8, 4, 4, rng);
    auto rop = random_block_op(z8, part, rng, true);
    auto u = block_row_matrix(z8, part, rop);
    CHECK(is_invertible(u));
    CHECK(block_row_op(x, part, rop) == mat_mul(u, x));

    auto cop = random_block_op(z8, part, rng, false);
    auto v = block_col_matrix(z8, part, cop);
    CHECK(is_invertible(v));
    CHECK(block_col_op(x, part, cop) == mat_mul(x, v));
  }
}

void test_block_transpose_duality() {
  auto z8 = make_ring(2, 3);
  Rng rng(29);
  BlockPartition part{{1, 2}};
  for (int iter = 0; iter < 100; ++iter) {
    auto x = random_matrix(z8, 3, 3, rng);
    auto op = random_block_op(z8, part, rng, true);
    BlockOp t_op = op;
    if (op.mat) t_op.mat = transpose(*op.mat);
    CHECK(transpose(block_row_op(transpose(x), part, op)) == block_col_op(x, part, t_op));
  }
}

void test_reduce_lift() {
  auto f2 = make_ring(2, 1);
  // Section property over all 16 matrices of Mat_2(F_2).
  for (unsigned code = 0; code < 16; ++code) {
    RingMatrix xb(f2, 2, 2);
    for (unsigned i = 0; i < 4; ++i) xb.raw()[i] = (code >> i) & 1;
    CHECK(reduce_mod(lift_canonical(xb, 3), 1) == xb);
  }

  auto one = RingMatrix::from_ints(f2, {{1}});
  auto lifted = lift_canonical(one, 3);
  CHECK_EQ(lifted.ring()->pk, 8u);
  CHECK(lifted == RingMatrix::from_ints(make_ring(2, 3), {{1}}));

  // A fixed residue matrix has exactly p^(N n^2) = 16 lifts one level up.
  auto xb = RingMatrix::from_ints(f2, {{1, 0}, {1, 1}});
  unsigned lifts = 0;
  auto z4 = make_ring(2, 2);
  for (unsigned code = 0; code < 256; ++code) {
    RingMatrix x(z4, 2, 2);
    for (unsigned i = 0; i < 4; ++i) x.raw()[i] = (code >> (2 * i)) & 3;
    if (reduce_mod(x, 1) == xb) ++lifts;
  }
  CHECK_EQ(lifts, 16u);

  CHECK_THROWS(reduce_mod(one, 2), std::invalid_argument);
  CHECK_THROWS(lift_canonical(lifted, 1), std::invalid_argument);
}

void test_poly_eval_commutes_with_reduction() {
  auto z8 = make_ring(2, 3);
  Rng rng(31);
  PolySpec P(2, {1, 1});
  for (int i = 0; i < 100; ++i) {
    auto x = random_matrix(z8, 3, 3, rng);
    CHECK(reduce_mod(poly_eval(P, x), 1) == poly_eval(P, reduce_mod(x, 1)));
  }
}

void test_text_roundtrip() {
  auto r = make_ring(2, 2, PolySpec(2, {1, 1}));
  Rng rng(37);
  for (int i = 0; i < 50; ++i) {
    auto x = random_matrix(r, 2, 3, rng);
    CHECK(RingMatrix::parse(r, x.str()) == x);
  }
  auto z4 = make_ring(2, 2);
  CHECK(RingMatrix::parse(z4, "0,1;1,1") == RingMatrix::from_ints(z4, {{0, 1}, {1, 1}}));
  CHECK_THROWS(RingMatrix::parse(z4, "0,1;1"), std::invalid_argument);
}

}  // namespace

int main() {
  test_arithmetic();
  test_poly_eval();
  test_invertibility();
  test_block_ops_scalar_cases();
  test_block_ops_are_multiplications();
  test_block_transpose_duality();
  test_reduce_lift();
  test_poly_eval_commutes_with_reduction();
  test_text_roundtrip();
  std::cout << "matrix_test: all tests passed\n";
  return 0;
}
