#include "cokmat/ring.hpp"

#include "test_util.hpp"

using namespace cokmat;
using testutil::Rng;

namespace {

ChainRingElement fi(const RingPtr& r, long long v) { return ChainRingElement::from_int(r, v); }

ChainRingElement random_element(const RingPtr& r, Rng& rng) {
  std::vector<long long> d(r->deg);
  for (auto& x : d) x = static_cast<long long>(rng.below(r->pk));
  return ChainRingElement(r, d);
}

// All elements of a small ring, by digit odometer.
std::vector<ChainRingElement> all_elements(const RingPtr& r) {
  std::vector<ChainRingElement> out;
  std::vector<long long> d(r->deg, 0);
  while (true) {
    out.emplace_back(r, d);
    unsigned i = 0;
    while (i < r->deg) {
      if (++d[i] < static_cast<long long>(r->pk)) break;
      d[i] = 0;
      ++i;
    }
    if (i == r->deg) break;
  }
  return out;
}

void test_modulus_validation() {
  CHECK_THROWS(PrimePowerModulus(4, 1), std::invalid_argument);
  CHECK_THROWS(PrimePowerModulus(1, 1), std::invalid_argument);
  CHECK_THROWS(PrimePowerModulus(2, 0), std::invalid_argument);
  CHECK_THROWS(PrimePowerModulus(2, 63), std::invalid_argument);  // 2^63 >= 2^62
  PrimePowerModulus m(3, 4);
  CHECK_EQ(m.pk, 81u);
}

void test_add_examples() {
  auto z8 = make_ring(2, 3);
  CHECK_EQ((fi(z8, 3) + fi(z8, 7)).str(), "2");

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    auto x = random_element(z8, rng);
    CHECK(x + fi(z8, 0) == x);
  }

  auto r = make_ring(2, 2, PolySpec(2, {1, 1}));  // (Z/4)[t]/(t^2+t+1)
  auto a = ChainRingElement(r, {1, 1});
  auto b = ChainRingElement(r, {3, 3});
  CHECK((a + b).is_zero());
}

void test_mul_examples() {
  auto r = make_ring(2, 2, PolySpec(2, {1, 1}));
  auto t = ChainRingElement(r, {0, 1});
  CHECK_EQ((t * t).str(), "3+3*t");  // t^2 = -t-1

  auto z8 = make_ring(2, 3);
  CHECK((fi(z8, 2) * fi(z8, 4)).is_zero());

  auto f4 = make_ring(2, 1, PolySpec(2, {1, 1}));
  auto tf = ChainRingElement(f4, {0, 1});
  auto tf1 = ChainRingElement(f4, {1, 1});
  CHECK_EQ((tf * tf1).str(), "1");  // norm of a generator of F_4
}

void test_inverse_examples() {
  auto z8 = make_ring(2, 3);
  CHECK_EQ(fi(z8, 3).inverse().str(), "3");

  bool caught = false;
  try {
    fi(z8, 2).inverse();
  } catch (const NonUnitError& e) {
    caught = true;
    CHECK_EQ(e.valuation, 1u);
  }
  CHECK(caught);

  auto r = make_ring(2, 2, PolySpec(2, {1, 1}));
  auto t = ChainRingElement(r, {0, 1});
  CHECK_EQ(t.inverse().str(), "3+3*t");
  CHECK_EQ((t * t.inverse()).str(), "1");
}

void test_valuation_examples() {
  auto z16 = make_ring(2, 4);
  CHECK_EQ(fi(z16, 12).valuation(), 2u);
  CHECK_EQ(fi(z16, 0).valuation(), 4u);

  auto r8 = make_ring(2, 3, PolySpec(2, {1, 1}));  // (Z/8)[t]/(t^2+t+1)
  CHECK_EQ(ChainRingElement(r8, {2, 6}).valuation(), 1u);
}

void test_irreducibility() {
  CHECK(check_irreducible({1, 1, 1}, 2));      // t^2+t+1
  CHECK(!check_irreducible({1, 0, 1}, 2));     // t^2+1 = (t+1)^2
  CHECK(check_irreducible({1, 1, 0, 1}, 2));   // t^3+t+1
  CHECK(!check_irreducible({0, 1, 0, 1}, 2));  // t^3+t = t(t^2+1)
  CHECK(check_irreducible({1, 2, 0, 1}, 3));   // t^3+2t+1 has no root mod 3
  CHECK(check_irreducible({-1, 1}, 5));        // linear is always irreducible
  CHECK_THROWS(check_irreducible({1, 1, 2}, 2), std::domain_error);  // non-monic
  CHECK_THROWS(PolySpec(2, {1, 0}), std::invalid_argument);          // t^2+1 rejected
}

void test_ring_axioms() {
  std::vector<RingPtr> rings = {
      make_ring(2, 3),
      make_ring(3, 2),
      make_ring(2, 2, PolySpec(2, {1, 1})),
      make_ring(3, 2, PolySpec(3, {1, 2, 0})),  // cubic extension of Z/9
      make_ring(2, 1, PolySpec(2, {1, 1})),        // F_4
  };
  Rng rng(11);
  for (const auto& r : rings) {
    for (int i = 0; i < 10000; ++i) {
      auto a = random_element(r, rng);
      auto b = random_element(r, rng);
      auto c = random_element(r, rng);
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a * b == b * a);
      CHECK(a + b == b + a);
      CHECK(a - b == -(b - a));
    }
  }
}

void test_units_and_decomposition() {
  std::vector<RingPtr> rings = {make_ring(2, 3), make_ring(2, 2, PolySpec(2, {1, 1}))};
  for (const auto& r : rings) {
    for (const auto& x : all_elements(r)) {
      if (x.is_unit()) {
        CHECK_EQ((x * x.inverse()).str(), "1");
        CHECK_EQ(x.valuation(), 0u);
      }
      if (!x.is_zero()) {
        auto u = x.unit_part();
        CHECK(u.is_unit());
        // reconstruct x = u * p^v
        long long pv = 1;
        for (unsigned i = 0; i < x.valuation(); ++i) pv *= static_cast<long long>(r->p);
        CHECK(u * fi(r, pv) == x);
      } else {
        CHECK_EQ(x.valuation(), r->k);
      }
    }
  }
}

void test_valuation_product_rule() {
  std::vector<RingPtr> rings = {make_ring(2, 3), make_ring(2, 2, PolySpec(2, {1, 1}))};
  for (const auto& r : rings) {
    auto elems = all_elements(r);
    for (const auto& a : elems)
      for (const auto& b : elems) {
        unsigned expect = std::min(a.valuation() + b.valuation(), r->k);
        CHECK_EQ((a * b).valuation(), expect);
      }
  }
}

void test_reduction_homomorphism() {
  // Z/8 -> Z/4 and (Z/8)[t]/(P) -> (Z/4)[t]/(P): entrywise digit reduction
  // commutes with + and *.
  std::vector<RingPtr> big = {make_ring(2, 3), make_ring(2, 3, PolySpec(2, {1, 1}))};
  for (const auto& r : big) {
    auto s = with_precision(r, 2);
    auto reduce = [&](const ChainRingElement& x) {
      std::vector<long long> d(x.digits().begin(), x.digits().end());
      return ChainRingElement(s, d);  // constructor reduces mod 4
    };
    auto elems = all_elements(r);
    for (const auto& a : elems)
      for (const auto& b : elems) {
        CHECK(reduce(a + b) == reduce(a) + reduce(b));
        CHECK(reduce(a * b) == reduce(a) * reduce(b));
      }
  }
}

void test_text_forms() {
  auto r = make_ring(2, 3, PolySpec(2, {1, 1, 0}));  // cubic, Z/8 digits
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto x = random_element(r, rng);
    CHECK(ChainRingElement::parse(r, x.str()) == x);
  }
  CHECK(ChainRingElement::parse(r, "t^2+5") == ChainRingElement(r, {5, 0, 1}));
  CHECK(ChainRingElement::parse(r, "-1") == ChainRingElement(r, {7, 0, 0}));
  CHECK(ChainRingElement::parse(r, "2*t+3*t") == ChainRingElement(r, {0, 5, 0}));
  CHECK_THROWS(ChainRingElement::parse(r, "t^3"), std::invalid_argument);
  CHECK_THROWS(ChainRingElement::parse(r, "x+1"), std::invalid_argument);

  CHECK_EQ(PolySpec::parse(2, "1,1,1").degree(), 2u);
  CHECK_THROWS(PolySpec::parse(2, "1,1,2"), std::invalid_argument);
  CHECK_THROWS(PolySpec::parse(2, "1"), std::invalid_argument);
}

void test_ring_mismatch() {
  auto a = fi(make_ring(2, 3), 1);
  auto b = fi(make_ring(2, 2), 1);
  CHECK_THROWS(a + b, std::invalid_argument);
  auto c = ChainRingElement(make_ring(2, 3, PolySpec(2, {1, 1})), {1, 0});
  CHECK_THROWS(a * c, std::invalid_argument);
}

}  // namespace

int main() {
  test_modulus_validation();
  test_add_examples();
  test_mul_examples();
  test_inverse_examples();
  test_valuation_examples();
  test_irreducibility();
  test_ring_axioms();
  test_units_and_decomposition();
  test_valuation_product_rule();
  test_reduction_homomorphism();
  test_text_forms();
  test_ring_mismatch();
  std::cout << "ring_test: all tests passed\n";
  return 0;
}
