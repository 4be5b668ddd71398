#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Exact arithmetic in chain rings: Z/p^k and the unramified extensions
// (Z/p^k)[t]/(P(t)) with P monic and irreducible mod p.  The residue field is
// F_q, q = p^deg(P); taking k = 1 gives F_q itself, so one arithmetic path
// serves fields, scalar rings and extension rings alike.
//
// Elements are digit vectors c_0 + c_1 t + ... + c_{d-1} t^{d-1} with every
// digit reduced into [0, p^k).  Each nonzero element factors as unit * p^v
// because the ring is a quotient of a discrete valuation ring whose maximal
// ideal is generated by p; that factorization is what the normal-form code
// built on top relies on.  The zero element gets valuation k by convention.
//
// Construction rejects p^k >= 2^62, so a digit product always fits in
// unsigned 128-bit arithmetic and the hot kernels stay allocation-free.

namespace cokmat {

inline constexpr unsigned kMaxPolyDegree = 8;

// Thrown when inverting a non-unit; carries the offending valuation.
class NonUnitError : public std::domain_error {
 public:
  NonUnitError(unsigned valuation_, unsigned modulus_exponent);
  unsigned valuation;
};

// Validated modulus p^k.  p is checked prime by trial division; the intended
// scale is tiny primes, so anything above 2^20 is rejected as out of scope.
struct PrimePowerModulus {
  std::uint64_t p;
  unsigned k;
  std::uint64_t pk;

  PrimePowerModulus(std::uint64_t p_, unsigned k_);
};

// True iff the monic polynomial with coefficient list `coeffs` (low to high,
// leading 1 included) is irreducible mod p.  Decided by trial division
// against every monic polynomial of degree <= deg/2 over F_p; rejects
// non-monic input.
bool check_irreducible(const std::vector<long long>& coeffs, std::uint64_t p);

// Monic polynomial over a named prime: P(t) = t^d + a_{d-1} t^{d-1} + ... + a_0,
// stored as the lower coefficients a_0..a_{d-1}.  Construction verifies that
// the reduction mod p is irreducible.
struct PolySpec {
  std::uint64_t p = 0;
  std::vector<long long> coeffs;  // a_0..a_{d-1}, raw integers (may be negative)

  PolySpec(std::uint64_t p_, std::vector<long long> low_coeffs);

  // Parses the full list "a0,a1,...,1" including the leading 1.
  static PolySpec parse(std::uint64_t p, const std::string& text);

  unsigned degree() const { return static_cast<unsigned>(coeffs.size()); }

  // a_0..a_{d-1} reduced mod p.  Two specs of equal degree name the same
  // residue polynomial iff these agree (the pairwise-distinctness test).
  std::vector<std::uint64_t> residue_coeffs() const;

  std::string str() const;
};

class ChainRing;
using RingPtr = std::shared_ptr<const ChainRing>;

// Ring descriptor plus digit-span kernels.  Matrices store one RingPtr and a
// flat digit buffer; every operation below works on raw spans of length `deg`
// so the enumeration loops never allocate.
class ChainRing {
 public:
  std::uint64_t p;
  unsigned k;          // precision exponent: the ring is (Z/p^k)[t]/(P)
  std::uint64_t pk;    // p^k
  unsigned deg;        // deg P; 1 for the scalar ring Z/p^k
  std::uint64_t q;     // residue field size p^deg
  std::optional<PolySpec> ext;      // absent for the plain scalar ring
  std::vector<std::uint64_t> poly;  // a_0..a_{d-1} reduced mod p^k

  // --- single-digit helpers (operands already reduced into [0, pk)) ---
  std::uint64_t addmod(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;  // no overflow: both < 2^62
    return s >= pk ? s - pk : s;
  }
  std::uint64_t submod(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + (pk - b);
  }
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const {
    if (pk_mask_) return (a * b) & pk_mask_;  // p^k is a power of two
    if (pk_small_) return (a * b) % pk;       // product fits in 64 bits
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % pk);
  }
  // p-adic valuation of one digit, capped at k (digit 0 -> k).
  unsigned digit_val(std::uint64_t c) const {
    if (c == 0) return k;
    if (p == 2) {
      unsigned v = static_cast<unsigned>(__builtin_ctzll(c));
      return v < k ? v : k;
    }
    unsigned v = 0;
    while (c % p == 0) {
      c /= p;
      ++v;
    }
    return v < k ? v : k;
  }
  std::uint64_t reduce_int(long long v) const {
    long long r = v % static_cast<long long>(pk);
    if (r < 0) r += static_cast<long long>(pk);
    return static_cast<std::uint64_t>(r);
  }

  // --- span kernels; spans have length deg; aliasing of out with inputs is
  //     fine (mul accumulates internally before writing) ---
  void add_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const;
  void sub_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const;
  void neg_into(const std::uint64_t* x, std::uint64_t* out) const;
  void mul_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const;
  void scalar_mul_into(const std::uint64_t* x, std::uint64_t c, std::uint64_t* out) const;

  bool is_zero(const std::uint64_t* x) const;
  // A unit is anything nonzero in the residue field, i.e. some digit is
  // nonzero mod p.
  bool is_unit(const std::uint64_t* x) const;
  // min over digits of digit_val; k for the zero element.
  unsigned valuation(const std::uint64_t* x) const;

  // Inverse of a unit: invert in the residue field (power map x^(q-2)),
  // then Newton-lift y <- y(2 - xy) up to precision k.  The scalar ring
  // takes the extended-Euclid shortcut.  Throws NonUnitError otherwise.
  void inverse_into(const std::uint64_t* x, std::uint64_t* out) const;

  // For x != 0 writes the unit u with x = u * p^valuation(x), exactly
  // (every digit of x is divisible by p^v; u's digits are the quotients).
  void unit_part_into(const std::uint64_t* x, std::uint64_t* out) const;

  // The image of t in the scalar presentation; only meaningful for deg == 1,
  // where P = t + a_0 forces t == -a_0.
  std::uint64_t tbar() const;

  // Text form "c0+c1*t+c2*t^2+..." (zero terms omitted, "0" for zero).
  std::string format(const std::uint64_t* x) const;
  // Accepts the same grammar plus signs, bare "t", "t^e" and integer terms;
  // rejects powers >= deg.
  std::vector<std::uint64_t> parse(const std::string& text) const;

  ChainRing(const PrimePowerModulus& m, std::optional<PolySpec> ext_);

 private:
  std::uint64_t pk_mask_ = 0;  // pk - 1 when pk is a power of two, else 0
  bool pk_small_ = false;      // pk < 2^32
  // Row i holds t^(deg+i) reduced mod P, for i in [0, deg-2].
  std::vector<std::uint64_t> tred_;

  void field_inverse_into(const std::uint64_t* x, std::uint64_t* out) const;
};

RingPtr make_ring(std::uint64_t p, unsigned k);                     // Z/p^k
RingPtr make_ring(std::uint64_t p, unsigned k, const PolySpec& P);  // (Z/p^k)[t]/(P)
// Same presentation at precision k_new <= k (for reduce_mod / lift targets).
RingPtr with_precision(const RingPtr& ring, unsigned k_new);
bool same_ring(const ChainRing& a, const ChainRing& b);

// Convenience value type: one element carrying its ring.  Arithmetic checks
// ring compatibility and throws std::invalid_argument on mismatch.
class ChainRingElement {
 public:
  ChainRingElement(RingPtr ring, const std::vector<long long>& digits);
  static ChainRingElement from_int(RingPtr ring, long long value);
  static ChainRingElement parse(RingPtr ring, const std::string& text);

  const RingPtr& ring() const { return ring_; }
  const std::vector<std::uint64_t>& digits() const { return digits_; }

  bool is_zero() const;
  bool is_unit() const;
  unsigned valuation() const;
  ChainRingElement inverse() const;
  ChainRingElement unit_part() const;
  std::string str() const;

  friend ChainRingElement operator+(const ChainRingElement& a, const ChainRingElement& b);
  friend ChainRingElement operator-(const ChainRingElement& a, const ChainRingElement& b);
  friend ChainRingElement operator*(const ChainRingElement& a, const ChainRingElement& b);
  ChainRingElement operator-() const;
  bool operator==(const ChainRingElement& o) const;

 private:
  ChainRingElement(RingPtr ring, std::vector<std::uint64_t> raw, int);
  RingPtr ring_;
  std::vector<std::uint64_t> digits_;
};

}  // namespace cokmat
