#include "cokmat/ring.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cokmat {

namespace {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Inverse of a mod m, gcd(a, m) = 1.  Bezout coefficients can exceed 63 bits
// transiently, hence the 128-bit accumulators.
std::uint64_t inv_mod_u64(std::uint64_t a, std::uint64_t m) {
  __int128 t0 = 0, t1 = 1;
  std::uint64_t r0 = m, r1 = a;
  while (r1 != 0) {
    std::uint64_t quo = r0 / r1;
    std::uint64_t r2 = r0 - quo * r1;
    r0 = r1;
    r1 = r2;
    __int128 t2 = t0 - static_cast<__int128>(quo) * t1;
    t0 = t1;
    t1 = t2;
  }
  // r0 == 1 by the unit precondition
  __int128 t = t0 % static_cast<__int128>(m);
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

// ---- F_p[t] helpers for the irreducibility check ------------------------
// Polynomials as trimmed coefficient vectors, low to high; empty = zero.

void trim(std::vector<std::uint64_t>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a by monic g, both over F_p.
std::vector<std::uint64_t> polfp_rem(std::vector<std::uint64_t> a,
                                     const std::vector<std::uint64_t>& g,
                                     std::uint64_t p) {
  std::size_t dg = g.size() - 1;
  while (a.size() > dg) {
    std::uint64_t c = a.back();
    std::size_t shift = a.size() - 1 - dg;
    if (c != 0) {
      for (std::size_t i = 0; i < dg; ++i) {
        std::uint64_t sub = c * g[i] % p;
        std::uint64_t& tgt = a[shift + i];
        tgt = (tgt + p - sub) % p;
      }
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

}  // namespace

NonUnitError::NonUnitError(unsigned valuation_, unsigned modulus_exponent)
    : std::domain_error("element is not a unit: valuation " + std::to_string(valuation_) +
                        " (modulus exponent " + std::to_string(modulus_exponent) + ")"),
      valuation(valuation_) {}

PrimePowerModulus::PrimePowerModulus(std::uint64_t p_, unsigned k_) : p(p_), k(k_) {
  if (p < 2 || p > (1u << 20))
    throw std::invalid_argument("prime modulus out of supported range: " + std::to_string(p));
  if (!is_prime_u64(p))
    throw std::invalid_argument("modulus base is not prime: " + std::to_string(p));
  if (k < 1) throw std::invalid_argument("modulus exponent must be >= 1");
  const std::uint64_t cap = std::uint64_t{1} << 62;
  pk = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (pk >= cap / p + 1 || pk * p >= cap)
      throw std::invalid_argument("p^k must stay below 2^62 (got p=" + std::to_string(p) +
                                  ", k=" + std::to_string(k) + ")");
    pk *= p;
  }
}

bool check_irreducible(const std::vector<long long>& coeffs, std::uint64_t p) {
  if (coeffs.size() < 2) throw std::domain_error("polynomial must have degree >= 1");
  if (coeffs.back() != 1)
    throw std::domain_error("polynomial must be monic (leading coefficient 1)");
  if (!is_prime_u64(p)) throw std::invalid_argument("p must be prime");
  unsigned d = static_cast<unsigned>(coeffs.size()) - 1;
  if (d == 1) return true;

  std::vector<std::uint64_t> f(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    long long r = coeffs[i] % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    f[i] = static_cast<std::uint64_t>(r);
  }

  // Trial division against every monic polynomial of degree <= d/2.  The
  // candidate count is sum of p^df; cap it so absurd inputs fail fast.
  std::uint64_t work = 0;
  std::uint64_t pow = 1;
  for (unsigned df = 1; df <= d / 2; ++df) {
    pow *= p;
    work += pow;
    if (work > (std::uint64_t{1} << 22))
      throw std::invalid_argument("irreducibility check out of supported range (p too large for this degree)");
  }
  pow = 1;
  for (unsigned df = 1; df <= d / 2; ++df) {
    pow *= p;
    std::vector<std::uint64_t> g(df + 1);
    g[df] = 1;
    for (std::uint64_t idx = 0; idx < pow; ++idx) {
      std::uint64_t rest = idx;
      for (unsigned i = 0; i < df; ++i) {
        g[i] = rest % p;
        rest /= p;
      }
      if (polfp_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

PolySpec::PolySpec(std::uint64_t p_, std::vector<long long> low_coeffs)
    : p(p_), coeffs(std::move(low_coeffs)) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial must have degree >= 1");
  if (coeffs.size() > kMaxPolyDegree)
    throw std::invalid_argument("polynomial degree above supported bound " +
                                std::to_string(kMaxPolyDegree));
  std::vector<long long> full = coeffs;
  full.push_back(1);
  if (!check_irreducible(full, p))
    throw std::invalid_argument("polynomial " + str() + " is not irreducible mod " +
                                std::to_string(p));
}

PolySpec PolySpec::parse(std::uint64_t p, const std::string& text) {
  std::vector<long long> full;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    long long v;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad polynomial coefficient '" + tok + "'");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size())
      throw std::invalid_argument("bad polynomial coefficient '" + tok + "'");
    full.push_back(v);
  }
  if (full.size() < 2)
    throw std::invalid_argument("polynomial list needs degree >= 1 (got '" + text + "')");
  if (full.back() != 1)
    throw std::invalid_argument("polynomial list must end with the leading coefficient 1");
  full.pop_back();
  return PolySpec(p, std::move(full));
}

std::vector<std::uint64_t> PolySpec::residue_coeffs() const {
  std::vector<std::uint64_t> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    long long r = coeffs[i] % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    out[i] = static_cast<std::uint64_t>(r);
  }
  return out;
}

std::string PolySpec::str() const {
  std::string s = "t^" + std::to_string(degree());
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (coeffs[i] == 0) continue;
    s += (coeffs[i] < 0 ? "-" : "+");
    long long a = coeffs[i] < 0 ? -coeffs[i] : coeffs[i];
    if (a != 1 || i == 0) s += std::to_string(a);
    if (i >= 1) {
      if (a != 1) s += "*";
      s += "t";
      if (i >= 2) s += "^" + std::to_string(i);
    }
  }
  return s;
}

ChainRing::ChainRing(const PrimePowerModulus& m, std::optional<PolySpec> ext_)
    : p(m.p), k(m.k), pk(m.pk), ext(std::move(ext_)) {
  deg = ext ? ext->degree() : 1;
  if (deg > kMaxPolyDegree)
    throw std::invalid_argument("extension degree above supported bound");
  if (ext && ext->p != p)
    throw std::invalid_argument("polynomial prime differs from modulus prime");
  if ((pk & (pk - 1)) == 0) pk_mask_ = pk - 1;
  pk_small_ = pk < (std::uint64_t{1} << 32);

  q = 1;
  for (unsigned i = 0; i < deg; ++i) {
    if (q > (std::uint64_t{1} << 62) / p)
      throw std::invalid_argument("residue field size p^deg out of supported range");
    q *= p;
  }

  if (ext) {
    poly.resize(deg);
    for (unsigned i = 0; i < deg; ++i) poly[i] = reduce_int(ext->coeffs[i]);
  } else {
    poly.assign(1, 0);  // presentation (Z/p^k)[t]/(t)
  }

  // Reduction rows: t^deg = -poly, then repeatedly multiply by t.
  if (deg >= 2) {
    tred_.assign(static_cast<std::size_t>(deg - 1) * deg, 0);
    std::vector<std::uint64_t> cur(deg);
    for (unsigned j = 0; j < deg; ++j) cur[j] = submod(0, poly[j]);
    std::copy(cur.begin(), cur.end(), tred_.begin());
    for (unsigned i = 1; i + 1 < deg; ++i) {
      std::uint64_t top = cur[deg - 1];
      std::vector<std::uint64_t> next(deg);
      next[0] = mulmod(top, tred_[0]);
      for (unsigned j = 1; j < deg; ++j)
        next[j] = addmod(cur[j - 1], mulmod(top, tred_[j]));
      cur = next;
      std::copy(cur.begin(), cur.end(), tred_.begin() + static_cast<std::size_t>(i) * deg);
    }
  }
}

void ChainRing::add_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const {
  for (unsigned i = 0; i < deg; ++i) out[i] = addmod(x[i], y[i]);
}

void ChainRing::sub_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const {
  for (unsigned i = 0; i < deg; ++i) out[i] = submod(x[i], y[i]);
}

void ChainRing::neg_into(const std::uint64_t* x, std::uint64_t* out) const {
  for (unsigned i = 0; i < deg; ++i) out[i] = submod(0, x[i]);
}

void ChainRing::mul_into(const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) const {
  if (deg == 1) {
    out[0] = mulmod(x[0], y[0]);
    return;
  }
  // Schoolbook convolution, then fold t^(deg+i) terms down via tred_.
  // Digits < 2^62, deg <= 8: every accumulator stays below 2^128.
  unsigned __int128 acc[2 * kMaxPolyDegree - 1] = {};
  for (unsigned i = 0; i < deg; ++i) {
    if (x[i] == 0) continue;
    for (unsigned j = 0; j < deg; ++j)
      acc[i + j] += static_cast<unsigned __int128>(x[i]) * y[j];
  }
  for (unsigned s = 2 * deg - 2; s >= deg; --s) {
    std::uint64_t c = static_cast<std::uint64_t>(acc[s] % pk);
    if (c != 0) {
      const std::uint64_t* row = tred_.data() + static_cast<std::size_t>(s - deg) * deg;
      for (unsigned j = 0; j < deg; ++j)
        acc[j] += static_cast<unsigned __int128>(c) * row[j];
    }
  }
  for (unsigned j = 0; j < deg; ++j) out[j] = static_cast<std::uint64_t>(acc[j] % pk);
}

void ChainRing::scalar_mul_into(const std::uint64_t* x, std::uint64_t c, std::uint64_t* out) const {
  for (unsigned i = 0; i < deg; ++i) out[i] = mulmod(x[i], c);
}

bool ChainRing::is_zero(const std::uint64_t* x) const {
  for (unsigned i = 0; i < deg; ++i)
    if (x[i] != 0) return false;
  return true;
}

bool ChainRing::is_unit(const std::uint64_t* x) const {
  for (unsigned i = 0; i < deg; ++i)
    if (x[i] % p != 0) return true;
  return false;
}

unsigned ChainRing::valuation(const std::uint64_t* x) const {
  unsigned v = k;
  for (unsigned i = 0; i < deg && v > 0; ++i) {
    unsigned dv = digit_val(x[i]);
    if (dv < v) v = dv;
  }
  return v;
}

void ChainRing::field_inverse_into(const std::uint64_t* x, std::uint64_t* out) const {
  // x^(q-2) in F_q by square-and-multiply; digits kept reduced mod p.
  std::uint64_t base[kMaxPolyDegree], res[kMaxPolyDegree], tmp[kMaxPolyDegree];
  for (unsigned i = 0; i < deg; ++i) base[i] = x[i] % p;
  for (unsigned i = 0; i < deg; ++i) res[i] = 0;
  res[0] = 1;
  std::uint64_t e = q - 2;
  while (e) {
    if (e & 1) {
      mul_into(res, base, tmp);
      for (unsigned i = 0; i < deg; ++i) res[i] = tmp[i] % p;
    }
    mul_into(base, base, tmp);
    for (unsigned i = 0; i < deg; ++i) base[i] = tmp[i] % p;
    e >>= 1;
  }
  for (unsigned i = 0; i < deg; ++i) out[i] = res[i];
}

void ChainRing::inverse_into(const std::uint64_t* x, std::uint64_t* out) const {
  unsigned v = valuation(x);
  if (v > 0) throw NonUnitError(v, k);
  if (deg == 1) {
    out[0] = inv_mod_u64(x[0], pk);
    return;
  }
  std::uint64_t y[kMaxPolyDegree], t1[kMaxPolyDegree], two[kMaxPolyDegree];
  field_inverse_into(x, y);
  for (unsigned i = 0; i < deg; ++i) two[i] = 0;
  two[0] = reduce_int(2);
  // Newton: y <- y(2 - xy) doubles p-adic precision each round.
  for (unsigned prec = 1; prec < k; prec *= 2) {
    mul_into(x, y, t1);
    sub_into(two, t1, t1);
    mul_into(y, t1, y);
  }
  for (unsigned i = 0; i < deg; ++i) out[i] = y[i];
}

void ChainRing::unit_part_into(const std::uint64_t* x, std::uint64_t* out) const {
  unsigned v = valuation(x);
  if (v >= k) throw std::invalid_argument("zero element has no unit decomposition");
  std::uint64_t pv = 1;
  for (unsigned i = 0; i < v; ++i) pv *= p;
  for (unsigned i = 0; i < deg; ++i) out[i] = x[i] / pv;  // exact: p^v divides every digit
}

std::uint64_t ChainRing::tbar() const {
  if (deg != 1) throw std::logic_error("tbar only defined for degree-1 presentations");
  return submod(0, poly[0]);
}

std::string ChainRing::format(const std::uint64_t* x) const {
  if (deg == 1) return std::to_string(x[0]);
  std::string s;
  for (unsigned i = 0; i < deg; ++i) {
    if (x[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(x[i]);
    } else {
      s += std::to_string(x[i]) + "*t";
      if (i >= 2) s += "^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

std::vector<std::uint64_t> ChainRing::parse(const std::string& text) const {
  std::vector<std::uint64_t> digits(deg, 0);
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty ring element");

  std::size_t i = 0;
  while (i < s.size()) {
    long long sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = (s[i] == '-') ? -1 : 1;
      ++i;
    }
    if (i >= s.size()) throw std::invalid_argument("dangling sign in '" + text + "'");
    long long coeff = 1;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      coeff = std::stoll(s.substr(i, j - i));
      have_coeff = true;
      i = j;
      if (i < s.size() && s[i] == '*') ++i;
    }
    unsigned power = 0;
    if (i < s.size() && s[i] == 't') {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) throw std::invalid_argument("bad exponent in '" + text + "'");
        power = static_cast<unsigned>(std::stoul(s.substr(i, j - i)));
        i = j;
      }
    } else if (!have_coeff) {
      throw std::invalid_argument("unexpected character '" + std::string(1, s[i]) + "' in '" +
                                  text + "'");
    }
    if (power >= deg)
      throw std::invalid_argument("term t^" + std::to_string(power) +
                                  " exceeds ring degree " + std::to_string(deg));
    if (i < s.size() && s[i] != '+' && s[i] != '-')
      throw std::invalid_argument("unexpected character '" + std::string(1, s[i]) + "' in '" +
                                  text + "'");
    std::uint64_t add = reduce_int(sign * coeff);
    digits[power] = addmod(digits[power], add);
  }
  return digits;
}

RingPtr make_ring(std::uint64_t p, unsigned k) {
  return std::make_shared<const ChainRing>(PrimePowerModulus(p, k), std::nullopt);
}

RingPtr make_ring(std::uint64_t p, unsigned k, const PolySpec& P) {
  return std::make_shared<const ChainRing>(PrimePowerModulus(p, k), P);
}

RingPtr with_precision(const RingPtr& ring, unsigned k_new) {
  if (ring->ext) return make_ring(ring->p, k_new, *ring->ext);
  return make_ring(ring->p, k_new);
}

bool same_ring(const ChainRing& a, const ChainRing& b) {
  return a.p == b.p && a.k == b.k && a.deg == b.deg && a.poly == b.poly;
}

// ---- ChainRingElement ----------------------------------------------------

ChainRingElement::ChainRingElement(RingPtr ring, const std::vector<long long>& digits)
    : ring_(std::move(ring)) {
  if (digits.size() != ring_->deg)
    throw std::invalid_argument("expected " + std::to_string(ring_->deg) + " digits, got " +
                                std::to_string(digits.size()));
  digits_.resize(ring_->deg);
  for (unsigned i = 0; i < ring_->deg; ++i) digits_[i] = ring_->reduce_int(digits[i]);
}

ChainRingElement::ChainRingElement(RingPtr ring, std::vector<std::uint64_t> raw, int)
    : ring_(std::move(ring)), digits_(std::move(raw)) {}

ChainRingElement ChainRingElement::from_int(RingPtr ring, long long value) {
  std::vector<std::uint64_t> d(ring->deg, 0);
  d[0] = ring->reduce_int(value);
  return ChainRingElement(std::move(ring), std::move(d), 0);
}

ChainRingElement ChainRingElement::parse(RingPtr ring, const std::string& text) {
  auto d = ring->parse(text);
  return ChainRingElement(std::move(ring), std::move(d), 0);
}

bool ChainRingElement::is_zero() const { return ring_->is_zero(digits_.data()); }
bool ChainRingElement::is_unit() const { return ring_->is_unit(digits_.data()); }
unsigned ChainRingElement::valuation() const { return ring_->valuation(digits_.data()); }

ChainRingElement ChainRingElement::inverse() const {
  std::vector<std::uint64_t> out(ring_->deg);
  ring_->inverse_into(digits_.data(), out.data());
  return ChainRingElement(ring_, std::move(out), 0);
}

ChainRingElement ChainRingElement::unit_part() const {
  std::vector<std::uint64_t> out(ring_->deg);
  ring_->unit_part_into(digits_.data(), out.data());
  return ChainRingElement(ring_, std::move(out), 0);
}

std::string ChainRingElement::str() const { return ring_->format(digits_.data()); }

namespace {
void require_same_ring(const ChainRingElement& a, const ChainRingElement& b) {
  if (!same_ring(*a.ring(), *b.ring()))
    throw std::invalid_argument("ring mismatch between operands");
}
}  // namespace

ChainRingElement operator+(const ChainRingElement& a, const ChainRingElement& b) {
  require_same_ring(a, b);
  std::vector<std::uint64_t> out(a.ring()->deg);
  a.ring()->add_into(a.digits().data(), b.digits().data(), out.data());
  return ChainRingElement(a.ring(), std::move(out), 0);
}

ChainRingElement operator-(const ChainRingElement& a, const ChainRingElement& b) {
  require_same_ring(a, b);
  std::vector<std::uint64_t> out(a.ring()->deg);
  a.ring()->sub_into(a.digits().data(), b.digits().data(), out.data());
  return ChainRingElement(a.ring(), std::move(out), 0);
}

ChainRingElement operator*(const ChainRingElement& a, const ChainRingElement& b) {
  require_same_ring(a, b);
  std::vector<std::uint64_t> out(a.ring()->deg);
  a.ring()->mul_into(a.digits().data(), b.digits().data(), out.data());
  return ChainRingElement(a.ring(), std::move(out), 0);
}

ChainRingElement ChainRingElement::operator-() const {
  std::vector<std::uint64_t> out(ring_->deg);
  ring_->neg_into(digits_.data(), out.data());
  return ChainRingElement(ring_, std::move(out), 0);
}

bool ChainRingElement::operator==(const ChainRingElement& o) const {
  return same_ring(*ring_, *o.ring_) && digits_ == o.digits_;
}

}  // namespace cokmat
