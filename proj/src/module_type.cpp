#include "cokmat/module_type.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "cokmat/ring.hpp"

namespace cokmat {

ModuleType::ModuleType(std::vector<std::pair<unsigned, unsigned>> parts_,
                       unsigned residue_degree_)
    : residue_degree(residue_degree_) {
  if (residue_degree == 0) throw std::invalid_argument("residue degree must be >= 1");
  std::map<unsigned, unsigned, std::greater<unsigned>> merged;
  for (const auto& [e, r] : parts_) {
    if (e == 0 || r == 0)
      throw std::invalid_argument("module type parts need exponent and multiplicity >= 1");
    merged[e] += r;
  }
  parts.assign(merged.begin(), merged.end());
}

ModuleType ModuleType::from_exponents(const std::vector<unsigned>& exps,
                                      unsigned residue_degree) {
  std::vector<std::pair<unsigned, unsigned>> parts;
  for (unsigned e : exps)
    if (e != 0) parts.emplace_back(e, 1);
  return ModuleType(std::move(parts), residue_degree);
}

ModuleType ModuleType::parse(const std::string& text, unsigned residue_degree) {
  std::string s;
  for (char c : text)
    if (!isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "0") return ModuleType(residue_degree);
  std::vector<std::pair<unsigned, unsigned>> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    // stoul would accept signs and trailing junk; insist on bare digit runs.
    auto number = [&](const std::string& field) -> unsigned {
      if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad module type token '" + tok + "' in '" + text + "'");
      try {
        unsigned long v = std::stoul(field);
        if (v > 1u << 20) throw std::out_of_range(field);
        return static_cast<unsigned>(v);
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("module type value out of range in '" + text + "'");
      }
    };
    auto caret = tok.find('^');
    if (caret == std::string::npos) {
      parts.emplace_back(number(tok), 1);
    } else {
      unsigned e = number(tok.substr(0, caret));
      parts.emplace_back(e, number(tok.substr(caret + 1)));
    }
  }
  if (parts.empty()) throw std::invalid_argument("empty module type '" + text + "'");
  return ModuleType(std::move(parts), residue_degree);
}

unsigned ModuleType::residue_rank() const {
  unsigned s = 0;
  for (const auto& [e, r] : parts) s += r;
  return s;
}

unsigned ModuleType::order_log_q() const {
  unsigned s = 0;
  for (const auto& [e, r] : parts) s += e * r;
  return s;
}

unsigned ModuleType::exponent() const { return parts.empty() ? 0 : parts.front().first; }

bool ModuleType::annihilated_by(unsigned n) const { return exponent() <= n; }

ModuleType ModuleType::quotient_mod_p() const {
  if (trivial()) return *this;
  return ModuleType({{1, residue_rank()}}, residue_degree);
}

std::string ModuleType::str() const {
  if (trivial()) return "0";
  std::string s;
  for (const auto& [e, r] : parts) {
    if (!s.empty()) s += ",";
    s += std::to_string(e) + "^" + std::to_string(r);
  }
  return s;
}

bool ModuleType::operator<(const ModuleType& o) const {
  if (residue_degree != o.residue_degree) return residue_degree < o.residue_degree;
  return parts < o.parts;
}

namespace {

// Smallest-coefficient monic irreducible of degree d over F_p, used to give
// the oracle a concrete ring when q = p^d with d >= 2.
PolySpec canonical_irreducible(std::uint64_t p, unsigned d) {
  std::vector<long long> low(d, 0);
  while (true) {
    std::vector<long long> full = low;
    full.push_back(1);
    if (check_irreducible(full, p)) return PolySpec(p, low);
    unsigned i = 0;
    while (i < d) {
      if (++low[i] < static_cast<long long>(p)) break;
      low[i] = 0;
      ++i;
    }
    if (i == d) throw std::logic_error("no irreducible polynomial found");  // cannot happen
  }
}

}  // namespace

unsigned long long brute_force_aut_count(const ModuleType& g, std::uint64_t q) {
  // Factor q = p^d.
  std::uint64_t p = 0;
  for (std::uint64_t c = 2; c * c <= q; ++c)
    if (q % c == 0) {
      p = c;
      break;
    }
  if (p == 0) p = q;  // q prime
  unsigned d = 0;
  std::uint64_t rest = q;
  while (rest > 1) {
    if (rest % p != 0) throw std::invalid_argument("q must be a prime power");
    rest /= p;
    ++d;
  }
  if (q < 2) throw std::invalid_argument("q must be a prime power");

  if (g.trivial()) return 1;

  const unsigned e1 = g.exponent();
  RingPtr S = d == 1 ? make_ring(p, e1) : make_ring(p, e1, canonical_irreducible(p, d));

  // Expand to one slot per cyclic component, exponents descending.
  std::vector<unsigned> eps;
  for (const auto& [e, r] : g.parts)
    for (unsigned i = 0; i < r; ++i) eps.push_back(e);
  const unsigned t = static_cast<unsigned>(eps.size());
  const unsigned dd = S->deg;

  // p^e lookup.
  std::vector<std::uint64_t> ppow(e1 + 1, 1);
  for (unsigned i = 1; i <= e1; ++i) ppow[i] = ppow[i - 1] * p;

  // Work estimate: candidates = q^(sum of min(e_a,e_b)), each applied to all
  // |G| elements with t^2 ring multiplications.
  long double cand = 1.0L;
  for (unsigned a = 0; a < t; ++a)
    for (unsigned b = 0; b < t; ++b)
      for (unsigned i = 0; i < std::min(eps[a], eps[b]); ++i) cand *= static_cast<long double>(q);
  long double order = 1.0L;
  for (unsigned i = 0; i < g.order_log_q(); ++i) order *= static_cast<long double>(q);
  const long double budget = static_cast<long double>(1ULL << 28);
  if (cand * order * t * t > budget)
    throw ScaleExceeded("scale exceeded: automorphism oracle budget for type " + g.str() +
                        " (q=" + std::to_string(q) + ")");
  const std::uint64_t n_cand = static_cast<std::uint64_t>(cand + 0.5L);
  const std::uint64_t n_elem = static_cast<std::uint64_t>(order + 0.5L);

  // Pre-decode every element of G: digit tuples, component-major.
  std::vector<std::uint64_t> elems(static_cast<std::size_t>(n_elem) * t * dd);
  for (std::uint64_t idx = 0; idx < n_elem; ++idx) {
    std::uint64_t rest_i = idx;
    std::uint64_t* v = elems.data() + static_cast<std::size_t>(idx) * t * dd;
    for (unsigned a = 0; a < t; ++a)
      for (unsigned i = 0; i < dd; ++i) {
        v[a * dd + i] = rest_i % ppow[eps[a]];
        rest_i /= ppow[eps[a]];
      }
  }

  // Candidate state: per (a,b) entry, dd base-p^min digits z, plus the entry
  // value x = z * p^(e_a - min) held ready for multiplication.
  struct Slot {
    std::uint64_t radix;  // p^min(e_a,e_b)
    std::uint64_t shift;  // p^(e_a - min)
  };
  std::vector<Slot> slots(static_cast<std::size_t>(t) * t);
  for (unsigned a = 0; a < t; ++a)
    for (unsigned b = 0; b < t; ++b) {
      unsigned mn = std::min(eps[a], eps[b]);
      slots[a * t + b] = {ppow[mn], ppow[eps[a] - mn]};
    }
  std::vector<std::uint64_t> z(static_cast<std::size_t>(t) * t * dd, 0);
  std::vector<std::uint64_t> x(static_cast<std::size_t>(t) * t * dd, 0);

  std::vector<std::uint32_t> stamp(n_elem, 0);
  std::uint32_t epoch = 0;
  std::vector<std::uint64_t> y(static_cast<std::size_t>(t) * dd);
  std::uint64_t tmp[kMaxPolyDegree];

  unsigned long long aut = 0;
  for (std::uint64_t ci = 0; ci < n_cand; ++ci) {
    if (ci > 0) {
      // Odometer step over the z digits.
      std::size_t pos = 0;
      while (true) {
        std::size_t slot_idx = pos / dd;
        if (++z[pos] < slots[slot_idx].radix) {
          x[pos] = z[pos] * slots[slot_idx].shift;
          break;
        }
        z[pos] = 0;
        x[pos] = 0;
        ++pos;
      }
    }
    ++epoch;
    bool bijective = true;
    for (std::uint64_t idx = 0; idx < n_elem && bijective; ++idx) {
      const std::uint64_t* v = elems.data() + static_cast<std::size_t>(idx) * t * dd;
      for (unsigned a = 0; a < t; ++a) {
        std::uint64_t* ya = y.data() + static_cast<std::size_t>(a) * dd;
        for (unsigned i = 0; i < dd; ++i) ya[i] = 0;
        for (unsigned b = 0; b < t; ++b) {
          const std::uint64_t* xe = x.data() + (static_cast<std::size_t>(a) * t + b) * dd;
          S->mul_into(xe, v + static_cast<std::size_t>(b) * dd, tmp);
          S->add_into(ya, tmp, ya);
        }
        for (unsigned i = 0; i < dd; ++i) ya[i] %= ppow[eps[a]];
      }
      // Encode the image and check for a collision.
      std::uint64_t code = 0, mult = 1;
      for (unsigned a = 0; a < t; ++a)
        for (unsigned i = 0; i < dd; ++i) {
          code += y[static_cast<std::size_t>(a) * dd + i] * mult;
          mult *= ppow[eps[a]];
        }
      if (stamp[code] == epoch) {
        bijective = false;
      } else {
        stamp[code] = epoch;
      }
    }
    if (bijective) ++aut;
  }
  return aut;
}

std::vector<ModuleType> all_module_types(unsigned max_log, unsigned max_exponent,
                                         unsigned residue_degree) {
  std::vector<ModuleType> out;
  std::vector<unsigned> current;  // nonincreasing exponent list
  // Enumerate partitions of every total <= max_log with parts <= cap.
  auto rec = [&](auto&& self, unsigned remaining, unsigned max_part) -> void {
    out.push_back(ModuleType::from_exponents(current, residue_degree));
    for (unsigned part = std::min(remaining, max_part); part >= 1; --part) {
      current.push_back(part);
      self(self, remaining - part, part);
      current.pop_back();
    }
  };
  unsigned cap = max_exponent == 0 ? max_log : max_exponent;
  rec(rec, max_log, cap);
  // Each partition is emitted exactly once; sort only to fix the output order.
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cokmat
