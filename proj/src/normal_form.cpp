#include "cokmat/normal_form.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace cokmat {

namespace {

// Digitwise exact division by p^v; callers guarantee valuation(x) >= v, which
// makes every digit divisible.
inline void shift_down(const ChainRing& R, std::uint64_t* x, unsigned v, std::uint64_t pv) {
  if (v == 0) return;
  if (R.p == 2) {
    for (unsigned i = 0; i < R.deg; ++i) x[i] >>= v;
  } else {
    for (unsigned i = 0; i < R.deg; ++i) x[i] /= pv;
  }
}

// One routine for both the exponents-only hot path and the transform-carrying
// path: lbuf/rbuf, when non-null, are n x n identity buffers that accumulate
// the row and column operations.  The working matrix `w` is fully reduced to
// diag(p^{d_i}) either way.
void snf_core(const ChainRing& R, std::uint64_t* w, unsigned n, unsigned* out,
              std::uint64_t* lbuf, std::uint64_t* rbuf) {
  const unsigned d = R.deg;
  const std::size_t ent = d;  // digits per entry
  auto at = [&](std::uint64_t* buf, unsigned r, unsigned c) {
    return buf + (static_cast<std::size_t>(r) * n + c) * ent;
  };

  std::uint64_t ppow[64];
  ppow[0] = 1;
  for (unsigned i = 1; i <= R.k; ++i) ppow[i] = ppow[i - 1] * R.p;

  std::uint64_t uinv[kMaxPolyDegree], m[kMaxPolyDegree], t1[kMaxPolyDegree];

  for (unsigned pos = 0; pos < n; ++pos) {
    // Minimal-valuation entry of the active block, row-major tie-break.  The
    // exponents are nondecreasing, so the previous one is a reachable floor.
    const unsigned floor_v = pos == 0 ? 0 : out[pos - 1];
    unsigned best_v = R.k, bi = pos, bj = pos;
    bool found = false;
    for (unsigned i = pos; i < n && !found; ++i)
      for (unsigned j = pos; j < n; ++j) {
        unsigned v = R.valuation(at(w, i, j));
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
          if (v == floor_v) {
            found = true;
            break;
          }
        }
      }
    if (best_v >= R.k) {
      // Only zero entries remain (valuation k is exactly the zero element).
      for (unsigned i = pos; i < n; ++i) out[i] = R.k;
      return;
    }
    const unsigned v = best_v;
    out[pos] = v;

    if (bi != pos) {
      // Swap rows pos and bi.  Active columns suffice for w (earlier columns
      // of both rows are zero); transform rows swap in full.
      std::swap_ranges(at(w, pos, pos), at(w, pos, n), at(w, bi, pos));
      if (lbuf) std::swap_ranges(at(lbuf, pos, 0), at(lbuf, pos, n), at(lbuf, bi, 0));
    }
    if (bj != pos) {
      for (unsigned i = pos; i < n; ++i)
        std::swap_ranges(at(w, i, pos), at(w, i, pos) + ent, at(w, i, bj));
      if (rbuf)
        for (unsigned i = 0; i < n; ++i)
          std::swap_ranges(at(rbuf, i, pos), at(rbuf, i, pos) + ent, at(rbuf, i, bj));
    }

    // Normalize the pivot row so the pivot becomes exactly p^v.
    R.unit_part_into(at(w, pos, pos), t1);
    R.inverse_into(t1, uinv);
    for (unsigned c = pos + 1; c < n; ++c) R.mul_into(at(w, pos, c), uinv, at(w, pos, c));
    std::uint64_t* piv = at(w, pos, pos);
    piv[0] = ppow[v];
    for (unsigned i = 1; i < d; ++i) piv[i] = 0;
    if (lbuf)
      for (unsigned c = 0; c < n; ++c) R.mul_into(at(lbuf, pos, c), uinv, at(lbuf, pos, c));

    // Clear the column: row_r -= (entry / p^v) * row_pos.  Quotients are
    // exact because v is the minimal valuation in the block.
    for (unsigned r = pos + 1; r < n; ++r) {
      std::uint64_t* e = at(w, r, pos);
      if (R.is_zero(e)) continue;
      std::memcpy(m, e, ent * sizeof(std::uint64_t));
      shift_down(R, m, v, ppow[v]);
      for (unsigned c = pos + 1; c < n; ++c) {
        R.mul_into(m, at(w, pos, c), t1);
        R.sub_into(at(w, r, c), t1, at(w, r, c));
      }
      if (lbuf)
        for (unsigned c = 0; c < n; ++c) {
          R.mul_into(m, at(lbuf, pos, c), t1);
          R.sub_into(at(lbuf, r, c), t1, at(lbuf, r, c));
        }
      for (unsigned i = 0; i < d; ++i) e[i] = 0;
    }

    // Clear the row; the column below the pivot is zero already, so this
    // touches nothing outside row pos.
    for (unsigned c = pos + 1; c < n; ++c) {
      std::uint64_t* e = at(w, pos, c);
      if (R.is_zero(e)) continue;
      std::memcpy(m, e, ent * sizeof(std::uint64_t));
      shift_down(R, m, v, ppow[v]);
      if (rbuf)
        for (unsigned i = 0; i < n; ++i) {
          R.mul_into(m, at(rbuf, i, pos), t1);
          R.sub_into(at(rbuf, i, c), t1, at(rbuf, i, c));
        }
      for (unsigned i = 0; i < d; ++i) e[i] = 0;
    }
  }
}

}  // namespace

void snf_exponents(const ChainRing& ring, const std::uint64_t* x, unsigned n,
                   std::uint64_t* work, unsigned* out) {
  std::memcpy(work, x, static_cast<std::size_t>(n) * n * ring.deg * sizeof(std::uint64_t));
  snf_core(ring, work, n, out, nullptr, nullptr);
}

SNFResult smith_normal_form(const RingMatrix& x, bool with_transforms) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("smith_normal_form needs a square matrix");
  const ChainRing& R = *x.ring();
  const unsigned n = x.rows();
  SNFResult res;
  res.exponents.resize(n);
  std::vector<std::uint64_t> work(x.raw());
  if (!with_transforms) {
    snf_core(R, work.data(), n, res.exponents.data(), nullptr, nullptr);
  } else {
    RingMatrix left = RingMatrix::identity(x.ring(), n);
    RingMatrix right = RingMatrix::identity(x.ring(), n);
    snf_core(R, work.data(), n, res.exponents.data(), left.raw().data(), right.raw().data());
    res.left = std::move(left);
    res.right = std::move(right);
  }
  return res;
}

CokernelClass classify_exponents(const ChainRing& ring, const unsigned* exps, unsigned n) {
  CokernelClass c;
  std::vector<unsigned> nonzero;
  for (unsigned i = 0; i < n; ++i) {
    if (exps[i] >= ring.k) c.saturated = true;
    if (exps[i] > 0) nonzero.push_back(exps[i]);
  }
  c.type = ModuleType::from_exponents(nonzero, ring.deg);
  return c;
}

CokernelClass cokernel_type(const RingMatrix& x) {
  SNFResult s = smith_normal_form(x, false);
  return classify_exponents(*x.ring(), s.exponents.data(), x.rows());
}

// ---- minor-gcd valuations ------------------------------------------------

namespace {

// Elements of Z[t]/(Ptilde) with exact integer coefficients, Ptilde the
// canonical monic lift of the ring modulus.  Irreducible mod p implies
// irreducible over Z, so this is an integral domain and minors are honest
// determinants in the valuation ring.
struct LiftRing {
  unsigned d;
  std::vector<mpz_class> pred;  // low coefficients of Ptilde (t^d = -sum pred_j t^j)

  using Poly = std::vector<mpz_class>;

  explicit LiftRing(const ChainRing& R) : d(R.deg), pred(R.deg) {
    for (unsigned j = 0; j < d; ++j)
      pred[j] = (j < R.poly.size()) ? mpz_class(R.poly[j]) : 0;
  }

  Poly zero() const { return Poly(d); }

  Poly mul(const Poly& a, const Poly& b) const {
    if (d == 1) return {a[0] * b[0]};
    std::vector<mpz_class> full(2 * d - 1);
    for (unsigned i = 0; i < d; ++i) {
      if (a[i] == 0) continue;
      for (unsigned j = 0; j < d; ++j) full[i + j] += a[i] * b[j];
    }
    for (unsigned s = 2 * d - 2; s >= d; --s) {
      if (full[s] == 0) continue;
      for (unsigned j = 0; j < d; ++j) full[s - d + j] -= full[s] * pred[j];
      full[s] = 0;
    }
    full.resize(d);
    return full;
  }

  void add_assign(Poly& a, const Poly& b) const {
    for (unsigned i = 0; i < d; ++i) a[i] += b[i];
  }
  void sub_assign(Poly& a, const Poly& b) const {
    for (unsigned i = 0; i < d; ++i) a[i] -= b[i];
  }
};

}  // namespace

std::vector<unsigned> minor_gcd_valuations(const RingMatrix& x) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("minor_gcd_valuations needs a square matrix");
  const unsigned n = x.rows();
  if (n > 6)
    throw std::invalid_argument("minor_gcd_valuations unsupported beyond dimension 6");
  const ChainRing& R = *x.ring();
  LiftRing L(R);
  const unsigned d = R.deg;

  // Canonical lift of every entry (digits are already least nonnegative).
  std::vector<LiftRing::Poly> a(static_cast<std::size_t>(n) * n, L.zero());
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j)
      for (unsigned l = 0; l < d; ++l) a[i * n + j][l] = x.entry(i, j)[l];

  const mpz_class pz = R.p;
  const unsigned kInf = ~0u;
  auto poly_val = [&](const LiftRing::Poly& c) -> unsigned {
    unsigned best = kInf;
    mpz_class t;
    for (unsigned l = 0; l < d; ++l) {
      if (c[l] == 0) continue;
      unsigned v = static_cast<unsigned>(mpz_remove(t.get_mpz_t(), c[l].get_mpz_t(), pz.get_mpz_t()));
      best = std::min(best, v);
    }
    return best;
  };

  std::vector<unsigned> out;
  std::vector<unsigned> rows_sel, cols_sel;
  for (unsigned sz = 1; sz <= n; ++sz) {
    const unsigned long long cap = static_cast<unsigned long long>(R.k) * sz;
    unsigned best = kInf;
    for (unsigned rmask = 0; rmask < (1u << n); ++rmask) {
      if (static_cast<unsigned>(__builtin_popcount(rmask)) != sz) continue;
      rows_sel.clear();
      for (unsigned i = 0; i < n; ++i)
        if (rmask & (1u << i)) rows_sel.push_back(i);
      for (unsigned cmask = 0; cmask < (1u << n); ++cmask) {
        if (static_cast<unsigned>(__builtin_popcount(cmask)) != sz) continue;
        // Laplace expansion along the selected rows, memoized on the column
        // subset still in play.
        std::unordered_map<unsigned, LiftRing::Poly> memo;
        auto det = [&](auto&& self, unsigned level, unsigned mask) -> LiftRing::Poly {
          if (level == sz) {
            LiftRing::Poly one = L.zero();
            one[0] = 1;
            return one;
          }
          auto it = memo.find(mask);
          if (it != memo.end()) return it->second;
          LiftRing::Poly acc = L.zero();
          unsigned idx = 0;
          for (unsigned j = 0; j < n; ++j) {
            if (!(mask & (1u << j))) continue;
            const LiftRing::Poly& e = a[rows_sel[level] * n + j];
            bool zero_entry = true;
            for (unsigned l = 0; l < d; ++l)
              if (e[l] != 0) {
                zero_entry = false;
                break;
              }
            if (!zero_entry) {
              LiftRing::Poly sub = self(self, level + 1, mask & ~(1u << j));
              LiftRing::Poly term = L.mul(e, sub);
              if (idx % 2 == 0)
                L.add_assign(acc, term);
              else
                L.sub_assign(acc, term);
            }
            ++idx;
          }
          memo.emplace(mask, acc);
          return acc;
        };
        unsigned v = poly_val(det(det, 0, cmask));
        best = std::min(best, v);
        if (best == 0) break;
      }
      if (best == 0) break;
    }
    unsigned long long capped = std::min<unsigned long long>(best, cap);
    out.push_back(static_cast<unsigned>(capped));
  }
  return out;
}

// ---- transport between Z/p^m and the extension ring ----------------------

RingMatrix shift_matrix(const RingMatrix& x, const PolySpec& P) {
  if (x.rows() != x.cols())
    throw std::invalid_argument("shift_matrix needs a square matrix");
  const ChainRing& R0 = *x.ring();
  if (R0.deg != 1)
    throw std::invalid_argument("shift_matrix starts from a matrix over Z/p^m");
  if (P.p != R0.p) throw std::invalid_argument("prime mismatch between matrix and polynomial");
  RingPtr Rm = make_ring(R0.p, R0.k, P);
  const unsigned n = x.rows();
  RingMatrix y(Rm, n, n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) y.entry(i, j)[0] = x.entry(i, j)[0];
  if (Rm->deg == 1) {
    const std::uint64_t tb = Rm->tbar();
    for (unsigned i = 0; i < n; ++i)
      y.entry(i, i)[0] = Rm->submod(y.entry(i, i)[0], tb);
  } else {
    for (unsigned i = 0; i < n; ++i) y.entry(i, i)[1] = Rm->pk - 1;  // minus t
  }
  return y;
}

CokernelClass cokernel_via_shift(const RingMatrix& x, const PolySpec& P) {
  return cokernel_type(shift_matrix(x, P));
}

ModuleType underlying_group(const ModuleType& g) {
  std::vector<std::pair<unsigned, unsigned>> parts;
  for (const auto& [e, r] : g.parts) parts.emplace_back(e, r * g.residue_degree);
  return ModuleType(std::move(parts), 1);
}

}  // namespace cokmat
