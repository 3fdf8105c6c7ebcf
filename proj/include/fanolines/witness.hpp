#pragma once

// Witness hypersurfaces and their certificates.
//
// Two families: the diagonal (Fermat) form sum t_j^d, and the cyclic chain
//   t_0 t_n^(d-1) + sum_{j<n} t_j^(d-1) t_{j+1}   (p | d),
// with an extra t_0^d when p divides n+1 (the plain chain is singular there).
// A hypersurface witnesses "no free lines" once some bihomogeneous component
// of g(s + t) vanishes identically; the vanishing analysis compares the
// computed zero set against the closed-form prediction for each family.

#include <atomic>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gf.hpp"
#include "mpoly.hpp"
#include "numerology.hpp"
#include "parallel.hpp"

namespace fanolines {

enum class Family { Fermat, Cyclic, None };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Fermat: return "fermat";
        case Family::Cyclic: return "cyclic";
        default: return "none";
    }
}

inline MPoly fermat_polynomial(uint32_t n, uint32_t d, FieldPtr F) {
    if (n < 1 || d < 1) throw std::invalid_argument("fermat needs n >= 1, d >= 1");
    if (d > UINT16_MAX) throw std::invalid_argument("degree too large");
    std::vector<std::pair<MPoly::Exps, Fq>> terms;
    for (uint32_t j = 0; j <= n; ++j) {
        MPoly::Exps e(n + 1, 0);
        e[j] = static_cast<uint16_t>(d);
        terms.emplace_back(std::move(e), F->one());
    }
    return MPoly::from_terms(std::move(F), n + 1, terms, d);
}

// True when the cyclic witness for (n, d) over characteristic p needs the
// extra diagonal term t_0^d.
inline bool cyclic_needs_tilde(uint32_t n, uint32_t p) { return (n + 1) % p == 0; }

inline MPoly cyclic_witness(uint32_t n, uint32_t d, FieldPtr F) {
    uint32_t p = F->characteristic();
    if (d < 2 || d % p != 0)
        throw std::invalid_argument("cyclic witness needs p | d and d >= 2");
    if (n < 2) throw std::invalid_argument("cyclic witness needs n >= 2");
    if (d > UINT16_MAX) throw std::invalid_argument("degree too large");
    std::vector<std::pair<MPoly::Exps, Fq>> terms;
    for (uint32_t j = 0; j <= n; ++j) {
        // m_j = t_j^(d-1) t_{j+1}, indices cyclic; j = n is the wrap term.
        MPoly::Exps e(n + 1, 0);
        e[j] = static_cast<uint16_t>(d - 1);
        uint32_t nxt = (j + 1) % (n + 1);
        e[nxt] = static_cast<uint16_t>(e[nxt] + 1);
        terms.emplace_back(std::move(e), F->one());
    }
    if (cyclic_needs_tilde(n, p)) {
        MPoly::Exps e(n + 1, 0);
        e[0] = static_cast<uint16_t>(d);
        terms.emplace_back(std::move(e), F->one());
    }
    return MPoly::from_terms(std::move(F), n + 1, terms, d);
}

// binom(d, ell) mod p through base-p digits: the product of digitwise
// binomials, zero as soon as some digit of ell exceeds the digit of d.
inline uint32_t lucas_binomial(uint64_t d, uint64_t ell, uint64_t p) {
    if (!detail::is_prime_u64(p)) throw std::invalid_argument("p must be prime");
    if (ell > d) return 0;
    uint64_t acc = 1;
    while (d || ell) {
        uint64_t dd = d % p, ld = ell % p;
        if (ld > dd) return 0;
        // binom(dd, ld) with dd < p; exact in 64 bits since p < 2^32.
        uint64_t b = 1;
        for (uint64_t i = 0; i < ld; ++i) { b = b * (dd - i); b /= (i + 1); }
        acc = acc * (b % p) % p;
        d /= p;
        ell /= p;
    }
    return static_cast<uint32_t>(acc);
}

struct VanishingReport {
    Family hint = Family::None;
    uint32_t n = 0;
    uint32_t d = 0;
    std::string field;
    std::vector<uint32_t> computed_zero_set;
    std::optional<std::vector<uint32_t>> predicted_zero_set;
    std::optional<bool> agree;
    std::optional<std::string> verdict;  // "NO_FREE_LINES_CERTIFIED"
};

// Zero set prediction for the cyclic chain: with v = val_p(d) + 1 and
// d = p^v a + r, a component can be nonzero only when its index lies in the
// classes {0..r} mod p^v; the tilde term can only contribute at multiples of
// p^(v-1).  The prediction is the forced-zero set, a subset of the computed
// zero set (the converse containment can fail, e.g. d = 10, p = 2, ell = 4).
inline std::vector<uint32_t> cyclic_forced_zeros(uint32_t n, uint32_t d, uint32_t p) {
    uint32_t v = p_adic_valuation(d, p).valuation + 1;
    uint64_t pv = 1;
    for (uint32_t i = 0; i < v; ++i) pv *= p;
    uint64_t r = d % pv;
    uint64_t pv1 = pv / p;
    bool tilde = cyclic_needs_tilde(n, p);
    std::vector<uint32_t> out;
    for (uint32_t ell = 0; ell <= d; ++ell) {
        if (ell % pv <= r) continue;
        if (tilde && ell % pv1 == 0) continue;
        out.push_back(ell);
    }
    return out;
}

inline VanishingReport analyze_vanishing(const MPoly& g, Family hint) {
    if (g.is_zero()) throw std::invalid_argument("vanishing analysis needs a nonzero polynomial");
    if (g.degree() < 2) throw std::invalid_argument("vanishing analysis needs degree >= 2");
    const FieldPtr& F = g.field();
    uint32_t p = F->characteristic();
    VanishingReport rep;
    rep.hint = hint;
    rep.n = g.nvars() - 1;
    rep.d = g.degree();
    rep.field = F->designation();
    for (const auto& comp : bihomogeneous_components(g))
        if (comp.poly.is_zero()) rep.computed_zero_set.push_back(comp.ell);
    if (hint == Family::Fermat) {
        std::vector<uint32_t> pred;
        for (uint32_t ell = 0; ell <= rep.d; ++ell)
            if (lucas_binomial(rep.d, ell, p) == 0) pred.push_back(ell);
        rep.agree = (pred == rep.computed_zero_set);
        rep.predicted_zero_set = std::move(pred);
    } else if (hint == Family::Cyclic) {
        if (rep.d % p != 0)
            throw std::invalid_argument("cyclic prediction needs p | d");
        std::vector<uint32_t> pred = cyclic_forced_zeros(rep.n, rep.d, p);
        // Forced zeros must appear among the computed zeros.
        bool ok = true;
        size_t at = 0;
        for (uint32_t ell : pred) {
            while (at < rep.computed_zero_set.size() && rep.computed_zero_set[at] < ell) ++at;
            if (at == rep.computed_zero_set.size() || rep.computed_zero_set[at] != ell) {
                ok = false;
                break;
            }
        }
        rep.agree = ok;
        rep.predicted_zero_set = std::move(pred);
    }
    if (!rep.computed_zero_set.empty()) rep.verdict = "NO_FREE_LINES_CERTIFIED";
    return rep;
}

// --- projective point enumeration -------------------------------------------

// Normalized representatives: leading coordinate (first nonzero) equals 1.
// Scan order: leading position ascending from 0; within a block the free tail
// counts base q with the coordinate right after the pivot varying fastest.
class PointEnumerator {
  public:
    PointEnumerator(uint32_t n, FieldPtr F) : n_(n), F_(std::move(F)) {
        uint64_t q = F_->size();
        block_.resize(n_ + 1);
        total_ = 0;
        // block i has q^(n-i) points; guard the total against overflow.
        for (uint32_t i = 0; i <= n_; ++i) {
            uint64_t b = 1;
            for (uint32_t t = 0; t < n_ - i; ++t) {
                if (b > UINT64_MAX / q) throw std::invalid_argument("point space too large");
                b *= q;
            }
            block_[i] = b;
            total_ += b;
        }
    }

    uint64_t count() const { return total_; }

    std::vector<Fq> at(uint64_t index) const {
        if (index >= total_) throw std::invalid_argument("point index out of range");
        uint32_t lead = 0;
        while (index >= block_[lead]) { index -= block_[lead]; ++lead; }
        std::vector<Fq> pt(n_ + 1, F_->zero());
        pt[lead] = F_->one();
        uint64_t q = F_->size();
        for (uint32_t j = lead + 1; j <= n_; ++j) {
            pt[j] = F_->element(index % q);
            index /= q;
        }
        return pt;
    }

  private:
    uint32_t n_;
    FieldPtr F_;
    std::vector<uint64_t> block_;
    uint64_t total_ = 0;
};

// --- smoothness scan ---------------------------------------------------------

struct SmoothnessVerdict {
    enum class Status { SingularFound, NoSingularUpTo, CertifiedSmooth };
    Status status = Status::NoSingularUpTo;
    std::vector<uint32_t> scanned_extension_degrees;  // absolute degrees over F_p
    std::optional<std::string> certificate;
    std::optional<std::vector<uint32_t>> witness_point;  // element indices
    std::optional<std::string> witness_field;
};

inline const char* to_string(SmoothnessVerdict::Status s) {
    switch (s) {
        case SmoothnessVerdict::Status::SingularFound: return "SINGULAR_FOUND";
        case SmoothnessVerdict::Status::CertifiedSmooth: return "CERTIFIED_SMOOTH";
        default: return "NO_SINGULAR_UP_TO";
    }
}

// All defining forms and all c x c Jacobian minors vanish at pt, i.e. the
// Jacobian has rank below c.  Rank via Gaussian elimination.
inline bool is_singular_point(const std::vector<MPoly>& polys,
                              const std::vector<std::vector<MPoly>>& jacobian,
                              const std::vector<Fq>& pt) {
    const FieldPtr& F = polys.front().field();
    for (const auto& g : polys)
        if (!F->is_zero(g.eval(pt))) return false;
    size_t c = polys.size(), m = pt.size();
    std::vector<std::vector<Fq>> mat(c, std::vector<Fq>(m));
    for (size_t i = 0; i < c; ++i)
        for (size_t j = 0; j < m; ++j) mat[i][j] = jacobian[i][j].eval(pt);
    size_t rank = 0;
    for (size_t col = 0; col < m && rank < c; ++col) {
        size_t pivot = rank;
        while (pivot < c && F->is_zero(mat[pivot][col])) ++pivot;
        if (pivot == c) continue;
        std::swap(mat[rank], mat[pivot]);
        Fq inv = F->inv(mat[rank][col]);
        for (size_t i = rank + 1; i < c; ++i) {
            if (F->is_zero(mat[i][col])) continue;
            Fq f = F->mul(mat[i][col], inv);
            for (size_t j = col; j < m; ++j)
                mat[i][j] = F->sub(mat[i][j], F->mul(f, mat[rank][j]));
        }
        ++rank;
    }
    return rank < c;
}

inline bool cyclic_identities_hold(uint32_t n, uint32_t d, uint32_t p);

// Exhaustive singular-point scan of the projective scheme cut out by polys
// over F_{q^k} for k = 1..k_max, reporting the first singular point in scan
// order over the smallest extension containing one.  A clean scan upgrades to
// CERTIFIED_SMOOTH for the diagonal family with p prime to d (nowhere-zero
// diagonal Jacobian); the cyclic family instead records the identity
// certificate and keeps the bounded-scan status.
inline SmoothnessVerdict jacobian_singular_scan(const std::vector<MPoly>& polys,
                                                uint32_t n, FieldPtr F,
                                                uint32_t k_max,
                                                unsigned threads = 1) {
    if (polys.empty()) throw std::invalid_argument("scan needs at least one polynomial");
    for (const auto& g : polys) {
        if (g.nvars() != n + 1) throw std::invalid_argument("polynomial/ambient mismatch");
        if (!(*g.field() == *F)) throw std::invalid_argument("polynomial field mismatch");
        if (g.is_zero()) throw std::invalid_argument("scan needs nonzero polynomials");
    }
    if (polys.size() > n) throw std::invalid_argument("too many defining forms");
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

    uint32_t p = F->characteristic(), k0 = F->extension_degree();
    SmoothnessVerdict verdict;
    for (uint32_t k = 1; k <= k_max; ++k) {
        FieldPtr Fk = (k == 1) ? F : Field::make(p, k * k0);
        std::vector<MPoly> polys_k;
        if (k == 1) {
            polys_k = polys;
        } else {
            FieldEmbedding phi(F, Fk);
            for (const auto& g : polys) polys_k.push_back(g.map_field(phi));
        }
        std::vector<std::vector<MPoly>> jac;
        for (const auto& g : polys_k) {
            std::vector<MPoly> row;
            for (uint32_t j = 0; j <= n; ++j) row.push_back(g.partial(j));
            jac.push_back(std::move(row));
        }
        PointEnumerator pts(n, Fk);
        if (pts.count() > 20'000'000)
            throw std::invalid_argument("field too large for exhaustive scan");
        std::atomic<uint64_t> best{UINT64_MAX};
        run_chunked(pts.count(), kDefaultChunk, threads,
                    [&](uint64_t chunk, uint64_t begin, uint64_t end) {
                        (void)chunk;
                        if (begin >= best.load()) return;
                        for (uint64_t i = begin; i < end; ++i) {
                            if (i >= best.load()) return;
                            if (is_singular_point(polys_k, jac, pts.at(i))) {
                                uint64_t cur = best.load();
                                while (i < cur && !best.compare_exchange_weak(cur, i)) {
                                }
                                return;
                            }
                        }
                    });
        verdict.scanned_extension_degrees.push_back(k * k0);
        if (best.load() != UINT64_MAX) {
            verdict.status = SmoothnessVerdict::Status::SingularFound;
            std::vector<Fq> pt = pts.at(best.load());
            std::vector<uint32_t> idx;
            for (Fq a : pt) idx.push_back(a.v);
            verdict.witness_point = std::move(idx);
            verdict.witness_field = Fk->designation();
            return verdict;
        }
    }

    verdict.status = SmoothnessVerdict::Status::NoSingularUpTo;
    if (polys.size() == 1) {
        const MPoly& g = polys.front();
        uint32_t d = g.degree();
        if (d >= 1 && d % p != 0 && g == fermat_polynomial(n, d, F)) {
            verdict.status = SmoothnessVerdict::Status::CertifiedSmooth;
            verdict.certificate = "fermat-diagonal-jacobian";
        } else if (d >= 2 && d % p == 0 && n >= 2 && g == cyclic_witness(n, d, F) &&
                   cyclic_identities_hold(n, d, p)) {
            verdict.certificate = "cyclic-identities";
        }
    }
    return verdict;
}

// --- cyclic identity certificate ----------------------------------------------

// Exact polynomial identities behind the cyclic family's smoothness argument,
// with m_j = t_j^(d-1) t_{j+1} (cyclic indices) and s = m_0:
//   (a) d/dt_i g = t_{i-1}^(d-1) - t_i^(d-2) t_{i+1}
//   (b) t_i d/dt_i g = m_{i-1} - m_i
//   (c) g_chain - (n+1) s = -sum_{i=1..n} (n+1-i) t_i d/dt_i g
// where g_chain is g minus its t_0^d term when the tilde branch fired.  (c)
// exhibits g as (n+1) s modulo the ideal (t_i d/dt_i g), the congruence the
// smoothness argument runs on.
inline bool cyclic_identities_hold(uint32_t n, uint32_t d, uint32_t p) {
    FieldPtr F = Field::make(p, 1);
    MPoly g = cyclic_witness(n, d, F);  // validates p | d, n >= 2

    auto monomial = [&](std::initializer_list<std::pair<uint32_t, uint32_t>> factors,
                        long long coeff) {
        MPoly::Exps e(n + 1, 0);
        uint32_t deg = 0;
        for (auto [var, exp] : factors) {
            e[var] = static_cast<uint16_t>(e[var] + exp);
            deg += exp;
        }
        return MPoly::from_terms(F, n + 1,
                                 {{std::move(e), F->from_int(coeff)}}, deg);
    };
    auto m = [&](uint32_t j) {
        uint32_t jj = j % (n + 1), nxt = (jj + 1) % (n + 1);
        return monomial({{jj, d - 1}, {nxt, 1}}, 1);
    };

    MPoly chain = g;
    if (cyclic_needs_tilde(n, p)) chain = chain.sub(monomial({{0u, d}}, 1));

    for (uint32_t i = 0; i <= n; ++i) {
        uint32_t prev = (i + n) % (n + 1), nxt = (i + 1) % (n + 1);
        MPoly expected = monomial({{prev, d - 1}}, 1)
                             .sub(monomial({{i, d - 2}, {nxt, 1}}, 1));
        if (g.partial(i) != expected) return false;
        MPoly euler_term = g.partial(i).mul_var(i);
        if (euler_term != m(prev).sub(m(i))) return false;
    }

    MPoly lhs = chain.sub(m(0).scale(F->from_int(static_cast<long long>(n) + 1)));
    MPoly rhs = MPoly::zero(F, n + 1, d);
    for (uint32_t i = 1; i <= n; ++i) {
        long long w = -static_cast<long long>(n + 1 - i);
        rhs = rhs.add(g.partial(i).mul_var(i).scale(F->from_int(w)));
    }
    return lhs == rhs;
}

// --- seeded random complete intersections --------------------------------------

namespace detail {

// Platform-stable bounded draw: mt19937_64 output rejected into a multiple of
// the bound, then reduced.
inline uint64_t draw_below(std::mt19937_64& rng, uint64_t bound) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    while (true) {
        uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

inline void monomials_of_degree(uint32_t nvars, uint32_t d,
                                std::vector<MPoly::Exps>& out) {
    MPoly::Exps cur(nvars, 0);
    // lex-ascending enumeration: leftmost exponent varies slowest from 0.
    std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t var, uint32_t rest) {
        if (var + 1 == nvars) {
            cur[var] = static_cast<uint16_t>(rest);
            out.push_back(cur);
            return;
        }
        for (uint32_t e = 0; e <= rest; ++e) {
            cur[var] = static_cast<uint16_t>(e);
            rec(var + 1, rest - e);
        }
        cur[var] = 0;
    };
    rec(0, d);
}

}  // namespace detail

// Complete intersection with one designated witness slot (the first degree
// >= p, diagonal when p is prime to it, cyclic otherwise) and dense seeded
// random forms in every other slot.  Deterministic in (profile, seed).
inline std::vector<MPoly> random_complete_intersection(const CIProfile& prof,
                                                       FieldPtr F,
                                                       uint64_t seed) {
    prof.validate();
    if (prof.degrees.size() < 2)
        throw std::invalid_argument("random complete intersection needs c >= 2");
    if (prof.p != 0 && prof.p != F->characteristic())
        throw std::invalid_argument("profile/field characteristic mismatch");
    uint32_t p = F->characteristic();
    size_t witness_slot = prof.degrees.size();
    for (size_t i = 0; i < prof.degrees.size(); ++i)
        if (prof.degrees[i] >= p) { witness_slot = i; break; }
    if (witness_slot == prof.degrees.size())
        throw std::invalid_argument("no degree reaches the characteristic; no witness family applies");

    std::mt19937_64 rng(seed);
    std::vector<MPoly> out;
    for (size_t i = 0; i < prof.degrees.size(); ++i) {
        if (prof.degrees[i] > 512) throw std::invalid_argument("degree too large for dense sampling");
        uint32_t d = static_cast<uint32_t>(prof.degrees[i]);
        if (i == witness_slot) {
            out.push_back(d % p == 0 ? cyclic_witness(prof.n, d, F)
                                     : fermat_polynomial(prof.n, d, F));
            continue;
        }
        std::vector<MPoly::Exps> monos;
        detail::monomials_of_degree(prof.n + 1, d, monos);
        std::vector<std::pair<MPoly::Exps, Fq>> terms;
        for (auto& e : monos) {
            Fq c = F->element(detail::draw_below(rng, F->size()));
            if (!F->is_zero(c)) terms.emplace_back(std::move(e), c);
        }
        out.push_back(MPoly::from_terms(F, prof.n + 1, terms, d));
    }
    return out;
}

}  // namespace fanolines
