#pragma once

// Finite fields F_{p^k} with a deterministic canonical modulus.
//
// Elements are stored as canonical indices: the index encodes the coefficient
// vector of the residue polynomial in base p, little endian, so index 0 is the
// additive identity, index 1 the multiplicative identity, and indices 0..p-1
// are the prime subfield in residue order.  Enumeration order is index order.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanolines {

// One element of a Field, identified by its canonical index.  The owning
// Field is implicit; mixing elements of distinct fields is a caller bug and
// is checked only where cheap.
struct Fq {
    uint32_t v = 0;
    friend bool operator==(Fq a, Fq b) { return a.v == b.v; }
    friend bool operator!=(Fq a, Fq b) { return a.v != b.v; }
    friend bool operator<(Fq a, Fq b) { return a.v < b.v; }
};

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
  public:
    // Builds F_{p^k}.  When no modulus is supplied the canonical one is used:
    // scanning m = 0, 1, 2, ... and reading the base-p digits of m as the
    // lower coefficients of a monic degree-k candidate, the first irreducible
    // candidate wins.  This makes every field designation reproducible.
    static FieldPtr make(uint32_t p, uint32_t k,
                         std::vector<uint32_t> modulus = {}) {
        return FieldPtr(new Field(p, k, std::move(modulus)));
    }

    // Accepts "p" (prime), "q" (prime power), or "p^k".
    static FieldPtr parse(const std::string& designation);

    uint32_t characteristic() const { return p_; }
    uint32_t extension_degree() const { return k_; }
    uint64_t size() const { return q_; }
    const std::vector<uint32_t>& modulus() const { return modulus_; }
    std::string designation() const {
        return k_ == 1 ? std::to_string(p_)
                       : std::to_string(p_) + "^" + std::to_string(k_);
    }

    bool operator==(const Field& o) const {
        return p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_;
    }

    Fq zero() const { return Fq{0}; }
    Fq one() const { return Fq{1}; }
    bool is_zero(Fq a) const { return a.v == 0; }

    Fq element(uint64_t index) const {
        if (index >= q_) throw std::invalid_argument("element index out of range");
        return Fq{static_cast<uint32_t>(index)};
    }

    // Integer embedding through the prime subfield.
    Fq from_int(long long x) const {
        long long r = x % static_cast<long long>(p_);
        if (r < 0) r += p_;
        return Fq{static_cast<uint32_t>(r)};
    }

    // All q elements, index order: 0, 1, 2, ...
    std::vector<Fq> enumerate() const {
        std::vector<Fq> out;
        out.reserve(q_);
        for (uint64_t i = 0; i < q_; ++i) out.push_back(Fq{static_cast<uint32_t>(i)});
        return out;
    }

    // Coefficient vector of the residue polynomial, length k, little endian.
    std::vector<uint32_t> coeffs(Fq a) const {
        std::vector<uint32_t> c(k_);
        uint64_t x = a.v;
        for (uint32_t i = 0; i < k_; ++i) { c[i] = static_cast<uint32_t>(x % p_); x /= p_; }
        return c;
    }

    Fq from_coeffs(const std::vector<uint32_t>& c) const {
        if (c.size() > k_) throw std::invalid_argument("coefficient vector too long");
        uint64_t x = 0;
        for (size_t i = c.size(); i-- > 0;) {
            if (c[i] >= p_) throw std::invalid_argument("coefficient out of range");
            x = x * p_ + c[i];
        }
        return Fq{static_cast<uint32_t>(x)};
    }

    Fq add(Fq a, Fq b) const {
        if (k_ == 1) {
            uint64_t s = static_cast<uint64_t>(a.v) + b.v;
            if (s >= p_) s -= p_;
            return Fq{static_cast<uint32_t>(s)};
        }
        if (p_ == 2) return Fq{a.v ^ b.v};
        uint64_t x = a.v, y = b.v, out = 0, mult = 1;
        for (uint32_t i = 0; i < k_; ++i) {
            uint64_t d = (x % p_) + (y % p_);
            if (d >= p_) d -= p_;
            out += d * mult;
            mult *= p_;
            x /= p_;
            y /= p_;
        }
        return Fq{static_cast<uint32_t>(out)};
    }

    Fq neg(Fq a) const {
        if (k_ == 1) return Fq{a.v == 0 ? 0 : p_ - a.v};
        if (p_ == 2) return a;
        uint64_t x = a.v, out = 0, mult = 1;
        for (uint32_t i = 0; i < k_; ++i) {
            uint64_t d = x % p_;
            out += (d == 0 ? 0 : p_ - d) * mult;
            mult *= p_;
            x /= p_;
        }
        return Fq{static_cast<uint32_t>(out)};
    }

    Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }

    Fq mul(Fq a, Fq b) const {
        if (k_ == 1)
            return Fq{static_cast<uint32_t>(static_cast<uint64_t>(a.v) * b.v % p_)};
        if (a.v == 0 || b.v == 0) return Fq{0};
        if (has_tables_) {
            uint64_t e = log_[a.v] + log_[b.v];
            if (e >= q_ - 1) e -= q_ - 1;
            return Fq{exp_[e]};
        }
        return mul_generic(a, b);
    }

    // Throws on zero: F_q has no inverse of 0.
    Fq inv(Fq a) const {
        if (a.v == 0) throw std::invalid_argument("zero has no multiplicative inverse");
        if (has_tables_) {
            uint64_t e = log_[a.v];
            return Fq{exp_[e == 0 ? 0 : q_ - 1 - e]};
        }
        if (k_ == 1) return pow(a, p_ - 2);
        return pow(a, q_ - 2);
    }

    Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }

    Fq pow(Fq a, uint64_t e) const {
        if (e == 0) return one();
        if (a.v == 0) return zero();
        if (has_tables_ && k_ > 1) {
            uint64_t le = (log_[a.v] % (q_ - 1)) * (e % (q_ - 1)) % (q_ - 1);
            return Fq{exp_[le]};
        }
        Fq base = a, acc = one();
        while (e) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }

  private:
    uint32_t p_, k_;
    uint64_t q_;
    std::vector<uint32_t> modulus_;  // length k+1, little endian, monic
    bool has_tables_ = false;
    std::vector<uint32_t> exp_, log_;

    Field(uint32_t p, uint32_t k, std::vector<uint32_t> modulus) : p_(p), k_(k) {
        if (!is_small_prime(p)) throw std::invalid_argument("characteristic must be prime");
        if (k < 1) throw std::invalid_argument("extension degree must be >= 1");
        q_ = 1;
        for (uint32_t i = 0; i < k; ++i) {
            if (q_ > (uint64_t(1) << 62) / p) throw std::invalid_argument("field too large");
            q_ *= p;
        }
        if (q_ > UINT32_MAX) throw std::invalid_argument("field too large for index encoding");
        if (modulus.empty()) {
            modulus_ = first_irreducible();
        } else {
            if (modulus.size() != k + size_t(1) || modulus.back() != 1)
                throw std::invalid_argument("modulus must be monic of degree k");
            for (uint32_t c : modulus)
                if (c >= p) throw std::invalid_argument("modulus coefficient out of range");
            if (k > 1 && !is_irreducible(modulus))
                throw std::invalid_argument("modulus is reducible");
            modulus_ = std::move(modulus);
        }
        if (k_ > 1 && q_ <= (uint64_t(1) << 20)) build_tables();
    }

    static bool is_small_prime(uint64_t n) {
        if (n < 2) return false;
        for (uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    // --- polynomial arithmetic over F_p, little-endian coefficient vectors ---

    static void trim(std::vector<uint32_t>& a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
    }

    std::vector<uint32_t> poly_rem(std::vector<uint32_t> a,
                                   const std::vector<uint32_t>& b) const {
        // b monic; returns a mod b
        while (a.size() >= b.size()) {
            uint32_t lead = a.back();
            if (lead != 0) {
                size_t shift = a.size() - b.size();
                for (size_t i = 0; i < b.size(); ++i) {
                    uint64_t t = uint64_t(lead) * b[i] % p_;
                    uint32_t& c = a[shift + i];
                    c = static_cast<uint32_t>((c + p_ - t) % p_);
                }
            }
            a.pop_back();
        }
        trim(a);
        return a;
    }

    bool is_irreducible(const std::vector<uint32_t>& f) const {
        // Trial division by every monic polynomial of degree 1..k/2.
        uint32_t deg = static_cast<uint32_t>(f.size() - 1);
        for (uint32_t d = 1; 2 * d <= deg; ++d) {
            uint64_t count = 1;
            for (uint32_t i = 0; i < d; ++i) count *= p_;
            for (uint64_t m = 0; m < count; ++m) {
                std::vector<uint32_t> g(d + 1, 0);
                uint64_t x = m;
                for (uint32_t i = 0; i < d; ++i) { g[i] = static_cast<uint32_t>(x % p_); x /= p_; }
                g[d] = 1;
                if (poly_rem(f, g).empty()) return false;
            }
        }
        return true;
    }

    std::vector<uint32_t> first_irreducible() const {
        for (uint64_t m = 0;; ++m) {
            std::vector<uint32_t> f(k_ + 1, 0);
            uint64_t x = m;
            for (uint32_t i = 0; i < k_; ++i) { f[i] = static_cast<uint32_t>(x % p_); x /= p_; }
            f[k_] = 1;
            if (is_irreducible(f)) return f;
            if (m == q_ - 1) break;  // all candidates exhausted (cannot happen)
        }
        throw std::logic_error("no irreducible modulus found");
    }

    Fq mul_generic(Fq a, Fq b) const {
        std::vector<uint32_t> ca = coeffs(a), cb = coeffs(b);
        std::vector<uint32_t> prod(2 * k_ - 1, 0);
        for (uint32_t i = 0; i < k_; ++i) {
            if (ca[i] == 0) continue;
            for (uint32_t j = 0; j < k_; ++j)
                prod[i + j] = static_cast<uint32_t>(
                    (prod[i + j] + uint64_t(ca[i]) * cb[j]) % p_);
        }
        std::vector<uint32_t> r = poly_rem(std::move(prod), modulus_);
        r.resize(k_, 0);
        return from_coeffs(r);
    }

    void build_tables() {
        // Discrete log tables relative to the first generator in index order.
        std::vector<uint64_t> prime_factors;
        uint64_t m = q_ - 1;
        for (uint64_t d = 2; d * d <= m; ++d)
            if (m % d == 0) {
                prime_factors.push_back(d);
                while (m % d == 0) m /= d;
            }
        if (m > 1) prime_factors.push_back(m);

        auto pow_generic = [&](Fq a, uint64_t e) {
            Fq acc = one(), base = a;
            while (e) {
                if (e & 1) acc = mul_generic(acc, base);
                base = mul_generic(base, base);
                e >>= 1;
            }
            return acc;
        };

        Fq g{0};
        for (uint32_t cand = 2; cand < q_; ++cand) {
            bool ok = true;
            for (uint64_t f : prime_factors)
                if (pow_generic(Fq{cand}, (q_ - 1) / f).v == 1) { ok = false; break; }
            if (ok) { g = Fq{cand}; break; }
        }
        if (g.v == 0) throw std::logic_error("no generator found");

        exp_.resize(q_ - 1);
        log_.assign(q_, 0);
        Fq cur = one();
        for (uint64_t i = 0; i < q_ - 1; ++i) {
            exp_[i] = cur.v;
            log_[cur.v] = static_cast<uint32_t>(i);
            cur = mul_generic(cur, g);
        }
        if (cur.v != 1) throw std::logic_error("generator order mismatch");
        has_tables_ = true;
    }
};

inline FieldPtr Field::parse(const std::string& designation) {
    auto caret = designation.find('^');
    auto to_u = [](const std::string& s) -> uint64_t {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad field designation");
        return std::stoull(s);
    };
    if (caret != std::string::npos) {
        uint64_t p = to_u(designation.substr(0, caret));
        uint64_t k = to_u(designation.substr(caret + 1));
        if (p > UINT32_MAX || k > 64) throw std::invalid_argument("bad field designation");
        return make(static_cast<uint32_t>(p), static_cast<uint32_t>(k));
    }
    uint64_t q = to_u(designation);
    if (q < 2) throw std::invalid_argument("bad field designation");
    uint64_t p = q;
    for (uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) { p = d; break; }
    uint32_t k = 0;
    uint64_t rest = q;
    while (rest % p == 0) { rest /= p; ++k; }
    if (rest != 1) throw std::invalid_argument("field size must be a prime power");
    return make(static_cast<uint32_t>(p), k);
}

// F_{p^a} -> F_{p^b} with a | b, sending the subfield generator to the first
// root (index order) of the subfield modulus in the big field.  Deterministic,
// hence stable across runs and thread counts.
class FieldEmbedding {
  public:
    FieldEmbedding(FieldPtr sub, FieldPtr sup) : sub_(sub), sup_(sup) {
        if (sub->characteristic() != sup->characteristic())
            throw std::invalid_argument("embedding requires equal characteristic");
        if (sup->extension_degree() % sub->extension_degree() != 0)
            throw std::invalid_argument("subfield degree must divide");
        Fq root = sup->zero();
        bool found = false;
        for (uint64_t i = 0; i < sup->size(); ++i) {
            Fq r = sup->element(i);
            Fq acc = sup->zero();
            const auto& mod = sub->modulus();
            for (size_t j = mod.size(); j-- > 0;)
                acc = sup->add(sup->mul(acc, r), sup->from_int(mod[j]));
            if (sup->is_zero(acc)) { root = r; found = true; break; }
        }
        if (!found) throw std::logic_error("no root of subfield modulus");
        map_.resize(sub->size());
        for (uint64_t i = 0; i < sub->size(); ++i) {
            auto c = sub->coeffs(sub->element(i));
            Fq acc = sup->zero();
            for (size_t j = c.size(); j-- > 0;)
                acc = sup->add(sup->mul(acc, root), sup->from_int(c[j]));
            map_[i] = acc.v;
        }
    }

    Fq operator()(Fq a) const { return Fq{map_[a.v]}; }
    const FieldPtr& subfield() const { return sub_; }
    const FieldPtr& superfield() const { return sup_; }

  private:
    FieldPtr sub_, sup_;
    std::vector<uint32_t> map_;
};

}  // namespace fanolines
