#pragma once

// Sparse homogeneous polynomials over a finite field, with the operations the
// line-geometry layers need: evaluation, partials, restriction to a
// parametrized line, and the two-block bihomogeneous expansion g(s + t).
//
// Text grammar (parse/render): terms joined by '+' or '-'; a term is an
// optional integer coefficient and '*'-separated factors tI or tI^E, e.g.
//   "t0^3 + t1^3 + 2*t2^3"
// Coefficients are integers reduced into the prime subfield.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf.hpp"

namespace fanolines {

namespace detail {

// Row e of Pascal's triangle mod p.
inline std::vector<uint32_t> binomial_row_mod_p(uint32_t e, uint32_t p) {
    std::vector<uint32_t> row(e + 1, 0);
    row[0] = 1 % p;
    for (uint32_t i = 1; i <= e; ++i)
        for (uint32_t j = i; j >= 1; --j)
            row[j] = (row[j] + row[j - 1]) % p;
    return row;
}

}  // namespace detail

class MPoly {
  public:
    using Exps = std::vector<uint16_t>;
    using TermMap = std::map<Exps, Fq>;

    static MPoly zero(FieldPtr F, uint32_t nvars, uint32_t degree) {
        return MPoly(std::move(F), nvars, degree, {});
    }

    // Builds from (exponent vector, coefficient) pairs; duplicate monomials
    // accumulate.  Every surviving term must have the same total degree.
    static MPoly from_terms(FieldPtr F, uint32_t nvars,
                            const std::vector<std::pair<Exps, Fq>>& terms,
                            std::optional<uint32_t> degree_hint = {}) {
        TermMap m;
        std::optional<uint32_t> deg = degree_hint;
        for (const auto& [exps, c] : terms) {
            if (exps.size() != nvars)
                throw std::invalid_argument("exponent vector length mismatch");
            uint32_t d = 0;
            for (uint16_t e : exps) d += e;
            if (deg && *deg != d)
                throw std::invalid_argument("polynomial is not homogeneous");
            deg = d;
            if (F->is_zero(c)) continue;
            auto it = m.find(exps);
            if (it == m.end()) {
                m.emplace(exps, c);
            } else {
                it->second = F->add(it->second, c);
                if (F->is_zero(it->second)) m.erase(it);
            }
        }
        return MPoly(std::move(F), nvars, deg.value_or(0), std::move(m));
    }

    static MPoly parse(const std::string& text, uint32_t nvars, FieldPtr F);

    const FieldPtr& field() const { return F_; }
    uint32_t nvars() const { return nvars_; }
    uint32_t degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    size_t nterms() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    // Equality of polynomials as functions of their terms; the designated
    // degree of a zero polynomial is not compared.
    bool operator==(const MPoly& o) const {
        return nvars_ == o.nvars_ && *F_ == *o.F_ && terms_ == o.terms_;
    }
    bool operator!=(const MPoly& o) const { return !(*this == o); }

    Fq eval(const std::vector<Fq>& x) const {
        if (x.size() != nvars_) throw std::invalid_argument("point dimension mismatch");
        Fq acc = F_->zero();
        for (const auto& [exps, c] : terms_) {
            Fq t = c;
            for (uint32_t j = 0; j < nvars_; ++j)
                if (exps[j]) t = F_->mul(t, F_->pow(x[j], exps[j]));
            acc = F_->add(acc, t);
        }
        return acc;
    }

    MPoly partial(uint32_t var) const {
        if (var >= nvars_) throw std::invalid_argument("variable index out of range");
        std::vector<std::pair<Exps, Fq>> out;
        for (const auto& [exps, c] : terms_) {
            if (exps[var] == 0) continue;
            Exps e = exps;
            Fq nc = F_->mul(c, F_->from_int(e[var]));
            e[var] -= 1;
            out.emplace_back(std::move(e), nc);
        }
        uint32_t d = degree_ >= 1 ? degree_ - 1 : 0;
        return from_terms(F_, nvars_, out, d);
    }

    MPoly add(const MPoly& o) const {
        check_compatible(o);
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        if (degree_ != o.degree_)
            throw std::invalid_argument("degree mismatch in polynomial sum");
        std::vector<std::pair<Exps, Fq>> out;
        out.reserve(terms_.size() + o.terms_.size());
        for (const auto& t : terms_) out.push_back(t);
        for (const auto& t : o.terms_) out.push_back(t);
        return from_terms(F_, nvars_, out, degree_);
    }

    MPoly scale(Fq c) const {
        std::vector<std::pair<Exps, Fq>> out;
        for (const auto& [exps, k] : terms_) out.emplace_back(exps, F_->mul(k, c));
        return from_terms(F_, nvars_, out, degree_);
    }

    MPoly sub(const MPoly& o) const { return add(o.scale(F_->from_int(-1))); }

    // Multiplication by the variable t_var.
    MPoly mul_var(uint32_t var) const {
        if (var >= nvars_) throw std::invalid_argument("variable index out of range");
        std::vector<std::pair<Exps, Fq>> out;
        for (const auto& [exps, c] : terms_) {
            Exps e = exps;
            e[var] += 1;
            out.emplace_back(std::move(e), c);
        }
        return from_terms(F_, nvars_, out, degree_ + 1);
    }

    // Coefficients of g(uA + vB) as a binary form, index ell = coefficient of
    // u^(d-ell) v^ell, length d+1.  A and B must span a line.
    std::vector<Fq> restrict_to_line(const std::vector<Fq>& A,
                                     const std::vector<Fq>& B) const;

    std::string render() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [exps, c] = *it;
            if (!first) out += " + ";
            first = false;
            bool constant = true;
            for (uint16_t e : exps)
                if (e) { constant = false; break; }
            if (c.v >= F_->characteristic())
                throw std::invalid_argument(
                    "coefficient not representable in the integer grammar");
            std::string factors;
            for (uint32_t j = 0; j < nvars_; ++j) {
                if (!exps[j]) continue;
                if (!factors.empty()) factors += "*";
                factors += "t" + std::to_string(j);
                if (exps[j] > 1) factors += "^" + std::to_string(exps[j]);
            }
            if (constant) {
                out += std::to_string(c.v);
            } else if (c.v != 1) {
                out += std::to_string(c.v) + "*" + factors;
            } else {
                out += factors;
            }
        }
        return out;
    }

    // Coefficient-wise image under a field embedding.
    MPoly map_field(const FieldEmbedding& phi) const {
        std::vector<std::pair<Exps, Fq>> out;
        for (const auto& [exps, c] : terms_) out.emplace_back(exps, phi(c));
        return from_terms(phi.superfield(), nvars_, out, degree_);
    }

  private:
    FieldPtr F_;
    uint32_t nvars_;
    uint32_t degree_;
    TermMap terms_;

    MPoly(FieldPtr F, uint32_t nvars, uint32_t degree, TermMap terms)
        : F_(std::move(F)), nvars_(nvars), degree_(degree), terms_(std::move(terms)) {
        if (nvars_ == 0) throw std::invalid_argument("polynomial needs at least one variable");
    }

    void check_compatible(const MPoly& o) const {
        if (nvars_ != o.nvars_ || !(*F_ == *o.F_))
            throw std::invalid_argument("incompatible polynomials");
    }
};

inline MPoly MPoly::parse(const std::string& text, uint32_t nvars, FieldPtr F) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty polynomial text");

    size_t pos = 0;
    auto read_int = [&]() -> uint64_t {
        size_t start = pos;
        while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("expected integer at position " +
                                                      std::to_string(start));
        return std::stoull(s.substr(start, pos - start));
    };

    std::vector<std::pair<Exps, Fq>> terms;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') { negative = s[pos] == '-'; ++pos; }
    while (true) {
        long long coeff_sign = negative ? -1 : 1;
        uint64_t coeff_mag = 1;
        bool saw_coeff = false;
        if (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
            coeff_mag = read_int();
            saw_coeff = true;
            if (pos < s.size() && s[pos] == '*') ++pos;
        }
        Exps exps(nvars, 0);
        bool saw_factor = false;
        while (pos < s.size() && s[pos] == 't') {
            ++pos;
            uint64_t idx = read_int();
            if (idx >= nvars)
                throw std::invalid_argument("variable index out of range: t" +
                                            std::to_string(idx));
            uint64_t e = 1;
            if (pos < s.size() && s[pos] == '^') { ++pos; e = read_int(); }
            if (e > UINT16_MAX) throw std::invalid_argument("exponent too large");
            exps[idx] = static_cast<uint16_t>(exps[idx] + e);
            saw_factor = true;
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                if (pos >= s.size() || s[pos] != 't')
                    throw std::invalid_argument("expected factor after '*'");
            } else {
                break;
            }
        }
        if (!saw_coeff && !saw_factor)
            throw std::invalid_argument("expected term at position " + std::to_string(pos));
        Fq c = F->from_int(coeff_sign * static_cast<long long>(coeff_mag % F->characteristic()));
        terms.emplace_back(std::move(exps), c);
        if (pos == s.size()) break;
        if (s[pos] == '+' || s[pos] == '-') {
            negative = s[pos] == '-';
            ++pos;
            if (pos == s.size()) throw std::invalid_argument("dangling sign");
        } else {
            throw std::invalid_argument("unexpected character at position " +
                                        std::to_string(pos));
        }
    }

    // Homogeneity is checked against the raw term list so that cancelling
    // terms still pin the designated degree.
    std::optional<uint32_t> deg;
    for (const auto& [exps, c] : terms) {
        uint32_t d = 0;
        for (uint16_t e : exps) d += e;
        if (deg && *deg != d)
            throw std::invalid_argument("polynomial is not homogeneous");
        deg = d;
    }
    return from_terms(std::move(F), nvars, terms, deg);
}

inline std::vector<Fq> MPoly::restrict_to_line(const std::vector<Fq>& A,
                                               const std::vector<Fq>& B) const {
    if (A.size() != nvars_ || B.size() != nvars_)
        throw std::invalid_argument("line point dimension mismatch");
    // Rank check: A, B must be linearly independent over F.
    {
        bool dependent = true;
        // find first nonzero of A; B must not be a multiple of A (and A != 0).
        size_t ia = nvars_;
        for (size_t j = 0; j < nvars_; ++j)
            if (!F_->is_zero(A[j])) { ia = j; break; }
        if (ia == nvars_) {
            dependent = true;  // A = 0
        } else {
            Fq ratio = F_->div(B[ia], A[ia]);
            dependent = true;
            for (size_t j = 0; j < nvars_; ++j)
                if (B[j] != F_->mul(ratio, A[j])) { dependent = false; break; }
        }
        if (dependent) throw std::invalid_argument("line points linearly dependent");
    }

    const uint32_t p = F_->characteristic();
    std::vector<Fq> out(degree_ + 1, F_->zero());
    for (const auto& [exps, c] : terms_) {
        // Binary-form product of (A_j u + B_j v)^(e_j) over the support.
        std::vector<Fq> acc{c};
        for (uint32_t j = 0; j < nvars_; ++j) {
            uint16_t e = exps[j];
            if (!e) continue;
            auto row = detail::binomial_row_mod_p(e, p);
            std::vector<Fq> fac(e + 1);
            for (uint32_t i = 0; i <= e; ++i)
                fac[i] = F_->mul(F_->from_int(row[i]),
                                 F_->mul(F_->pow(A[j], e - i), F_->pow(B[j], i)));
            std::vector<Fq> next(acc.size() + e, F_->zero());
            for (size_t a = 0; a < acc.size(); ++a) {
                if (F_->is_zero(acc[a])) continue;
                for (uint32_t i = 0; i <= e; ++i)
                    next[a + i] = F_->add(next[a + i], F_->mul(acc[a], fac[i]));
            }
            acc = std::move(next);
        }
        for (size_t i = 0; i < acc.size(); ++i) out[i] = F_->add(out[i], acc[i]);
    }
    return out;
}

// One bidegree slice of g(s + t): total s-degree d - ell, t-degree ell, in
// 2(n+1) variables with s_j = t_j and t_j = t_{n+1+j} in the text grammar.
struct BiComponent {
    uint32_t ell = 0;
    MPoly poly;
};

// All d+1 bihomogeneous components of g(s + t), ell ascending.  Identically
// vanishing slices come back as zero polynomials of the right bidegree.
inline std::vector<BiComponent> bihomogeneous_components(const MPoly& g) {
    const FieldPtr& F = g.field();
    const uint32_t n1 = g.nvars();
    const uint32_t d = g.degree();
    const uint32_t p = F->characteristic();
    std::vector<std::vector<std::pair<MPoly::Exps, Fq>>> buckets(d + 1);

    for (const auto& [exps, c] : g.terms()) {
        // Expand prod_j (s_j + t_j)^(e_j) over the support of the term.
        struct Partial {
            MPoly::Exps split;  // 2(n+1) exponents
            Fq coeff;
            uint32_t tdeg;
        };
        std::vector<Partial> partials{{MPoly::Exps(2 * n1, 0), c, 0}};
        for (uint32_t j = 0; j < n1; ++j) {
            uint16_t e = exps[j];
            if (!e) continue;
            auto row = detail::binomial_row_mod_p(e, p);
            std::vector<Partial> next;
            next.reserve(partials.size() * (e + 1));
            for (const auto& part : partials) {
                for (uint32_t a = 0; a <= e; ++a) {
                    if (row[a] == 0) continue;
                    Partial np = part;
                    np.split[j] = static_cast<uint16_t>(e - a);
                    np.split[n1 + j] = static_cast<uint16_t>(a);
                    np.coeff = F->mul(np.coeff, F->from_int(row[a]));
                    np.tdeg += a;
                    next.push_back(std::move(np));
                }
            }
            partials = std::move(next);
        }
        for (auto& part : partials)
            buckets[part.tdeg].emplace_back(std::move(part.split), part.coeff);
    }

    std::vector<BiComponent> out;
    out.reserve(d + 1);
    for (uint32_t ell = 0; ell <= d; ++ell)
        out.push_back(BiComponent{
            ell, MPoly::from_terms(F, 2 * n1, buckets[ell], d)});
    return out;
}

}  // namespace fanolines
