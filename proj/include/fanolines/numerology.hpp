#pragma once

// Exact integer invariants of Fano complete intersection profiles: index,
// enumerative degrees, speciality of degrees relative to a characteristic,
// and the hypothesis triage that decides which statement covers a profile.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fanolines {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t acc = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) acc = mulmod_u64(acc, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return acc;
}

// Deterministic Miller-Rabin; the 12 smallest prime witnesses decide
// primality for every 64-bit integer.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline uint64_t pollard_rho(uint64_t n) {
    // n composite, odd, not a prime power of 2; deterministic constant sweep.
    auto gcd_u64 = [](uint64_t a, uint64_t b) {
        while (b) { uint64_t t = a % b; a = b; b = t; }
        return a;
    };
    for (uint64_t c = 1;; ++c) {
        uint64_t x = 2, y = 2, d = 1;
        auto f = [&](uint64_t v) { return (mulmod_u64(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

inline void factor_into(uint64_t n, std::map<uint64_t, uint32_t>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) { out[n] += 1; return; }
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % p == 0) {
            out[p] += 1;
            factor_into(n / p, out);
            return;
        }
    }
    uint64_t d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

inline std::map<uint64_t, uint32_t> factor_u64(uint64_t n) {
    if (n == 0) throw std::invalid_argument("cannot factor 0");
    std::map<uint64_t, uint32_t> out;
    factor_into(n, out);
    return out;
}

}  // namespace detail

// --- p-adic valuation and speciality ---------------------------------------

// d = p^valuation * unit with p not dividing unit.
struct PAdic {
    uint32_t valuation = 0;
    uint64_t unit = 0;
};

inline PAdic p_adic_valuation(uint64_t d, uint64_t p) {
    if (d == 0) throw std::invalid_argument("valuation of 0 is undefined");
    if (!detail::is_prime_u64(p)) throw std::invalid_argument("p must be prime");
    PAdic out;
    out.unit = d;
    while (out.unit % p == 0) { out.unit /= p; out.valuation += 1; }
    return out;
}

enum class Speciality { Special, Nonspecial, Undefined };

inline const char* to_string(Speciality s) {
    switch (s) {
        case Speciality::Special: return "special";
        case Speciality::Nonspecial: return "nonspecial";
        default: return "undefined";
    }
}

// d = p^(v-1) e with p prime to e; d is p-special when 1 <= e < p.  The label
// is undefined for d <= 1.  Note e = p cannot occur, so the dichotomy is
// e < p versus e > p.
inline Speciality classify_speciality(uint64_t d, uint64_t p) {
    if (!detail::is_prime_u64(p)) throw std::invalid_argument("p must be prime");
    if (d <= 1) return Speciality::Undefined;
    uint64_t e = p_adic_valuation(d, p).unit;
    return e < p ? Speciality::Special : Speciality::Nonspecial;
}

// A degree tuple is p-special when, for every entry with d_i >= p, the
// p-divisible entries are themselves p-special and the p-prime entries have
// p-special successor d_i + 1.  Entries below p impose nothing.
inline bool tuple_is_special(const std::vector<uint64_t>& degrees, uint64_t p) {
    if (!detail::is_prime_u64(p)) throw std::invalid_argument("p must be prime");
    for (uint64_t d : degrees) {
        if (d < p) continue;
        if (d % p == 0) {
            if (classify_speciality(d, p) != Speciality::Special) return false;
        } else {
            if (classify_speciality(d + 1, p) != Speciality::Special) return false;
        }
    }
    return true;
}

// --- profiles ---------------------------------------------------------------

// A complete intersection of multidegree `degrees` in P^n over a field of
// characteristic p (p = 0 when no field is fixed).
struct CIProfile {
    uint32_t n = 0;
    std::vector<uint64_t> degrees;
    uint64_t p = 0;

    void validate() const {
        if (degrees.empty()) throw std::invalid_argument("profile needs at least one degree");
        if (degrees.size() >= n) throw std::invalid_argument("codimension must be below n");
        for (uint64_t d : degrees)
            if (d < 2) throw std::invalid_argument("degrees must be >= 2");
        if (p != 0 && !detail::is_prime_u64(p))
            throw std::invalid_argument("characteristic must be 0 or prime");
    }
};

inline int64_t fano_index(const CIProfile& prof) {
    prof.validate();
    int64_t idx = static_cast<int64_t>(prof.n) + 1;
    for (uint64_t d : prof.degrees) idx -= static_cast<int64_t>(d);
    return idx;
}

// --- enumerative degrees ----------------------------------------------------

inline BigInt factorial(uint64_t n) {
    BigInt out = 1;
    for (uint64_t i = 2; i <= n; ++i) out *= i;
    return out;
}

inline BigInt binomial_big(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    BigInt out = 1;
    for (uint64_t i = 0; i < k; ++i) {
        out *= (n - i);
        out /= (i + 1);  // exact at every step
    }
    return out;
}

// Degree of the evaluation map on pointed lines: the product of d_i!.
inline BigInt pointed_line_degree(const std::vector<uint64_t>& degrees) {
    BigInt out = 1;
    for (uint64_t d : degrees) out *= factorial(d);
    return out;
}

inline BigInt catalan_number(uint64_t d) {
    BigInt num = binomial_big(2 * d, d);
    BigInt den = d + 1;
    if (num % den != 0) throw std::logic_error("Catalan divisibility failed");
    return num / den;
}

// (d+1) C_d - 2^d: the alternating-sum factor in the conic count.
inline BigInt conic_excess(uint64_t d) {
    return BigInt(d + 1) * catalan_number(d) - (BigInt(1) << d);
}

// Degree of the evaluation map on pointed conics for an index-1 hypersurface
// (degree d in P^d), d >= 4: (d!)^2 / 2^(d+1) * ((d+1) C_d - 2^d).
inline BigInt conic_degree(uint64_t d) {
    if (d < 4) throw std::invalid_argument("conic degree needs d >= 4");
    BigInt num = factorial(d) * factorial(d) * conic_excess(d);
    BigInt den = BigInt(1) << (d + 1);
    if (num % den != 0) throw std::logic_error("conic degree is not integral");
    return num / den;
}

// Primes p <= d together with the prime divisors of (d+1) C_d - 2^d: outside
// this set the conic count is prime to p.
inline std::vector<uint64_t> bad_primes_index_one(uint64_t d) {
    if (d < 4) throw std::invalid_argument("bad primes need d >= 4");
    std::vector<bool> in;
    std::vector<uint64_t> out;
    for (uint64_t q = 2; q <= d; ++q)
        if (detail::is_prime_u64(q)) out.push_back(q);
    BigInt excess = conic_excess(d);
    if (excess < 0) excess = -excess;
    if (excess > BigInt(UINT64_MAX))
        throw std::out_of_range("excess factor exceeds exact factorization range");
    for (const auto& [prime, mult] : detail::factor_u64(excess.convert_to<uint64_t>())) {
        (void)mult;
        if (prime > d) out.push_back(prime);
    }
    return out;
}

// --- hypothesis triage --------------------------------------------------------

enum class Conclusion { TheoremApplies, WitnessExists, Inconclusive };

inline const char* to_string(Conclusion c) {
    switch (c) {
        case Conclusion::TheoremApplies: return "THEOREM_APPLIES";
        case Conclusion::WitnessExists: return "WITNESS_EXISTS";
        default: return "INCONCLUSIVE";
    }
}

struct HypothesisReport {
    int64_t index = 0;
    bool index_ge_2 = false;
    bool p_gt_max_degree = false;
    bool max_degree_ge_p = false;
    bool tuple_special = false;
    Conclusion conclusion = Conclusion::Inconclusive;
};

// Decides which regime covers the profile: large characteristic (every such
// complete intersection has the strong property), witness range (a sharp
// counterexample family exists), or neither.
inline HypothesisReport hypothesis_check(const CIProfile& prof) {
    prof.validate();
    if (prof.p == 0) throw std::invalid_argument("hypothesis check needs a characteristic");
    HypothesisReport rep;
    rep.index = fano_index(prof);
    rep.index_ge_2 = rep.index >= 2;
    uint64_t maxd = 0;
    for (uint64_t d : prof.degrees) maxd = std::max(maxd, d);
    rep.p_gt_max_degree = prof.p > maxd;
    rep.max_degree_ge_p = maxd >= prof.p;
    rep.tuple_special = tuple_is_special(prof.degrees, prof.p);
    if (rep.index_ge_2 && rep.p_gt_max_degree)
        rep.conclusion = Conclusion::TheoremApplies;
    else if (rep.index_ge_2 && rep.max_degree_ge_p && !rep.tuple_special)
        rep.conclusion = Conclusion::WitnessExists;
    else
        rep.conclusion = Conclusion::Inconclusive;
    return rep;
}

}  // namespace fanolines
