#pragma once

// Lines in P^n(F_q), their enumeration, containment in complete
// intersections, and the splitting type of the normal bundle.
//
// A line is stored as the unique reduced row echelon 2 x (n+1) matrix whose
// rows span it, so equality of lines is equality of matrices.  Enumeration
// walks pivot pairs (i, j) in lexicographic order; inside a pivot block the
// free entries count base q with the first free slot varying fastest, which
// gives O(1) random access by index and thread-count-independent chunking.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf.hpp"
#include "mpoly.hpp"
#include "parallel.hpp"
#include "witness.hpp"

namespace fanolines {

struct Line {
    uint32_t n = 0;                // ambient projective dimension
    uint32_t pivot0 = 0, pivot1 = 1;
    std::vector<Fq> row0, row1;    // canonical spanning rows, length n+1

    friend bool operator==(const Line& a, const Line& b) {
        return a.n == b.n && a.row0 == b.row0 && a.row1 == b.row1;
    }
    friend bool operator<(const Line& a, const Line& b) {
        if (a.row0 != b.row0) return a.row0 < b.row0;
        return a.row1 < b.row1;
    }
};

// Reduced row echelon form of the 2 x (n+1) matrix with rows A, B; throws
// when A, B fail to span a line.
inline Line line_canonical(const std::vector<Fq>& A, const std::vector<Fq>& B,
                           const Field& F) {
    if (A.size() != B.size() || A.size() < 2)
        throw std::invalid_argument("line points need equal dimension >= 2");
    uint32_t cols = static_cast<uint32_t>(A.size());
    std::vector<std::vector<Fq>> m{A, B};
    uint32_t rank = 0;
    std::vector<uint32_t> pivots;
    for (uint32_t col = 0; col < cols && rank < 2; ++col) {
        uint32_t pr = rank;
        while (pr < 2 && F.is_zero(m[pr][col])) ++pr;
        if (pr == 2) continue;
        std::swap(m[rank], m[pr]);
        Fq inv = F.inv(m[rank][col]);
        for (uint32_t j = col; j < cols; ++j) m[rank][j] = F.mul(m[rank][j], inv);
        for (uint32_t r = 0; r < 2; ++r) {
            if (r == rank || F.is_zero(m[r][col])) continue;
            Fq f = m[r][col];
            for (uint32_t j = col; j < cols; ++j)
                m[r][j] = F.sub(m[r][j], F.mul(f, m[rank][j]));
        }
        pivots.push_back(col);
        ++rank;
    }
    if (rank < 2) throw std::invalid_argument("line points linearly dependent");
    Line L;
    L.n = cols - 1;
    L.pivot0 = pivots[0];
    L.pivot1 = pivots[1];
    L.row0 = std::move(m[0]);
    L.row1 = std::move(m[1]);
    return L;
}

// The q+1 points of L, already in normalized representative form: row0 + x
// row1 for x in F_q, then row1.
inline std::vector<std::vector<Fq>> line_points(const Line& L, const Field& F) {
    std::vector<std::vector<Fq>> out;
    out.reserve(F.size() + 1);
    for (uint64_t xi = 0; xi < F.size(); ++xi) {
        Fq x = F.element(xi);
        std::vector<Fq> pt(L.n + 1);
        for (uint32_t j = 0; j <= L.n; ++j)
            pt[j] = F.add(L.row0[j], F.mul(x, L.row1[j]));
        out.push_back(std::move(pt));
    }
    out.push_back(L.row1);
    return out;
}

// Random-access enumerator of all lines in P^n(F_q), canonical order.
class LineEnumerator {
  public:
    LineEnumerator(uint32_t n, FieldPtr F) : n_(n), F_(std::move(F)) {
        if (n < 1) throw std::invalid_argument("lines need n >= 1");
        uint64_t q = F_->size();
        total_ = 0;
        for (uint32_t i = 0; i < n_; ++i) {
            for (uint32_t j = i + 1; j <= n_; ++j) {
                // free slots: row0 over columns > i excluding j, row1 over
                // columns > j.
                uint32_t free_slots = (n_ - i - 1) + (n_ - j);
                uint64_t size = 1;
                for (uint32_t t = 0; t < free_slots; ++t) {
                    if (size > UINT64_MAX / q)
                        throw std::invalid_argument("line space too large");
                    size *= q;
                }
                blocks_.push_back(Block{i, j, size});
                if (total_ > UINT64_MAX - size)
                    throw std::invalid_argument("line space too large");
                total_ += size;
            }
        }
    }

    uint64_t count() const { return total_; }
    const FieldPtr& field() const { return F_; }
    uint32_t ambient_dim() const { return n_; }

    Line at(uint64_t index) const {
        if (index >= total_) throw std::invalid_argument("line index out of range");
        size_t b = 0;
        while (index >= blocks_[b].size) { index -= blocks_[b].size; ++b; }
        const Block& blk = blocks_[b];
        Line L;
        L.n = n_;
        L.pivot0 = blk.i;
        L.pivot1 = blk.j;
        L.row0.assign(n_ + 1, F_->zero());
        L.row1.assign(n_ + 1, F_->zero());
        L.row0[blk.i] = F_->one();
        L.row1[blk.j] = F_->one();
        uint64_t q = F_->size(), rest = index;
        for (uint32_t col = blk.i + 1; col <= n_; ++col) {
            if (col == blk.j) continue;
            L.row0[col] = F_->element(rest % q);
            rest /= q;
        }
        for (uint32_t col = blk.j + 1; col <= n_; ++col) {
            L.row1[col] = F_->element(rest % q);
            rest /= q;
        }
        return L;
    }

    // Exact count from the Gaussian binomial [n+1 choose 2]_q.
    static uint64_t expected_count(uint32_t n, uint64_t q) {
        // ((q^(n+1) - 1)(q^(n+1) - q)) / ((q^2 - 1)(q^2 - q))
        unsigned __int128 qn = 1;
        for (uint32_t i = 0; i <= n; ++i) qn *= q;
        unsigned __int128 num = (qn - 1) * (qn - q);
        unsigned __int128 den = (static_cast<unsigned __int128>(q) * q - 1) *
                                (static_cast<unsigned __int128>(q) * q - q);
        return static_cast<uint64_t>(num / den);
    }

  private:
    struct Block {
        uint32_t i, j;
        uint64_t size;
    };
    uint32_t n_;
    FieldPtr F_;
    std::vector<Block> blocks_;
    uint64_t total_ = 0;
};

inline bool line_on_variety(const Line& L, const std::vector<MPoly>& polys) {
    for (const auto& g : polys) {
        const FieldPtr& F = g.field();
        for (Fq c : g.restrict_to_line(L.row0, L.row1))
            if (!F->is_zero(c)) return false;
    }
    return true;
}

// All lines of P^n(F_q) contained in the common zero locus, in enumeration
// order regardless of thread count.
inline std::vector<Line> lines_on_variety(const std::vector<MPoly>& polys,
                                          uint32_t n, FieldPtr F,
                                          unsigned threads = 1) {
    if (polys.empty()) throw std::invalid_argument("need at least one polynomial");
    for (const auto& g : polys) {
        if (g.nvars() != n + 1) throw std::invalid_argument("polynomial/ambient mismatch");
        if (!(*g.field() == *F)) throw std::invalid_argument("polynomial field mismatch");
    }
    LineEnumerator en(n, F);
    uint64_t nchunks = chunk_count(en.count(), kDefaultChunk);
    std::vector<std::vector<Line>> found(nchunks);
    run_chunked(en.count(), kDefaultChunk, threads,
                [&](uint64_t chunk, uint64_t begin, uint64_t end) {
                    for (uint64_t i = begin; i < end; ++i) {
                        Line L = en.at(i);
                        if (line_on_variety(L, polys)) found[chunk].push_back(L);
                    }
                });
    std::vector<Line> out;
    for (auto& part : found)
        for (auto& L : part) out.push_back(std::move(L));
    return out;
}

// --- normal bundle splitting type -------------------------------------------

struct SplittingType {
    std::vector<int32_t> summands;  // non-increasing

    uint32_t rank() const { return static_cast<uint32_t>(summands.size()); }
    int64_t degree() const {
        int64_t s = 0;
        for (int32_t a : summands) s += a;
        return s;
    }
    bool is_free() const {
        for (int32_t a : summands)
            if (a < 0) return false;
        return true;
    }
    std::string str() const {
        std::string out = "(";
        for (size_t i = 0; i < summands.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(summands[i]);
        }
        return out + ")";
    }
    friend bool operator==(const SplittingType& a, const SplittingType& b) {
        return a.summands == b.summands;
    }
};

namespace detail {

// Rank of a dense matrix over F by Gaussian elimination; rows are modified.
inline uint32_t matrix_rank(std::vector<std::vector<Fq>>& m, const Field& F) {
    if (m.empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    uint32_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pr = rank;
        while (pr < rows && F.is_zero(m[pr][col])) ++pr;
        if (pr == rows) continue;
        std::swap(m[rank], m[pr]);
        Fq inv = F.inv(m[rank][col]);
        for (size_t j = col; j < cols; ++j) m[rank][j] = F.mul(m[rank][j], inv);
        for (size_t r = 0; r < rows; ++r) {
            if (r == rank || F.is_zero(m[r][col])) continue;
            Fq f = m[r][col];
            for (size_t j = col; j < cols; ++j)
                m[r][j] = F.sub(m[r][j], F.mul(f, m[rank][j]));
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

// Splitting type of the subsheaf K = ker(O(1)^(n-1) -> sum_j O(d_j)) along a
// line L in the variety cut out by polys: K = N_{L/X}(-1)-style data with
// summand a_i <= 1 always.  The map sends the complement coordinate w_m to
// the restricted partial (d/dt_m g_j)|_L; its section-level kernel at twist
// tw has dimension h0(tw) = sum_i #{a_i >= -tw} once twists reach stability,
// so successive differences recover the summand multiset.  Requires X smooth
// along L, certified by full section-level rank at twist sum_j (d_j - 1)
// (H^1 of K vanishes there, so full rank is equivalent to surjectivity).
inline SplittingType splitting_type(const Line& L, const std::vector<MPoly>& polys) {
    if (polys.empty()) throw std::invalid_argument("need at least one polynomial");
    const FieldPtr& F = polys.front().field();
    uint32_t n = L.n;
    size_t c = polys.size();
    for (const auto& g : polys) {
        if (g.nvars() != n + 1) throw std::invalid_argument("polynomial/ambient mismatch");
        if (!(*g.field() == *F)) throw std::invalid_argument("polynomial field mismatch");
        if (g.degree() < 1 || g.is_zero())
            throw std::invalid_argument("defining forms must be nonzero of positive degree");
    }
    if (c > n) throw std::invalid_argument("too many defining forms");
    if (!line_on_variety(L, polys))
        throw std::invalid_argument("line not contained in the variety");

    // Complement basis: standard vectors away from the two pivots.
    std::vector<uint32_t> comp;
    for (uint32_t m = 0; m <= n; ++m)
        if (m != L.pivot0 && m != L.pivot1) comp.push_back(m);
    uint32_t nw = n - 1;

    // beta[j][w]: coefficients of (d/dt_comp[w] g_j)|_L, a binary form of
    // degree d_j - 1 (length d_j).
    std::vector<std::vector<std::vector<Fq>>> beta(c);
    std::vector<uint32_t> degs(c);
    for (size_t j = 0; j < c; ++j) {
        degs[j] = polys[j].degree();
        beta[j].resize(nw);
        for (uint32_t w = 0; w < nw; ++w)
            beta[j][w] = polys[j].partial(comp[w]).restrict_to_line(L.row0, L.row1);
    }

    // Section-level matrix at twist tw: columns over (w, monomial of degree
    // tw+1), rows over (j, monomial of degree d_j + tw).
    auto section_matrix = [&](int32_t tw) {
        uint32_t dom_per_w = static_cast<uint32_t>(tw + 2);
        std::vector<uint32_t> row_offset(c + 1, 0);
        for (size_t j = 0; j < c; ++j)
            row_offset[j + 1] = row_offset[j] + degs[j] + tw + 1;
        std::vector<std::vector<Fq>> mat(
            row_offset[c], std::vector<Fq>(nw * dom_per_w, F->zero()));
        for (size_t j = 0; j < c; ++j)
            for (uint32_t w = 0; w < nw; ++w)
                for (uint32_t s = 0; s < dom_per_w; ++s) {
                    uint32_t colidx = w * dom_per_w + s;
                    for (uint32_t i = 0; i < degs[j]; ++i)
                        mat[row_offset[j] + i + s][colidx] = beta[j][w][i];
                }
        return mat;
    };

    // Smoothness along L: full rank at the stabilizing twist.
    int32_t tw_check = 0;
    for (size_t j = 0; j < c; ++j) tw_check += static_cast<int32_t>(degs[j]) - 1;
    {
        auto mat = section_matrix(tw_check);
        uint32_t rows = static_cast<uint32_t>(mat.size());
        if (detail::matrix_rank(mat, *F) != rows)
            throw std::invalid_argument("variety is singular along the line");
    }

    uint32_t r = nw - static_cast<uint32_t>(c);
    std::vector<int32_t> summands;
    uint32_t h0_prev = 0, delta_prev = 0;
    for (int32_t tw = -1;; ++tw) {
        auto mat = section_matrix(tw);
        uint32_t ncols = nw * static_cast<uint32_t>(tw + 2);
        uint32_t h0 = ncols - detail::matrix_rank(mat, *F);
        uint32_t delta = h0 - h0_prev;
        for (uint32_t t = 0; t < delta - delta_prev; ++t) summands.push_back(-tw);
        h0_prev = h0;
        delta_prev = delta;
        if (delta == r) break;
        if (tw > tw_check + 1) throw std::logic_error("splitting scan failed to stabilize");
    }

    SplittingType st{std::move(summands)};
    int64_t expected_degree = static_cast<int64_t>(n) - 1;
    for (size_t j = 0; j < c; ++j) expected_degree -= degs[j];
    if (st.rank() != r || st.degree() != expected_degree)
        throw std::logic_error("splitting type violates rank/degree conservation");
    return st;
}

inline bool is_free(const Line& L, const std::vector<MPoly>& polys) {
    return splitting_type(L, polys).is_free();
}

// --- censuses ----------------------------------------------------------------

// Lines through each F_q-point of the variety (points with no lines included,
// with count 0).  Keys are normalized point coordinate index vectors.
inline std::map<std::vector<uint32_t>, uint64_t> point_fiber_census(
    const std::vector<MPoly>& polys, uint32_t n, FieldPtr F,
    unsigned threads = 1) {
    std::map<std::vector<uint32_t>, uint64_t> census;
    PointEnumerator pts(n, F);
    for (uint64_t i = 0; i < pts.count(); ++i) {
        std::vector<Fq> pt = pts.at(i);
        bool on = true;
        for (const auto& g : polys)
            if (!F->is_zero(g.eval(pt))) { on = false; break; }
        if (!on) continue;
        std::vector<uint32_t> key;
        key.reserve(n + 1);
        for (Fq a : pt) key.push_back(a.v);
        census.emplace(std::move(key), 0);
    }
    for (const Line& L : lines_on_variety(polys, n, F, threads)) {
        for (const auto& pt : line_points(L, *F)) {
            std::vector<uint32_t> key;
            key.reserve(n + 1);
            for (Fq a : pt) key.push_back(a.v);
            auto it = census.find(key);
            if (it == census.end())
                throw std::logic_error("line point missing from variety census");
            it->second += 1;
        }
    }
    return census;
}

struct FreenessReport {
    struct PerField {
        std::string field;
        uint64_t lines_in_space = 0;
        uint64_t lines_on_variety = 0;
        uint64_t free_lines = 0;
        std::map<std::string, uint64_t> splitting_histogram;
    };
    uint32_t n = 0;
    std::vector<uint32_t> degrees;
    std::vector<PerField> fields;
};

// Free-line census over each field in `fields`; every field must contain the
// coefficient field of polys (polys are transported along the canonical
// embedding).
inline FreenessReport freeness_census(const std::vector<MPoly>& polys, uint32_t n,
                                      const std::vector<FieldPtr>& fields,
                                      unsigned threads = 1) {
    if (polys.empty()) throw std::invalid_argument("need at least one polynomial");
    if (fields.empty()) throw std::invalid_argument("need at least one field");
    FreenessReport rep;
    rep.n = n;
    for (const auto& g : polys) rep.degrees.push_back(g.degree());
    const FieldPtr& base = polys.front().field();
    for (const FieldPtr& Fk : fields) {
        std::vector<MPoly> polys_k;
        if (*Fk == *base) {
            polys_k = polys;
        } else {
            FieldEmbedding phi(base, Fk);
            for (const auto& g : polys) polys_k.push_back(g.map_field(phi));
        }
        FreenessReport::PerField pf;
        pf.field = Fk->designation();
        LineEnumerator en(n, Fk);
        pf.lines_in_space = en.count();
        std::vector<Line> lines = lines_on_variety(polys_k, n, Fk, threads);
        pf.lines_on_variety = lines.size();
        for (const Line& L : lines) {
            SplittingType st = splitting_type(L, polys_k);
            pf.splitting_histogram[st.str()] += 1;
            if (st.is_free()) pf.free_lines += 1;
        }
        rep.fields.push_back(std::move(pf));
    }
    return rep;
}

}  // namespace fanolines
