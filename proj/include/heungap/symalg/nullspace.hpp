#ifndef HEUNGAP_SYMALG_NULLSPACE_HPP
#define HEUNGAP_SYMALG_NULLSPACE_HPP

#include "ratfunc.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace heungap::symalg
{

using PolyMatrix = std::vector<std::vector<MultiPoly>>;
using PolyVector = std::vector<MultiPoly>;

/// Nullspace over the fraction field of a polynomial matrix.
///
/// Fraction-free Gauss-Jordan elimination (Bareiss): every division is exact
/// and all pivots end up equal to the last leading minor d, so the basis
/// vector for a free column f is x_f = d, x_{p_i} = -R[i][f]. Vectors are
/// returned with their polynomial content removed.
inline std::vector<PolyVector> solve_nullspace(PolyMatrix m, std::size_t ncols)
{
    const std::size_t nrows = m.size();
    for (auto &row : m) {
        if (row.size() != ncols) {
            throw std::invalid_argument("solve_nullspace: ragged matrix");
        }
        for (auto &e : row) {
            e = e.with_context(Context::plain);
        }
    }
    MultiPoly prev(Rational(1));
    std::vector<std::size_t> pivot_cols;
    std::vector<bool> is_pivot(ncols, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < nrows; ++c) {
        // Prefer the sparsest nonzero pivot to limit expression swell.
        std::optional<std::size_t> p;
        for (std::size_t i = r; i < nrows; ++i) {
            if (!m[i][c].is_zero() && (!p || m[i][c].size() < m[*p][c].size())) {
                p = i;
            }
        }
        if (!p) {
            continue;
        }
        std::swap(m[r], m[*p]);
        const MultiPoly piv = m[r][c];
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == r) {
                continue;
            }
            const MultiPoly factor = m[i][c];
            for (std::size_t j = 0; j < ncols; ++j) {
                if (j == c) {
                    continue;
                }
                MultiPoly v = piv * m[i][j];
                if (!factor.is_zero() && !m[r][j].is_zero()) {
                    v -= factor * m[r][j];
                }
                m[i][j] = prev.is_constant() ? v / prev.constant_term() : divide_or_throw(v, prev);
            }
            m[i][c] = MultiPoly(Context::plain);
        }
        prev = piv;
        pivot_cols.push_back(c);
        is_pivot[c] = true;
        ++r;
    }

    std::vector<PolyVector> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        PolyVector v(ncols, MultiPoly(Context::plain));
        v[f] = prev;
        for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
            v[pivot_cols[i]] = -m[i][f];
        }
        MultiPoly g(Context::plain);
        for (const auto &e : v) {
            g = gcd(g, e);
        }
        if (!g.is_zero() && !(g.is_constant() && g.constant_term() == 1)) {
            for (auto &e : v) {
                e = divide_or_throw(e, g);
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Nullspace of a matrix of rational functions: rows are cleared of
/// denominators first, which does not change the solution space.
inline std::vector<PolyVector> solve_nullspace(const std::vector<std::vector<RatFunc>> &m, std::size_t ncols)
{
    PolyMatrix pm;
    pm.reserve(m.size());
    for (const auto &row : m) {
        MultiPoly l(Rational(1));
        for (const auto &e : row) {
            l = lcm(l, e.den());
        }
        PolyVector prow;
        prow.reserve(row.size());
        for (const auto &e : row) {
            prow.push_back(divide_or_throw(l * e.num().with_context(Context::plain), e.den()));
        }
        pm.push_back(std::move(prow));
    }
    return solve_nullspace(std::move(pm), ncols);
}

} // namespace heungap::symalg

#endif
