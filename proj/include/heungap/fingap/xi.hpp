#ifndef HEUNGAP_FINGAP_XI_HPP
#define HEUNGAP_FINGAP_XI_HPP

#include "../potential.hpp"
#include "../symalg/nullspace.hpp"
#include "../symalg/polefrac.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heungap
{

/// Signals a violated internal identity (an implementation bug, not bad input).
class ConsistencyError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

namespace fingap_detail
{

using symalg::Context;
using symalg::MultiPoly;
using symalg::Rational;
using symalg::Var;
using symalg::var;

using symalg::PoleFraction;

/// wp(x + omega_i) in the symbols of ctx (i = 0 gives z itself).
inline PoleFraction shifted_wp(int i, Context ctx)
{
    const MultiPoly z = var(Var::z, ctx);
    if (i == 0) {
        return {z, {0, 0, 0}};
    }
    const MultiPoly ei = symalg::e_symbol(i, ctx);
    MultiPoly prod(Rational(1), ctx);
    for (int j = 1; j <= 3; ++j) {
        if (j != i) {
            prod *= ei - symalg::e_symbol(j, ctx);
        }
    }
    PoleFraction::Orders k{0, 0, 0};
    k[static_cast<std::size_t>(i - 1)] = 1;
    return PoleFraction(ei * (z - ei) + prod, k);
}

inline PoleFraction pf_pow(const PoleFraction &p, int n)
{
    PoleFraction r(Rational(1), p.context());
    for (int i = 0; i < n; ++i) {
        r = r * p;
    }
    return r;
}

inline PoleFraction potential_pf(const std::array<int, 4> &l, Context ctx)
{
    PoleFraction v{MultiPoly(ctx)};
    for (int i = 0; i < 4; ++i) {
        const int li = l[static_cast<std::size_t>(i)];
        if (li > 0) {
            v += PoleFraction(Rational(li * (li + 1)), ctx) * shifted_wp(i, ctx);
        }
    }
    return v;
}

// Coefficients of the numerator in the basis z^a w^b over the remaining
// symbols.
inline std::map<std::pair<int, int>, MultiPoly> collect_zw(const MultiPoly &p)
{
    std::map<std::pair<int, int>, MultiPoly> out;
    for (const auto &[e, c] : p.terms()) {
        symalg::Exponents rest = e;
        const std::pair<int, int> key{e[symalg::index(Var::z)], e[symalg::index(Var::w)]};
        rest[symalg::index(Var::z)] = 0;
        rest[symalg::index(Var::w)] = 0;
        auto it = out.try_emplace(key, MultiPoly(Context::plain)).first;
        it->second += MultiPoly::term(rest, c);
    }
    return out;
}

} // namespace fingap_detail

/// Doubly periodic product solution
///   Xi = c0 + sum_i sum_{j<l_i} b[i][j] wp(x+omega_i)^{l_i-j}
/// with coefficients polynomial in E.
struct XiFunction
{
    std::array<int, 4> l{0, 0, 0, 0};
    symalg::Context ctx = symalg::Context::g_lattice;
    symalg::MultiPoly c0;
    std::array<std::vector<symalg::MultiPoly>, 4> b;
    int genus = 0;

    /// Xi as a fraction over prod (z - e_i)^k.
    symalg::PoleFraction as_pole_fraction() const
    {
        using namespace fingap_detail;
        PoleFraction xi{c0.with_context(ctx)};
        for (int i = 0; i < 4; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (l[ui] == 0) {
                continue;
            }
            const PoleFraction p = shifted_wp(i, ctx);
            for (int j = 0; j < l[ui]; ++j) {
                xi += PoleFraction(b[ui][static_cast<std::size_t>(j)].with_context(ctx)) * pf_pow(p, l[ui] - j);
            }
        }
        return xi;
    }

    /// The E^m coefficient of Xi as a function of x.
    symalg::PoleFraction e_coefficient(int m) const
    {
        using namespace fingap_detail;
        PoleFraction out{c0.coefficient_of(symalg::Var::E, m).with_context(ctx)};
        for (int i = 0; i < 4; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (l[ui] == 0) {
                continue;
            }
            const PoleFraction p = shifted_wp(i, ctx);
            for (int j = 0; j < l[ui]; ++j) {
                const MultiPoly c = b[ui][static_cast<std::size_t>(j)].coefficient_of(symalg::Var::E, m);
                if (!c.is_zero()) {
                    out += PoleFraction(c.with_context(ctx)) * pf_pow(p, l[ui] - j);
                }
            }
        }
        return out;
    }
};

/// Symbol context used for a given l: Lame cases are written in g2, g3, all
/// others in e1, e2.
inline symalg::Context xi_context(const std::array<int, 4> &l)
{
    return (l[1] == 0 && l[2] == 0 && l[3] == 0) ? symalg::Context::g_lattice : symalg::Context::e_lattice;
}

/// L[Xi] = Xi''' - 4(v - E) Xi' - 2 v' Xi.
inline symalg::PoleFraction product_operator(const symalg::PoleFraction &xi, const symalg::PoleFraction &v)
{
    using namespace fingap_detail;
    const Context ctx = xi.context();
    const PoleFraction d1 = derive_x(xi);
    const PoleFraction d3 = derive_x(derive_x(d1));
    const PoleFraction vmE = v - PoleFraction(var(Var::E, ctx));
    return d3 - PoleFraction(Rational(4), ctx) * vmE * d1 - PoleFraction(Rational(2), ctx) * derive_x(v) * xi;
}

/// Exact symbolic Xi for M = 0 by undetermined coefficients.
inline XiFunction compute_xi(const PotentialSpec &spec)
{
    using namespace fingap_detail;
    spec.validate();
    if (spec.M != 0) {
        throw std::invalid_argument("compute_xi: symbolic mode requires M = 0");
    }
    const Context ctx = xi_context(spec.l);
    const PoleFraction v = potential_pf(spec.l, ctx);

    // Basis functions in unknown order: 1, then wp(x+omega_i)^{l_i - j}.
    std::vector<PoleFraction> basis{PoleFraction(Rational(1), ctx)};
    for (int i = 0; i < 4; ++i) {
        if (spec.l[static_cast<std::size_t>(i)] == 0) {
            continue;
        }
        const PoleFraction p = shifted_wp(i, ctx);
        for (int j = 0; j < spec.l[static_cast<std::size_t>(i)]; ++j) {
            basis.push_back(pf_pow(p, spec.l[static_cast<std::size_t>(i)] - j));
        }
    }
    std::vector<PoleFraction> images;
    PoleFraction::Orders kmax{0, 0, 0};
    for (const auto &phi : basis) {
        images.push_back(product_operator(phi, v));
        for (std::size_t i = 0; i < 3; ++i) {
            kmax[i] = std::max(kmax[i], images.back().orders()[i]);
        }
    }
    std::map<std::pair<int, int>, std::vector<MultiPoly>> rows;
    const std::size_t n = basis.size();
    for (std::size_t m = 0; m < n; ++m) {
        for (auto &[key, c] : collect_zw(images[m].numerator_over(kmax))) {
            auto it = rows.try_emplace(key, std::vector<MultiPoly>(n, MultiPoly(Context::plain))).first;
            it->second[m] = c;
        }
    }
    symalg::PolyMatrix mat;
    for (auto &[key, row] : rows) {
        mat.push_back(std::move(row));
    }
    const auto ns = symalg::solve_nullspace(std::move(mat), n);
    if (ns.size() != 1) {
        throw ConsistencyError("compute_xi: nullspace dimension " + std::to_string(ns.size()) + ", expected 1");
    }
    std::vector<MultiPoly> sol = ns.front();
    const MultiPoly &c0 = sol.front();
    if (c0.is_zero()) {
        throw ConsistencyError("compute_xi: vanishing constant coefficient");
    }
    const int g = c0.degree(Var::E);
    const MultiPoly lead = c0.coefficient_of(Var::E, g);
    if (!lead.is_constant()) {
        throw ConsistencyError("compute_xi: leading coefficient of c0 is not a constant: " + lead.to_string());
    }
    const Rational lc = lead.constant_term();
    XiFunction xi;
    xi.l = spec.l;
    xi.ctx = ctx;
    xi.genus = g;
    xi.c0 = (sol[0] / lc).with_context(ctx);
    std::size_t pos = 1;
    for (std::size_t i = 0; i < 4; ++i) {
        for (int j = 0; j < spec.l[i]; ++j) {
            xi.b[i].push_back((sol[pos++] / lc).with_context(ctx));
        }
    }
    return xi;
}

/// Residual L[Xi]; zero iff Xi solves the product equation.
inline symalg::PoleFraction xi_residual(const XiFunction &xi)
{
    using namespace fingap_detail;
    return product_operator(xi.as_pole_fraction(), potential_pf(xi.l, xi.ctx));
}

/// Monic spectral polynomial Q(E) of degree 2g+1.
struct SpectralPolynomial
{
    symalg::MultiPoly coeffs;
    int genus = 0;
    std::vector<double> band_edges;
};

/// Q = Xi^2 (E - v) + Xi Xi''/2 - Xi'^2/4.
inline SpectralPolynomial compute_q(const XiFunction &xi)
{
    using namespace fingap_detail;
    const Context ctx = xi.ctx;
    const PoleFraction x0 = xi.as_pole_fraction();
    const PoleFraction x1 = derive_x(x0);
    const PoleFraction x2 = derive_x(x1);
    const PoleFraction v = potential_pf(xi.l, ctx);
    const PoleFraction Emv = PoleFraction(var(Var::E, ctx)) - v;
    const PoleFraction q = x0 * x0 * Emv + PoleFraction(Rational(1, 2), ctx) * x0 * x2
                           - PoleFraction(Rational(1, 4), ctx) * x1 * x1;
    const auto quotient = symalg::exact_divide(q.num().with_context(Context::plain), q.denominator().with_context(Context::plain));
    if (!quotient) {
        throw ConsistencyError("compute_q: numerator not divisible by the pole denominator");
    }
    if (quotient->contains(Var::z) || quotient->contains(Var::w)) {
        throw ConsistencyError("compute_q: x-dependent residue " + quotient->to_string());
    }
    SpectralPolynomial sp;
    sp.genus = xi.genus;
    sp.coeffs = quotient->with_context(ctx);
    const int deg = sp.coeffs.degree(Var::E);
    const MultiPoly lead = sp.coeffs.coefficient_of(Var::E, deg);
    if (deg != 2 * xi.genus + 1 || !lead.is_constant() || lead.constant_term() != 1) {
        throw ConsistencyError("compute_q: Q is not monic of degree 2g+1: " + sp.coeffs.to_string());
    }
    return sp;
}

/// Xi rewritten as c(E) + sum_i sum_j a[i][j](E) D^{2j} wp(x+omega_i).
struct XiDerivativeBasis
{
    symalg::MultiPoly a; // sum_i a[i][0]
    symalg::MultiPoly c;
    std::array<std::vector<symalg::MultiPoly>, 4> coeffs;
};

/// D^{2k} z as a polynomial in z, k = 0..n-1.
inline std::vector<symalg::MultiPoly> even_derivatives_of_wp(int n, symalg::Context ctx)
{
    using symalg::derive_x;
    std::vector<symalg::MultiPoly> out{symalg::var(symalg::Var::z, ctx)};
    while (static_cast<int>(out.size()) < n) {
        out.push_back(derive_x(derive_x(out.back())));
    }
    return out;
}

inline XiDerivativeBasis xi_derivative_basis(const XiFunction &xi)
{
    using namespace fingap_detail;
    const Context ctx = xi.ctx;
    XiDerivativeBasis out;
    out.c = xi.c0.with_context(ctx);
    out.a = MultiPoly(ctx);
    for (std::size_t i = 0; i < 4; ++i) {
        const int li = xi.l[i];
        if (li == 0) {
            continue;
        }
        const auto basis = even_derivatives_of_wp(li, ctx);
        // f(z) = sum_j b_j z^{l-j}; peel off the top degree with D^{2(d-1)} z,
        // whose leading coefficient in z is a nonzero rational.
        MultiPoly f(ctx);
        const MultiPoly z = var(Var::z, ctx);
        for (int j = 0; j < li; ++j) {
            f += xi.b[i][static_cast<std::size_t>(j)] * z.pow(static_cast<unsigned>(li - j));
        }
        std::vector<MultiPoly> a(static_cast<std::size_t>(li), MultiPoly(ctx));
        for (int d = li; d >= 1; --d) {
            const MultiPoly top = f.coefficient_of(Var::z, d);
            if (top.is_zero()) {
                continue;
            }
            const MultiPoly &bd = basis[static_cast<std::size_t>(d - 1)];
            const Rational lc = bd.coefficient_of(Var::z, d).constant_term();
            const MultiPoly coef = top / lc;
            a[static_cast<std::size_t>(d - 1)] = coef;
            f -= coef * bd;
        }
        if (f.contains(Var::z) || f.contains(Var::w)) {
            throw ConsistencyError("xi_derivative_basis: remainder is not constant");
        }
        out.c += f;
        out.a += a[0];
        out.coeffs[i] = std::move(a);
    }
    return out;
}

} // namespace heungap

#endif
