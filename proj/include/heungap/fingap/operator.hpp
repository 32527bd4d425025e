#ifndef HEUNGAP_FINGAP_OPERATOR_HPP
#define HEUNGAP_FINGAP_OPERATOR_HPP

#include "../symalg/diffop.hpp"
#include "xi.hpp"

#include <string>
#include <vector>

namespace heungap
{

/// A = (-1)^g sum_j (a_j D - a_j'/2) H^{g-j}, monic of order 2g+1.
struct CommutingOperator
{
    symalg::PoleDiffOp op;
    std::vector<symalg::PoleFraction> a_seq; // a_0 .. a_g
    int genus = 0;
    int sign = 1; // the (-1)^g applied to the raw sum
};

struct CheckReport
{
    bool ok = true;
    std::string detail;
};

inline symalg::PoleDiffOp schrodinger_operator(const std::array<int, 4> &l, symalg::Context ctx)
{
    using DiffOp = symalg::PoleDiffOp;
    using RatFunc = symalg::PoleFraction;
    const RatFunc v = fingap_detail::potential_pf(l, ctx);
    return DiffOp({v, RatFunc(symalg::MultiPoly(ctx)), RatFunc(symalg::Rational(-1), ctx)});
}

inline CommutingOperator build_A(const XiFunction &xi)
{
    using DiffOp = symalg::PoleDiffOp;
    using RatFunc = symalg::PoleFraction;
    using symalg::Rational;
    const int g = xi.genus;
    const symalg::Context ctx = xi.ctx;
    CommutingOperator out;
    out.genus = g;
    out.sign = (g % 2 == 0) ? 1 : -1;
    for (int j = 0; j <= g; ++j) {
        out.a_seq.push_back(xi.e_coefficient(g - j));
    }
    const DiffOp H = schrodinger_operator(xi.l, ctx);
    // Horner-like accumulation: powers H^{g-j} built once.
    std::vector<DiffOp> hpow{DiffOp::derivative(0, ctx)};
    for (int k = 1; k <= g; ++k) {
        hpow.push_back(symalg::op_compose(hpow.back(), H));
    }
    DiffOp A;
    for (int j = 0; j <= g; ++j) {
        const RatFunc &aj = out.a_seq[static_cast<std::size_t>(j)];
        const DiffOp first({-symalg::derive_x(aj) * RatFunc(Rational(1, 2), ctx), aj});
        A = A + symalg::op_compose(first, hpow[static_cast<std::size_t>(g - j)]);
    }
    out.op = A * RatFunc(Rational(out.sign), ctx);
    return out;
}

/// [A, H] = 0 and a_j''' - 4 v a_j' - 2 v' a_j + 4 a_{j+1}' = 0 for all j.
inline CheckReport verify_commutation(const CommutingOperator &A, const std::array<int, 4> &l, symalg::Context ctx)
{
    using RatFunc = symalg::PoleFraction;
    using symalg::Rational;
    CheckReport rep;
    const symalg::PoleDiffOp H = schrodinger_operator(l, ctx);
    const symalg::PoleDiffOp c = symalg::op_commutator(A.op, H);
    if (!c.is_zero()) {
        rep.ok = false;
        rep.detail = "[A,H] = " + c.to_string();
        return rep;
    }
    const RatFunc v = fingap_detail::potential_pf(l, ctx);
    const RatFunc dv = symalg::derive_x(v);
    for (std::size_t j = 0; j < A.a_seq.size(); ++j) {
        const RatFunc &a = A.a_seq[j];
        const RatFunc a1 = symalg::derive_x(a);
        const RatFunc a3 = symalg::derive_x(symalg::derive_x(a1));
        RatFunc r = a3 - RatFunc(Rational(4), ctx) * v * a1 - RatFunc(Rational(2), ctx) * dv * a;
        if (j + 1 < A.a_seq.size()) {
            r += RatFunc(Rational(4), ctx) * symalg::derive_x(A.a_seq[j + 1]);
        }
        if (!r.is_zero()) {
            rep.ok = false;
            rep.detail = "a_" + std::to_string(j) + " recursion residual " + r.to_string();
            return rep;
        }
    }
    return rep;
}

/// A o A + Q(H) = 0.
inline CheckReport verify_burchnall_chaundy(const CommutingOperator &A, const SpectralPolynomial &Q,
                                            const std::array<int, 4> &l, symalg::Context ctx)
{
    using DiffOp = symalg::PoleDiffOp;
    using RatFunc = symalg::PoleFraction;
    CheckReport rep;
    if (Q.genus != A.genus) {
        rep.ok = false;
        rep.detail = "genus mismatch";
        return rep;
    }
    const DiffOp H = schrodinger_operator(l, ctx);
    DiffOp total = symalg::op_compose(A.op, A.op);
    DiffOp hp = DiffOp::derivative(0, ctx);
    const int deg = Q.coeffs.degree(symalg::Var::E);
    for (int m = 0; m <= deg; ++m) {
        const symalg::MultiPoly qm = Q.coeffs.coefficient_of(symalg::Var::E, m);
        if (!qm.is_zero()) {
            total = total + hp * RatFunc(qm.with_context(ctx));
        }
        if (m < deg) {
            hp = symalg::op_compose(hp, H);
        }
    }
    if (!total.is_zero()) {
        rep.ok = false;
        rep.detail = "A^2 + Q(H) = " + total.to_string();
    }
    return rep;
}

} // namespace heungap

#endif
