#include <heungap/symalg/diffop.hpp>
#include <heungap/symalg/multipoly.hpp>
#include <heungap/symalg/nullspace.hpp>
#include <heungap/symalg/ratfunc.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace heungap::symalg;

namespace
{

MultiPoly V(Var v, Context c = Context::g_lattice) { return var(v, c); }

MultiPoly random_poly(std::mt19937 &rng, Context ctx)
{
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, 2);
    MultiPoly p(ctx);
    for (int t = 0; t < 4; ++t) {
        Exponents e{};
        e[index(Var::z)] = deg(rng);
        e[index(Var::w)] = deg(rng) % 2;
        e[index(Var::g2)] = deg(rng) % 2;
        p += MultiPoly::term(e, Rational(coef(rng)), ctx);
    }
    return p;
}

} // namespace

TEST(MultiPoly, WSquaredReducesInELattice)
{
    const auto ctx = Context::e_lattice;
    const auto w = V(Var::w, ctx), z = V(Var::z, ctx), e1 = V(Var::e1, ctx), e2 = V(Var::e2, ctx);
    EXPECT_EQ(w * w, Rational(4) * (z - e1) * (z - e2) * (z + e1 + e2));
    EXPECT_EQ((w * w).degree(Var::w), 0);
}

TEST(MultiPoly, DifferenceOfSquares)
{
    const auto E = V(Var::E, Context::plain), z = V(Var::z, Context::plain);
    EXPECT_EQ((E + z) * (E - z), E * E - z * z);
}

TEST(MultiPoly, G2InELattice)
{
    const auto ctx = Context::e_lattice;
    const auto e1 = V(Var::e1, ctx), e2 = V(Var::e2, ctx);
    const auto e3 = -e1 - e2;
    // -4(e1e2 + e2e3 + e3e1) expanded by hand is 4(e1^2 + e1e2 + e2^2).
    EXPECT_EQ(Rational(-4) * (e1 * e2 + e2 * e3 + e3 * e1), Rational(4) * (e1 * e1 + e1 * e2 + e2 * e2));
    EXPECT_EQ(g2_of(ctx), Rational(4) * (e1 * e1 + e1 * e2 + e2 * e2));
}

TEST(MultiPoly, MixedContextsRejected)
{
    EXPECT_THROW(V(Var::z, Context::e_lattice) + V(Var::z, Context::g_lattice), ContextError);
    EXPECT_NO_THROW(V(Var::z, Context::plain) * V(Var::z, Context::g_lattice));
}

TEST(MultiPoly, Rendering)
{
    const auto E = V(Var::E), g2 = V(Var::g2), g3 = V(Var::g3);
    const auto q = E.pow(3) - g2 * E / Rational(4) + g3 / Rational(4);
    EXPECT_EQ(q.to_string(), "E^3 - (1/4)*g2*E + (1/4)*g3");
    EXPECT_EQ(MultiPoly(Context::plain).to_string(), "0");
    EXPECT_EQ((-MultiPoly(Rational(9, 4))).to_string(), "-(9/4)");
}

TEST(DeriveX, BasicRules)
{
    const auto z = V(Var::z), w = V(Var::w), g2 = V(Var::g2);
    EXPECT_EQ(derive_x(z), w);
    EXPECT_EQ(derive_x(w), Rational(6) * z * z - g2 / Rational(2));
    EXPECT_EQ(derive_x(z * z), Rational(2) * z * w);
    EXPECT_EQ(derive_x(V(Var::zeta)), -z);
    EXPECT_EQ(derive_x(V(Var::x)), MultiPoly(Rational(1)));
}

TEST(DeriveX, ReductionRuleIsCompatibleWithDerivation)
{
    for (auto ctx : {Context::g_lattice, Context::e_lattice}) {
        const auto z = V(Var::z, ctx), w = V(Var::w, ctx);
        const auto cubic = Rational(4) * z.pow(3) - g2_of(ctx) * z - g3_of(ctx);
        EXPECT_EQ(derive_x(w * w), derive_x(cubic));
    }
}

TEST(DeriveX, LeibnizOnRandomPolynomials)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_poly(rng, Context::g_lattice);
        const auto g = random_poly(rng, Context::g_lattice);
        EXPECT_EQ(derive_x(f * g), derive_x(f) * g + f * derive_x(g));
    }
}

TEST(DeriveX, WkbUDerivative)
{
    const auto ctx = Context::wkb;
    const auto u = V(Var::u, ctx), z = V(Var::z, ctx), E = V(Var::E, ctx);
    EXPECT_EQ(u * u, z - E);
    // (u^2)' = z' = w, consistent with u' = w/(2u).
    EXPECT_EQ(derive_x(u * u), V(Var::w, ctx));
    EXPECT_EQ(Rational(2) * u * derive_x(u), V(Var::w, ctx));
    const auto uinv = MultiPoly::monomial(Var::u, -1, ctx);
    EXPECT_EQ(u * uinv, MultiPoly(Rational(1), ctx));
    // z u^-2 = 1 + E u^-2 holds in the algebra.
    EXPECT_EQ(z * uinv * uinv, MultiPoly(Rational(1), ctx) + E * uinv * uinv);
}

TEST(Gcd, Multivariate)
{
    const auto z = V(Var::z, Context::plain), e1 = V(Var::e1, Context::plain), E = V(Var::E, Context::plain);
    const auto a = (z - e1) * (z - e1) * (E + z);
    const auto b = (z - e1) * (E - e1);
    EXPECT_EQ(gcd(a, b), z - e1);
    EXPECT_EQ(gcd(a * (E + z), (E + z) * (E + z) * e1), (E + z).pow(2));
    EXPECT_EQ(gcd(a, (E + z) * (E + z) * e1), E + z);
    EXPECT_EQ(gcd(Rational(6) * z, Rational(4) * z * z), z);
}

TEST(RatFunc, CancelsCommonFactors)
{
    const auto z = V(Var::z, Context::plain), e1 = V(Var::e1, Context::plain);
    const RatFunc f((z * z - e1 * e1), Rational(2) * (z - e1));
    EXPECT_TRUE(f.is_polynomial());
    EXPECT_EQ(f.num(), (z + e1) / Rational(2));
    const RatFunc g(MultiPoly(Rational(1)), z - e1);
    EXPECT_EQ((g + g) * RatFunc(z - e1), RatFunc(MultiPoly(Rational(2))));
}

TEST(Nullspace, SmallCases)
{
    PolyMatrix id{{MultiPoly(1), MultiPoly(0)}, {MultiPoly(0), MultiPoly(1)}};
    EXPECT_TRUE(solve_nullspace(id, 2).empty());

    PolyMatrix ones{{MultiPoly(1), MultiPoly(1)}, {MultiPoly(1), MultiPoly(1)}};
    const auto ns = solve_nullspace(ones, 2);
    ASSERT_EQ(ns.size(), 1U);
    EXPECT_EQ(ns[0][0] * Rational(-1), ns[0][1]);
    EXPECT_FALSE(ns[0][0].is_zero());
}

TEST(Nullspace, AnnihilatesSymbolicMatrix)
{
    const auto E = V(Var::E, Context::plain), e1 = V(Var::e1, Context::plain), e2 = V(Var::e2, Context::plain);
    PolyMatrix m{{E, e1, e2 + E}, {E * e1, e1 * e1, e1 * e2 + E * e1}};
    const auto ns = solve_nullspace(m, 3);
    ASSERT_EQ(ns.size(), 2U);
    for (const auto &v : ns) {
        for (const auto &row : m) {
            MultiPoly s(Context::plain);
            for (std::size_t j = 0; j < 3; ++j) {
                s += row[j] * v[j];
            }
            EXPECT_TRUE(s.is_zero());
        }
    }
}

TEST(DiffOp, ComposeAndCommutator)
{
    const auto ctx = Context::g_lattice;
    const auto z = V(Var::z, ctx), w = V(Var::w, ctx), g2 = V(Var::g2, ctx);
    const auto D = DiffOp::derivative(1, ctx);
    EXPECT_EQ(op_compose(D, D), DiffOp::derivative(2, ctx));
    const auto D2 = DiffOp::derivative(2, ctx);
    const auto zop = DiffOp::multiplication(RatFunc(z));
    const DiffOp expected({RatFunc(Rational(6) * z * z - g2 / Rational(2)), RatFunc(Rational(2) * w)});
    EXPECT_EQ(op_commutator(D2, zop), expected);
    const DiffOp A({RatFunc(w), RatFunc(z), RatFunc(MultiPoly(1, ctx))});
    EXPECT_TRUE(op_commutator(A, A).is_zero());
}

TEST(DiffOp, CompositionIsAssociative)
{
    std::mt19937 rng(11);
    const auto ctx = Context::g_lattice;
    for (int trial = 0; trial < 5; ++trial) {
        auto rnd = [&] {
            return DiffOp({RatFunc(random_poly(rng, ctx)), RatFunc(random_poly(rng, ctx)),
                           RatFunc(random_poly(rng, ctx))});
        };
        const auto a = rnd(), b = rnd(), c = rnd();
        EXPECT_EQ(op_compose(op_compose(a, b), c), op_compose(a, op_compose(b, c)));
    }
}
