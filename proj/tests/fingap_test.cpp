#include <heungap/fingap.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace heungap;
using symalg::Context;
using symalg::MultiPoly;
using symalg::PoleDiffOp;
using symalg::PoleFraction;
using symalg::Rational;
using symalg::Var;
using symalg::var;

namespace
{

const Context G = Context::g_lattice;

MultiPoly E() { return var(Var::E, G); }
MultiPoly g2() { return var(Var::g2, G); }
MultiPoly g3() { return var(Var::g3, G); }
MultiPoly wp() { return var(Var::z, G); }
MultiPoly wpd() { return var(Var::w, G); }

HeunParams fuchsian(cplx alpha, cplx beta, cplx gamma, cplx delta, cplx q, cplx t)
{
    return {alpha, beta, gamma, delta, alpha + beta + 1.0 - gamma - delta, q, t};
}

// Residuals of the gauge-transformed Heun equation at x: the coefficients of
// y and y_z in -f'' + (v - E) f after eliminating y_zz with Heun's equation.
std::pair<cplx, cplx> gauge_residual(const HeunParams &h, const EllipticForm &ef, const Lattice &lat, cplx x)
{
    const Weierstrass wf(lat);
    const cplx s = lat.e2 - lat.e1;
    const cplx p = wf.wp(x), p1 = wf.wp_prime(x), p2 = wf.wp_second(x);
    const cplx Z = (p - lat.e1) / s, Zx = p1 / s, Zxx = p2 / s;
    const std::array<cplx, 3> zi{0.0, 1.0, h.t};
    cplx g1 = 0.0, gsq = 0.0, P = 0.0;
    const std::array<cplx, 3> heun_exp{h.gamma, h.delta, h.epsilon};
    for (std::size_t i = 0; i < 3; ++i) {
        const cplx a = -ef.l_raw[i + 1] / 2.0;
        g1 += a / (Z - zi[i]);
        gsq += a / ((Z - zi[i]) * (Z - zi[i]));
        P += heun_exp[i] / (Z - zi[i]);
    }
    const cplx g2v = g1 * g1 - gsq;
    const cplx R = (h.alpha * h.beta * Z - h.q) / (Z * (Z - 1.0) * (Z - h.t));
    cplx v = 0.0;
    for (int i = 0; i < 4; ++i) {
        const cplx li = ef.l_raw[static_cast<std::size_t>(i)];
        v += li * (li + 1.0) * wf.wp(x + lat.half_period(i));
    }
    const cplx coef_yz = (-P + 2.0 * g1) * Zx * Zx + Zxx;
    const cplx coef_y = -((-R + g2v) * Zx * Zx + g1 * Zxx) + v - ef.E;
    return {coef_yz, coef_y};
}

} // namespace

// ---------------------------------------------------------------------------
// Heun <-> elliptic form

TEST(HeunTransform, LameExponentsGiveZeroShifts)
{
    const auto ef = heun_to_elliptic(fuchsian(0.2, 0.3, 0.5, 0.5, 0.3, 2.0));
    EXPECT_LT(std::abs(ef.l[1]), 1e-15);
    EXPECT_LT(std::abs(ef.l[2]), 1e-15);
    EXPECT_LT(std::abs(ef.l[3]), 1e-15);
}

TEST(HeunTransform, GaugeFactorProducesEllipticForm)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (const auto &[w1, w3] : {std::pair<cplx, cplx>{1.0, cplx(0.0, 1.0)}, {1.0, cplx(0.3, 0.9)}}) {
        const Lattice lat = lattice_from_periods(w1, w3);
        const cplx t = (lat.e3 - lat.e1) / (lat.e2 - lat.e1);
        for (int trial = 0; trial < 5; ++trial) {
            const HeunParams h = fuchsian(cplx(uni(rng), uni(rng)), cplx(uni(rng), uni(rng)), cplx(uni(rng), uni(rng)),
                                          cplx(uni(rng), uni(rng)), cplx(uni(rng), uni(rng)), t);
            const auto ef = heun_to_elliptic(h, lat.e2 - lat.e1);
            for (const cplx x : {cplx(0.37, 0.21), cplx(0.81, 0.55), cplx(-0.2, 0.33)}) {
                const auto [ryz, ry] = gauge_residual(h, ef, lat, x);
                EXPECT_LT(std::abs(ryz), 1e-9) << x;
                EXPECT_LT(std::abs(ry), 1e-8) << x;
            }
        }
    }
}

TEST(HeunTransform, RoundTrip)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.3, 0.9));
    const cplx t = (lat.e3 - lat.e1) / (lat.e2 - lat.e1);
    const HeunParams h = fuchsian(cplx(0.3, 0.1), cplx(-1.2, 0.4), cplx(0.7, -0.2), cplx(1.1, 0.3), cplx(0.25, 0.5), t);
    const auto ef = heun_to_elliptic(h, lat.e2 - lat.e1);
    const HeunParams back = elliptic_to_heun(ef.l_raw, ef.E, lat);
    for (const auto &[a, b] : {std::pair{h.alpha, back.alpha}, {h.beta, back.beta}, {h.gamma, back.gamma},
                               {h.delta, back.delta}, {h.epsilon, back.epsilon}, {h.q, back.q}, {h.t, back.t}}) {
        EXPECT_LT(std::abs(a - b), 1e-12);
    }
    EXPECT_LT(std::abs(back.fuchs_defect()), 1e-12);
    const auto ef2 = heun_to_elliptic(back, lat.e2 - lat.e1);
    EXPECT_LT(std::abs(ef2.E - ef.E), 1e-12);
}

TEST(HeunTransform, LameOneInverse)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.0, 1.0));
    const HeunParams h = elliptic_to_heun({1.0, 0.0, 0.0, 0.0}, 0.7, lat);
    EXPECT_LT(std::abs(h.gamma - 0.5), 1e-15);
    EXPECT_LT(std::abs(h.delta - 0.5), 1e-15);
    EXPECT_LT(std::abs(h.epsilon - 0.5), 1e-15);
    EXPECT_LT(std::abs(h.beta - h.alpha - 1.5), 1e-15);
    // Square lattice: e2 = 0, e3 = -e1, so t = 2.
    EXPECT_LT(std::abs(h.t - 2.0), 1e-12);
}

TEST(HeunTransform, ReflectionToNonNegativeL)
{
    const auto ef = heun_to_elliptic(fuchsian(1.5, -1.0, 0.5, 0.5, 0.1, 2.0));
    EXPECT_LT(std::abs(ef.l_raw[0] + 3.0), 1e-15);
    EXPECT_LT(std::abs(ef.l[0] - 2.0), 1e-15);
    std::array<int, 4> li{};
    ASSERT_TRUE(ef.integral_l(li));
    EXPECT_EQ(li, (std::array<int, 4>{2, 0, 0, 0}));
}

TEST(HeunTransform, FuchsViolationRejected)
{
    EXPECT_THROW(heun_to_elliptic(HeunParams{3.0, 0.5, 0.5, 0.5, 0.5, 0.1, 2.0}), std::invalid_argument);
}

TEST(HeunTransform, DegenerateLatticeRejectedByInverse)
{
    Lattice lat = lattice_from_periods(1.0, cplx(0.0, 1.0));
    lat.e2 = lat.e1;
    EXPECT_THROW(elliptic_to_heun({1.0, 0.0, 0.0, 0.0}, 0.0, lat), LatticeError);
}

// ---------------------------------------------------------------------------
// Symbolic Xi, Q, A

TEST(FingapSymbolic, ZeroPotential)
{
    const auto xi = compute_xi(PotentialSpec::lame(0));
    EXPECT_EQ(xi.genus, 0);
    EXPECT_EQ(xi.c0, MultiPoly(Rational(1), G));
    EXPECT_EQ(compute_q(xi).coeffs, E());
    const auto A = build_A(xi);
    EXPECT_EQ(A.op, PoleDiffOp::derivative(1, G));
    const auto q = compute_q(xi);
    EXPECT_TRUE(verify_burchnall_chaundy(A, q, xi.l, xi.ctx).ok);
    const auto db = xi_derivative_basis(xi);
    EXPECT_TRUE(db.a.is_zero());
    EXPECT_EQ(db.c, MultiPoly(Rational(1), G));
}

TEST(FingapSymbolic, LameOne)
{
    const auto xi = compute_xi(PotentialSpec::lame(1));
    EXPECT_EQ(xi.genus, 1);
    EXPECT_EQ(xi.c0, E());
    ASSERT_EQ(xi.b[0].size(), 1u);
    EXPECT_EQ(xi.b[0][0], MultiPoly(Rational(1), G));
    const auto q = compute_q(xi);
    EXPECT_EQ(q.coeffs, E().pow(3) - g2() * E() / Rational(4) + g3() / Rational(4));
    const auto A = build_A(xi);
    const PoleDiffOp expect({PoleFraction(Rational(-3, 2) * wpd()), PoleFraction(Rational(-3) * wp()),
                             PoleFraction(MultiPoly(G)), PoleFraction(Rational(1), G)});
    EXPECT_EQ(A.op, expect) << A.op.to_string();
    EXPECT_TRUE(verify_commutation(A, xi.l, xi.ctx).ok);
    EXPECT_TRUE(verify_burchnall_chaundy(A, q, xi.l, xi.ctx).ok);
    const auto db = xi_derivative_basis(xi);
    EXPECT_EQ(db.a, MultiPoly(Rational(1), G));
    EXPECT_EQ(db.c, E());
}

TEST(FingapSymbolic, LameOneQRootsAreMinusE)
{
    // In the e-symbols, Q = (E + e1)(E + e2)(E + e3).
    const auto xi = compute_xi(PotentialSpec{{0, 1, 0, 0}, 0, {}});
    const Context C = Context::e_lattice;
    const MultiPoly Ee = var(Var::E, C);
    const MultiPoly expect = (Ee + symalg::e_symbol(1, C)) * (Ee + symalg::e_symbol(2, C)) * (Ee + symalg::e_symbol(3, C));
    EXPECT_EQ(compute_q(xi).coeffs, expect);
}

TEST(FingapSymbolic, LameTwoExample)
{
    const auto xi = compute_xi(PotentialSpec::lame(2));
    EXPECT_EQ(xi.genus, 2);
    EXPECT_EQ(xi.c0, E().pow(2) - Rational(9, 4) * g2());
    EXPECT_EQ(xi.b[0][0], MultiPoly(Rational(9), G));
    EXPECT_EQ(xi.b[0][1], Rational(3) * E());
    const auto q = compute_q(xi);
    EXPECT_EQ(q.coeffs,
              (E().pow(2) - Rational(3) * g2()) * (E().pow(3) - Rational(9, 4) * g2() * E() - Rational(27, 4) * g3()));
    const auto A = build_A(xi);
    const PoleDiffOp expect({PoleFraction(MultiPoly(G)), PoleFraction(Rational(-45) * wp().pow(2) + Rational(27, 4) * g2()),
                             PoleFraction(Rational(-45, 2) * wpd()), PoleFraction(Rational(-15) * wp()),
                             PoleFraction(MultiPoly(G)), PoleFraction(Rational(1), G)});
    EXPECT_EQ(A.op, expect) << A.op.to_string();
    EXPECT_EQ(A.sign, 1);
    EXPECT_TRUE(verify_commutation(A, xi.l, xi.ctx).ok);
    EXPECT_TRUE(verify_burchnall_chaundy(A, q, xi.l, xi.ctx).ok);
    const auto db = xi_derivative_basis(xi);
    EXPECT_EQ(db.a, Rational(3) * E());
    EXPECT_EQ(db.c, E().pow(2) - Rational(3, 2) * g2());
}

TEST(FingapSymbolic, LameGenusEqualsL)
{
    for (int n = 0; n <= 6; ++n) {
        const auto xi = compute_xi(PotentialSpec::lame(n));
        EXPECT_EQ(xi.genus, n);
        EXPECT_EQ(compute_q(xi).coeffs.degree(Var::E), 2 * n + 1);
    }
}

TEST(FingapSymbolic, WrongXiDetected)
{
    auto xi = compute_xi(PotentialSpec::lame(2));
    EXPECT_TRUE(xi_residual(xi).is_zero());
    xi.b[0][1] = Rational(2) * E();
    EXPECT_FALSE(xi_residual(xi).is_zero());
    EXPECT_THROW(compute_q(xi), ConsistencyError);
}

TEST(FingapSymbolic, NonCommutingOperatorReported)
{
    const auto xi = compute_xi(PotentialSpec::lame(1));
    auto A = build_A(xi);
    A.op = A.op + PoleDiffOp::derivative(2, G);
    const auto rep = verify_commutation(A, xi.l, xi.ctx);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.detail.empty());
}

TEST(FingapSymbolic, SymbolicModeRejectsDeltas)
{
    EXPECT_THROW(compute_xi(PotentialSpec{{0, 0, 0, 0}, 1, {cplx(0.5, 0.5)}}), std::invalid_argument);
}

// All l with l0+l1+l2+l3 <= 4: Xi solves the product equation, Q is monic of
// degree 2g+1 with no x-dependence, deg b < g, the coefficients are coprime,
// [A,H] = 0 and A^2 + Q(H) = 0.
TEST(FingapSymbolic, TreibichVerdierSweep)
{
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; a + b <= 4; ++b) {
            for (int c = 0; a + b + c <= 4; ++c) {
                for (int d = 0; a + b + c + d <= 4; ++d) {
                    const std::array<int, 4> l{a, b, c, d};
                    SCOPED_TRACE(testing::Message() << a << b << c << d);
                    const auto xi = compute_xi(PotentialSpec{l, 0, {}});
                    EXPECT_TRUE(xi_residual(xi).is_zero());
                    MultiPoly g = xi.c0.with_context(Context::plain);
                    for (const auto &bi : xi.b) {
                        for (const auto &bij : bi) {
                            EXPECT_LT(bij.degree(Var::E), xi.genus);
                            g = symalg::gcd(g, bij);
                        }
                    }
                    EXPECT_TRUE(g.is_constant());
                    const auto q = compute_q(xi);
                    const auto A = build_A(xi);
                    EXPECT_EQ(A.op.order(), 2 * xi.genus + 1);
                    EXPECT_TRUE(verify_commutation(A, l, xi.ctx).ok);
                    EXPECT_TRUE(verify_burchnall_chaundy(A, q, l, xi.ctx).ok);
                }
            }
        }
    }
}

TEST(FingapSymbolic, SymbolicMatchesCollocation)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.2, 1.1));
    for (const std::array<int, 4> l : {std::array<int, 4>{2, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 2, 1}}) {
        const auto xi = compute_xi(PotentialSpec{l, 0, {}});
        const cplx Ev(0.7, 0.2);
        std::array<cplx, symalg::kNumVars> vals{};
        vals[symalg::index(Var::e1)] = lat.e1;
        vals[symalg::index(Var::e2)] = lat.e2;
        vals[symalg::index(Var::g2)] = lat.g2;
        vals[symalg::index(Var::g3)] = lat.g3;
        vals[symalg::index(Var::E)] = Ev;
        const cplx c0 = xi.c0.evaluate(vals);
        const auto nx = compute_xi_numeric(PotentialSpec{l, 0, {}}, lat, Ev);
        EXPECT_EQ(nx.nullity, 1);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < xi.b[i].size(); ++j) {
                EXPECT_LT(std::abs(xi.b[i][j].evaluate(vals) / c0 - nx.b[i][j]), 1e-8);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// M = 1

TEST(DeltaCondition, OddInDelta)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.0, 1.0));
    const Weierstrass wf(lat);
    for (const std::array<int, 4> l : {std::array<int, 4>{0, 0, 0, 0}, {1, 2, 0, 1}}) {
        const cplx d(0.31, 0.47);
        EXPECT_LT(std::abs(delta_condition(l, wf, d) + delta_condition(l, wf, -d)), 1e-10);
    }
}

TEST(DeltaCondition, ZeroLOnSquareLatticeMatchesDiagonalBisection)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.0, 1.0));
    const Weierstrass wf(lat);
    const std::array<int, 4> l{0, 0, 0, 0};
    // The condition is a real multiple of (1+i) on the diagonal; bisect its real part.
    auto f = [&](double s) { return delta_condition(l, wf, s * cplx(1.0, 1.0) * lat.omega1).real(); };
    double lo = 0.1, hi = 0.9;
    ASSERT_LT(f(lo) * f(hi), 0.0);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
    }
    const cplx oracle = 0.5 * (lo + hi) * cplx(1.0, 1.0);
    const cplx d = solve_delta_condition(l, lat);
    EXPECT_LT(std::abs(delta_condition(l, wf, d)), 1e-10);
    // Roots come in pairs +-delta modulo the lattice.
    const double dist = std::min(std::abs(detail::reduce_argument(d - oracle, lat.eval_omega1, lat.eval_omega3).x0),
                                 std::abs(detail::reduce_argument(d + oracle, lat.eval_omega1, lat.eval_omega3).x0));
    EXPECT_LT(dist, 1e-9);
}

TEST(DeltaCondition, NumericXiHasOneDimensionalNullspace)
{
    const Lattice lat = lattice_from_periods(1.0, cplx(0.0, 1.0));
    const Weierstrass wf(lat);
    for (const std::array<int, 4> l : {std::array<int, 4>{0, 0, 0, 0}, {1, 0, 0, 0}}) {
        const cplx d = solve_delta_condition(l, lat);
        EXPECT_LT(std::abs(delta_condition(l, wf, d)), 1e-10);
        EXPECT_GE(detail::distance_to_half_periods(lat, d), 0.05);
        for (const cplx Ev : {cplx(0.3, 0.1), cplx(2.0, 0.0), cplx(-1.5, 0.7)}) {
            const auto nx = compute_xi_numeric(PotentialSpec{l, 1, {d}}, lat, Ev);
            EXPECT_EQ(nx.nullity, 1);
            EXPECT_LT(nx.residual, 1e-8);
        }
        // A delta violating the condition admits no doubly periodic product.
        const auto bad = compute_xi_numeric(PotentialSpec{l, 1, {cplx(0.3, 0.2)}}, lat, 0.3);
        EXPECT_EQ(bad.nullity, 0);
    }
}
