#ifndef HEUNGAP_MONODROMY_HK_HPP
#define HEUNGAP_MONODROMY_HK_HPP

#include "hyperelliptic.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace heungap
{

/// Parameters of the sigma-function ansatz; m_k = exp(-2 eta_k alpha + 2 omega_k zeta(alpha) + 2 kappa omega_k).
struct HKParams
{
    cplx alpha;
    cplx kappa;
    cplx wp_alpha;
    double residual = 0.0;
};

class ExcludedPointError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

inline cplx hk_multiplier(const HKParams &h, const Lattice &lat, int k)
{
    const Weierstrass wf(lat);
    return std::exp(-2.0 * lat.eta(k) * h.alpha + 2.0 * lat.omega(k) * wf.zeta(h.alpha) + 2.0 * h.kappa * lat.omega(k));
}

/// (alpha, kappa) from a multiplier pair. The exponents are linear in alpha
/// and zeta(alpha) + kappa; the Legendre relation fixes the determinant, and
/// the log branches only move alpha by periods, which leaves kappa unchanged.
inline HKParams hk_extract(cplx m1, cplx m3, const Lattice &lat)
{
    if (m1 == 0.0 || m3 == 0.0) {
        throw std::invalid_argument("hk_extract: zero multiplier");
    }
    const cplx L1 = std::log(m1), L3 = std::log(m3);
    const cplx w1 = lat.omega1, w3 = lat.omega3, h1 = lat.eta1, h3 = lat.eta3;
    const cplx det = h1 * w3 - h3 * w1; // pi i / 2
    const cplx alpha_raw = -(w3 * L1 - w1 * L3) / (2.0 * det);
    const cplx z = (L1 + 2.0 * h1 * alpha_raw) / (2.0 * w1);
    const Weierstrass wf(lat);
    HKParams h;
    h.alpha = detail::reduce_argument(alpha_raw, lat.eval_omega1, lat.eval_omega3).x0;
    const auto r = detail::reduce_argument(alpha_raw, lat.eval_omega1, lat.eval_omega3);
    if (std::abs(r.x0) < 1e-12 * std::abs(w1)) {
        throw ExcludedPointError("hk_extract: alpha is a lattice point");
    }
    h.kappa = z - wf.zeta(alpha_raw);
    h.wp_alpha = wf.wp(h.alpha);
    h.residual = std::max(std::abs(hk_multiplier(h, lat, 1) - m1) / std::abs(m1),
                          std::abs(hk_multiplier(h, lat, 3) - m3) / std::abs(m3));
    return h;
}

/// Lame l = 1: wp(alpha) = -E, wp'(alpha) = 2 sqrt(-Q), kappa = 0.
inline HKParams hk_example_l1(cplx E, cplx sqrt_minus_q, const Lattice &lat)
{
    HKParams h;
    h.wp_alpha = -E;
    h.alpha = wp_inverse(lat, h.wp_alpha, 2.0 * sqrt_minus_q);
    h.kappa = 0.0;
    return h;
}

namespace detail
{

inline cplx l2_cubic(cplx E, const Lattice &lat) { return E * E * E - 2.25 * lat.g2 * E - 6.75 * lat.g3; }

} // namespace detail

/// Lame l = 2 closed form:
///   wp(alpha) = -(E^3 - 27 g3) / (9 (E^2 - 3 g2)),
///   wp'(alpha) = 2 (E^3 - 9 g2 E + 54 g3) sqrt(-Q) / (27 (E^2 - 3 g2)^2),
///   kappa = (2/3) sqrt(-Q) / (E^2 - 3 g2).
inline HKParams hk_example_l2(cplx E, cplx sqrt_minus_q, const Lattice &lat)
{
    const cplx D = E * E - 3.0 * lat.g2;
    if (std::abs(D) <= 1e-12 * (std::abs(E * E) + std::abs(3.0 * lat.g2))) {
        throw ExcludedPointError("hk_example_l2: E^2 = 3 g2 is excluded");
    }
    HKParams h;
    h.wp_alpha = -(E * E * E - 27.0 * lat.g3) / (9.0 * D);
    const cplx P = E * E * E - 9.0 * lat.g2 * E + 54.0 * lat.g3;
    const cplx dwp = 2.0 * P * sqrt_minus_q / (27.0 * D * D);
    h.alpha = wp_inverse(lat, h.wp_alpha, dwp);
    h.kappa = (2.0 / 3.0) * sqrt_minus_q / D;
    const Weierstrass wf(lat);
    h.residual = std::abs(wf.wp(h.alpha) - h.wp_alpha) / std::max(1.0, std::abs(h.wp_alpha));
    return h;
}

/// Principal-branch convenience: sqrt(-Q) for real E from Q(E) = D * cubic.
inline HKParams hk_example_l2(double E, const Lattice &lat)
{
    const cplx Q = (E * E - 3.0 * lat.g2) * detail::l2_cubic(E, lat);
    return hk_example_l2(cplx(E), sqrt_minus_q(Q.real()), lat);
}


/// Both sides of the two genus-2 to elliptic reduction identities for the
/// Lame l = 2 potential at a real E. sqrt(-Q) is the boundary value from the
/// upper half plane, i prod_j sqrt(E - r_j); real-axis E integrals are taken
/// piecewise between roots with that branch. The elliptic sides are
/// evaluated through alpha with wp(alpha) = xi, so (i) holds modulo periods.
struct ReductionReport
{
    double E = 0.0;
    cplx xi;
    cplx alpha;
    cplx kappa;
    cplx lhs1, rhs1;
    double diff1 = 0.0; // distance of lhs1 - rhs1 to the period lattice
    cplx lhs2, rhs2;
    double diff2 = 0.0;
};

namespace detail
{

// Upper-half-plane boundary value of sqrt(-Q) / sqrt|Q| for real E.
inline cplx uhp_phase(double E, const std::vector<double> &roots)
{
    cplx ph(0.0, 1.0);
    for (const double r : roots) {
        if (E < r) {
            ph *= cplx(0.0, 1.0);
        }
    }
    return ph;
}

// int_lo^hi f(x) / sqrt(-Q(x)) dx for monic Q with all roots real, lo < hi,
// sqrt(-Q) the upper-half-plane boundary value; hi may be +infinity.
template<class F>
cplx integrate_over_sqrt_q(F f, double lo, double hi, const std::vector<double> &roots, double tol)
{
    std::vector<double> cuts{lo};
    for (const double r : roots) {
        if (r > lo && r < hi) {
            cuts.push_back(r);
        }
    }
    const bool infinite = std::isinf(hi);
    if (infinite) {
        cuts.push_back(cuts.back() + 1.0);
    } else {
        cuts.push_back(hi);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    cplx total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        auto absq = [&](double x, double xc) {
            double prod = 1.0;
            for (const double r : roots) {
                double d = std::abs(x - r);
                if (r == a && xc <= 0) {
                    d = -xc;
                } else if (r == b && xc > 0) {
                    d = xc;
                }
                prod *= d;
            }
            return prod;
        };
        const double val = ts.integrate([&](double x, double xc) { return f(x) / std::sqrt(absq(x, xc)); }, a, b, tol);
        total += val / uhp_phase(0.5 * (a + b), roots);
    }
    if (infinite) {
        const double a = cuts.back();
        auto g = [&](double x) {
            double prod = 1.0;
            for (const double r : roots) {
                prod *= std::abs(x - r);
            }
            return f(x) / std::sqrt(prod);
        };
        total += ts.integrate(g, a, std::numeric_limits<double>::infinity(), tol) / uhp_phase(a + 1.0, roots);
    }
    return total;
}

template<class F>
cplx integrate_over_sqrt_q_oriented(F f, double from, double to, const std::vector<double> &roots, double tol)
{
    if (from == to) {
        return 0.0;
    }
    return from < to ? integrate_over_sqrt_q(f, from, to, roots, tol) : -integrate_over_sqrt_q(f, to, from, roots, tol);
}

} // namespace detail

inline ReductionReport reduction_check(double E, const Lattice &lat, double tol = 1e-13)
{
    const double g2 = lat.g2.real(), e1 = lat.e1.real();
    std::vector<double> roots{-std::sqrt(3.0 * g2), std::sqrt(3.0 * g2), 3.0 * lat.e1.real(), 3.0 * lat.e2.real(),
                              3.0 * lat.e3.real()};
    std::sort(roots.begin(), roots.end());
    for (const double r : roots) {
        if (std::abs(E - r) < 1e-9 * (1.0 + std::abs(r)) && std::abs(r - 3.0 * e1) > 1e-12 * (1.0 + std::abs(r))) {
            throw PathError("reduction_check: E at a branch point");
        }
    }
    double Qabs = 1.0;
    for (const double r : roots) {
        Qabs *= std::abs(E - r);
    }
    const cplx s = detail::uhp_phase(E, roots) * std::sqrt(Qabs);
    const Weierstrass wf(lat);
    ReductionReport rep;
    rep.E = E;
    const HKParams hk = hk_example_l2(cplx(E), s, lat);
    rep.xi = hk.wp_alpha;
    rep.alpha = hk.alpha;
    rep.kappa = hk.kappa;

    rep.lhs1 = 0.5 * detail::integrate_over_sqrt_q([](double x) { return 3.0 * x; }, E, INFINITY, roots, tol);
    rep.rhs1 = hk.alpha;
    rep.diff1 = std::abs(detail::reduce_argument(rep.lhs1 - rep.rhs1, lat.eval_omega1, lat.eval_omega3).x0);

    // alpha continued from omega1 at E = 3 e1 fixes the period shift of zeta.
    const double base = 3.0 * e1;
    const cplx a_path = lat.omega1 - 0.5 * detail::integrate_over_sqrt_q_oriented([](double x) { return 3.0 * x; }, base, E, roots, tol);
    const auto shift = detail::reduce_argument(a_path - hk.alpha, lat.eval_omega1, lat.eval_omega3);
    const cplx alpha_cont = hk.alpha + (a_path - hk.alpha - shift.x0);
    rep.lhs2 = 0.5 * detail::integrate_over_sqrt_q_oriented([g2](double x) { return x * x - 1.5 * g2; }, base, E, roots, tol);
    rep.rhs2 = -hk.kappa - wf.zeta(alpha_cont) + lat.eta1;
    rep.diff2 = std::abs(rep.lhs2 - rep.rhs2);
    return rep;
}

} // namespace heungap

#endif
