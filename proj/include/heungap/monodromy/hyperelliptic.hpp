#ifndef HEUNGAP_MONODROMY_HYPERELLIPTIC_HPP
#define HEUNGAP_MONODROMY_HYPERELLIPTIC_HPP

#include "../fingap/xi.hpp"
#include "floquet.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heungap
{

namespace detail
{

inline std::array<cplx, symalg::kNumVars> lattice_values(const Lattice &lat, cplx E = 0.0)
{
    std::array<cplx, symalg::kNumVars> v{};
    v[symalg::index(symalg::Var::e1)] = lat.e1;
    v[symalg::index(symalg::Var::e2)] = lat.e2;
    v[symalg::index(symalg::Var::g2)] = lat.g2;
    v[symalg::index(symalg::Var::g3)] = lat.g3;
    v[symalg::index(symalg::Var::E)] = E;
    return v;
}

// Coefficients c_0..c_d of a polynomial in E, lattice symbols substituted.
inline std::vector<cplx> numeric_coefficients(const symalg::MultiPoly &p, const Lattice &lat)
{
    const int d = std::max(p.degree(symalg::Var::E), 0);
    std::vector<cplx> out;
    const auto vals = lattice_values(lat);
    for (int m = 0; m <= d; ++m) {
        out.push_back(p.coefficient_of(symalg::Var::E, m).evaluate(vals));
    }
    return out;
}

inline cplx horner(const std::vector<cplx> &c, cplx x)
{
    cplx s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        s = s * x + *it;
    }
    return s;
}

} // namespace detail

/// Real roots of Q on a lattice, ascending; companion eigenvalues polished by Newton.
inline std::vector<double> spectral_band_edges(const symalg::MultiPoly &q, const Lattice &lat, double imag_tol = 1e-7)
{
    const std::vector<cplx> c = detail::numeric_coefficients(q, lat);
    const int d = static_cast<int>(c.size()) - 1;
    std::vector<double> roots;
    if (d < 1) {
        return roots;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) {
        comp(i, i - 1) = 1.0;
    }
    for (int i = 0; i < d; ++i) {
        comp(i, d - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(d)];
    }
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
    std::vector<cplx> dc;
    for (int m = 1; m <= d; ++m) {
        dc.push_back(static_cast<double>(m) * c[static_cast<std::size_t>(m)]);
    }
    double scale = 1.0;
    for (int i = 0; i < d; ++i) {
        scale = std::max(scale, std::abs(es.eigenvalues()(i)));
    }
    for (int i = 0; i < d; ++i) {
        cplx r = es.eigenvalues()(i);
        if (std::abs(r.imag()) > imag_tol * scale) {
            continue;
        }
        double x = r.real();
        for (int it = 0; it < 50; ++it) {
            const double f = detail::horner(c, x).real(), fp = detail::horner(dc, x).real();
            if (fp == 0.0) {
                break;
            }
            const double step = f / fp;
            x -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) {
                break;
            }
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Xi, Q and the a(E), c(E) of Xi's derivative basis on a fixed lattice.
class NumericSpectralData
{
public:
    NumericSpectralData(const XiFunction &xi, const SpectralPolynomial &q, const Lattice &lat)
        : xi_(xi), lat_(lat), wf_(lat), q_(detail::numeric_coefficients(q.coeffs, lat))
    {
        const XiDerivativeBasis basis = xi_derivative_basis(xi);
        a_ = detail::numeric_coefficients(basis.a, lat);
        c_ = detail::numeric_coefficients(basis.c, lat);
        edges_ = spectral_band_edges(q.coeffs, lat);
    }

    cplx Q(cplx E) const { return detail::horner(q_, E); }
    cplx a(cplx E) const { return detail::horner(a_, E); }
    cplx c(cplx E) const { return detail::horner(c_, E); }
    const std::vector<cplx> &q_coefficients() const noexcept { return q_; }
    const std::vector<double> &edges() const noexcept { return edges_; }
    const Lattice &lattice() const noexcept { return lat_; }
    const Weierstrass &weierstrass() const noexcept { return wf_; }
    const XiFunction &xi() const noexcept { return xi_; }

    /// Xi(x, E) with coefficients taken at E.
    cplx xi_value(cplx x, cplx E) const
    {
        const auto vals = detail::lattice_values(lat_, E);
        cplx s = xi_.c0.evaluate(vals);
        for (std::size_t i = 0; i < 4; ++i) {
            const int li = xi_.l[i];
            if (li == 0) {
                continue;
            }
            const cplx p = wf_.wp(x + lat_.half_period(static_cast<int>(i)));
            for (int j = 0; j < li; ++j) {
                s += xi_.b[i][static_cast<std::size_t>(j)].evaluate(vals) * std::pow(p, li - j);
            }
        }
        return s;
    }

    /// Q(E) = (E - r) R(E) for a real root r; returns R.
    std::vector<cplx> deflate(double r) const
    {
        const std::size_t d = q_.size() - 1;
        std::vector<cplx> out(d);
        cplx carry = q_[d];
        for (std::size_t m = d; m-- > 0;) {
            out[m] = carry;
            carry = q_[m] + carry * r;
        }
        return out;
    }

private:
    XiFunction xi_;
    Lattice lat_;
    Weierstrass wf_;
    std::vector<cplx> q_, a_, c_;
    std::vector<double> edges_;
};

namespace detail
{

inline cplx nearest_root(cplx value, cplx previous)
{
    const cplx r = std::sqrt(value);
    return std::abs(r - previous) <= std::abs(r + previous) ? r : -r;
}

} // namespace detail

/// Lambda(x, E) = sqrt(Xi) exp int_{x0}^{x} sqrt(-Q)/Xi, straight path, both
/// roots continued from their principal values at x0 (times branch for sqrt(-Q)).
inline cplx lambda_eval(const NumericSpectralData &sd, cplx E, cplx x, int branch = 1,
                        cplx x0 = cplx(NAN, NAN), int segments = 64)
{
    if (std::isnan(x0.real())) {
        x0 = default_base_point(sd.lattice());
    }
    const cplx sq = static_cast<double>(branch) * std::sqrt(-sd.Q(E));
    cplx root = std::sqrt(sd.xi_value(x0, E));
    cplx integral = 0.0;
    const cplx dx = (x - x0) / static_cast<double>(segments);
    const double scale = std::abs(sd.xi_value(x0, E)) + 1.0;
    for (int s = 0; s < segments; ++s) {
        const cplx a = x0 + static_cast<double>(s) * dx;
        auto f = [&](double t) {
            const cplx xi = sd.xi_value(a + t * dx, E);
            if (std::abs(xi) < 1e-12 * scale) {
                throw PathError("lambda_eval: path crosses a zero of Xi");
            }
            return sq / xi * dx;
        };
        integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 8, 1e-13);
        root = detail::nearest_root(sd.xi_value(a + dx, E), root);
    }
    return root * std::exp(integral);
}

struct HyperellipticResult
{
    cplx multiplier;
    double E0 = 0.0;
    int q = 0;
    cplx exponent; // -1/2 int_{E0}^{E} (...)
};

/// sqrt(-Q) on a root-free real segment: principal value of -Q + 0i.
inline cplx sqrt_minus_q(double Qvalue) { return Qvalue <= 0 ? cplx(std::sqrt(-Qvalue), 0.0) : cplx(0.0, std::sqrt(Qvalue)); }

/// Base edge for a real E: the nearest root of Q at or below E, else the lowest root.
inline double hyperelliptic_base_edge(const NumericSpectralData &sd, double E)
{
    const auto &r = sd.edges();
    if (r.empty()) {
        throw std::invalid_argument("monodromy_hyperelliptic: Q has no real root");
    }
    double best = r.front();
    for (const double e : r) {
        if (e <= E) {
            best = e;
        }
    }
    return best;
}

/// Multiplier of Lambda (branch sqrt(-Q) = principal of -Q + 0i, times branch)
/// under x -> x + 2 omega_k, by the second-kind integral from the edge E0.
inline HyperellipticResult monodromy_hyperelliptic(const NumericSpectralData &sd, const PotentialSpec &p, double E, int k,
                                                   int branch = 1, std::optional<double> E0_in = std::nullopt,
                                                   double tol = 1e-12)
{
    if (k != 1 && k != 3) {
        throw std::invalid_argument("monodromy_hyperelliptic: k must be 1 or 3");
    }
    const double E0 = E0_in ? *E0_in : hyperelliptic_base_edge(sd, E);
    for (const double r : sd.edges()) {
        if (r > std::min(E, E0) + 1e-12 && r < std::max(E, E0) - 1e-12) {
            throw std::domain_error("monodromy_hyperelliptic: segment contains an interior root of Q; split at the branch point");
        }
    }
    const Lattice &lat = sd.lattice();
    HyperellipticResult out;
    out.E0 = E0;
    const double t0 = integrate_floquet(p, lat, E0, k).trace.real();
    out.q = t0 > 0 ? 0 : 1;
    const double sgn0 = out.q == 0 ? 1.0 : -1.0;
    if (E == E0) {
        out.multiplier = sgn0;
        out.exponent = 0.0;
        return out;
    }
    // |Q(E)| = |E - E0| |R(E)| keeps the endpoint singularity exact.
    const std::vector<cplx> R = sd.deflate(E0);
    const double lo = std::min(E, E0), hi = std::max(E, E0);
    const bool base_left = E0 < E;
    auto dist_to_E0 = [&](double x, double xc) {
        if (base_left) {
            return xc <= 0 ? -xc : x - E0;
        }
        return xc > 0 ? xc : E0 - x;
    };
    auto abs_q = [&](double x, double xc) { return dist_to_E0(x, xc) * std::abs(detail::horner(R, x)); };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double Ia = ts.integrate([&](double x, double xc) { return sd.a(x).real() / std::sqrt(abs_q(x, xc)); }, lo, hi, tol);
    const double Ic = ts.integrate([&](double x, double xc) { return sd.c(x).real() / std::sqrt(abs_q(x, xc)); }, lo, hi, tol);
    // Sign of -Q on the open segment.
    const double mid = 0.5 * (lo + hi);
    const cplx inv = static_cast<double>(branch) / sqrt_minus_q(sd.Q(mid).real()) * std::sqrt(std::abs(sd.Q(mid).real()));
    const double orient = base_left ? 1.0 : -1.0;
    const cplx integral = orient * inv * (-2.0 * lat.eta(k) * Ia + 2.0 * lat.omega(k) * Ic);
    out.exponent = -0.5 * integral;
    out.multiplier = sgn0 * std::exp(out.exponent);
    return out;
}

} // namespace heungap

#endif
