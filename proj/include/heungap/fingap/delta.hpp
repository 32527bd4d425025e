#ifndef HEUNGAP_FINGAP_DELTA_HPP
#define HEUNGAP_FINGAP_DELTA_HPP

#include "../potential.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap
{

class SearchError : public std::runtime_error
{
public:
    SearchError(const std::string &what, std::vector<double> grid) : std::runtime_error(what), grid_(std::move(grid)) {}
    const std::vector<double> &residual_grid() const noexcept { return grid_; }

private:
    std::vector<double> grid_;
};

/// F(delta) = sum_i (l_i + 1/2)^2 wp'(delta + omega_i): the M = 1 condition.
inline cplx delta_condition(const std::array<int, 4> &l, const Weierstrass &wf, cplx delta)
{
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double c = l[static_cast<std::size_t>(i)] + 0.5;
        s += c * c * wf.wp_prime(delta + wf.lattice().half_period(i));
    }
    return s;
}

inline cplx delta_condition_derivative(const std::array<int, 4> &l, const Weierstrass &wf, cplx delta)
{
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double c = l[static_cast<std::size_t>(i)] + 0.5;
        s += c * c * wf.wp_second(delta + wf.lattice().half_period(i));
    }
    return s;
}

namespace detail
{

// Distance from delta to the nearest half-period translate.
inline double distance_to_half_periods(const Lattice &lat, cplx delta)
{
    double best = INFINITY;
    for (int i = 0; i < 4; ++i) {
        const auto r = reduce_argument(delta - lat.half_period(i), lat.eval_omega1, lat.eval_omega3);
        best = std::min(best, std::abs(r.x0));
    }
    return best;
}

} // namespace detail

/// A root of the M = 1 condition in the period cell, away from the
/// half-periods (disks of radius 0.05 |omega1| excluded). Grid then Newton.
inline cplx solve_delta_condition(const std::array<int, 4> &l, const Lattice &lat, double tol = 1e-10)
{
    if (!lat.is_rectangular()) {
        throw std::invalid_argument("solve_delta_condition: rectangular lattice required");
    }
    const Weierstrass wf(lat);
    const double exclusion = 0.05 * std::abs(lat.omega1);
    const int n = 16;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const cplx d0 = (a + 0.5) / n * 2.0 * lat.omega1 + (b + 0.5) / n * 2.0 * lat.omega3;
            if (detail::distance_to_half_periods(lat, d0) < exclusion) {
                grid.push_back(NAN);
                continue;
            }
            grid.push_back(std::abs(delta_condition(l, wf, d0)));
            cplx d = d0;
            bool ok = false;
            try {
                for (int it = 0; it < 50; ++it) {
                    const cplx f = delta_condition(l, wf, d);
                    if (std::abs(f) < tol) {
                        ok = true;
                        break;
                    }
                    d -= f / delta_condition_derivative(l, wf, d);
                }
            } catch (const PoleError &) {
                ok = false;
            }
            if (ok && detail::distance_to_half_periods(lat, d) >= exclusion) {
                return detail::reduce_argument(d, lat.eval_omega1, lat.eval_omega3).x0;
            }
        }
    }
    throw SearchError("solve_delta_condition: no root found", std::move(grid));
}

/// Numeric Xi at a fixed E: coefficients of 1, wp(x+omega_i)^{l_i-j} and
/// wp(x+delta_k) + wp(x-delta_k), from collocation and a complex SVD.
struct NumericXi
{
    cplx E;
    cplx c0;
    std::array<std::vector<cplx>, 4> b;
    std::vector<cplx> d;
    int nullity = 0;
    double residual = 0.0;
    std::vector<double> singular_values;
};

namespace detail
{

// f = P^n for P = wp(x + s): returns f, f', f'', f'''.
inline std::array<cplx, 4> wp_power_jet(const Weierstrass &wf, cplx y, int n)
{
    const cplx p = wf.wp(y), p1 = wf.wp_prime(y);
    const cplx p2 = 6.0 * p * p - wf.lattice().g2 / 2.0, p3 = 12.0 * p * p1;
    const double nn = n;
    auto pw = [&](int k) { return k < 0 ? cplx(0.0) : std::pow(p, k); };
    const cplx f = pw(n);
    const cplx f1 = nn * pw(n - 1) * p1;
    const cplx f2 = nn * (nn - 1) * pw(n - 2) * p1 * p1 + nn * pw(n - 1) * p2;
    const cplx f3 = nn * (nn - 1) * (nn - 2) * pw(n - 3) * p1 * p1 * p1 + 3.0 * nn * (nn - 1) * pw(n - 2) * p1 * p2
                    + nn * pw(n - 1) * p3;
    return {f, f1, f2, f3};
}

} // namespace detail

inline NumericXi compute_xi_numeric(const PotentialSpec &spec, const Lattice &lat, cplx E)
{
    spec.validate();
    const NumericPotential pot(spec, lat);
    const Weierstrass &wf = pot.weierstrass();

    // Each basis function is a sum of shifted powers: (shift, power, weight).
    struct Piece
    {
        cplx shift;
        int power;
    };
    std::vector<std::vector<Piece>> basis;
    basis.push_back({});
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < spec.l[static_cast<std::size_t>(i)]; ++j) {
            basis.push_back({{lat.half_period(i), spec.l[static_cast<std::size_t>(i)] - j}});
        }
    }
    for (const cplx dk : spec.deltas) {
        basis.push_back({{dk, 1}, {-dk, 1}});
    }
    const auto ncols = static_cast<Eigen::Index>(basis.size());
    const Eigen::Index nrows = 4 * ncols + 12;

    // Collocation points away from all poles.
    std::vector<cplx> poles{0.0};
    for (int i = 1; i < 4; ++i) {
        poles.push_back(-lat.half_period(i));
    }
    for (const cplx dk : spec.deltas) {
        poles.push_back(dk);
        poles.push_back(-dk);
    }
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXcd mat(nrows, ncols);
    Eigen::Index row = 0;
    while (row < nrows) {
        const cplx x = uni(rng) * 2.0 * lat.omega1 + uni(rng) * 2.0 * lat.omega3;
        bool near = false;
        for (const cplx p : poles) {
            if (std::abs(detail::reduce_argument(x - p, lat.eval_omega1, lat.eval_omega3).x0)
                < 0.1 * std::abs(lat.omega1)) {
                near = true;
            }
        }
        if (near) {
            continue;
        }
        const PotentialValue pv = pot(x);
        for (Eigen::Index c = 0; c < ncols; ++c) {
            std::array<cplx, 4> jet{0.0, 0.0, 0.0, 0.0};
            if (basis[static_cast<std::size_t>(c)].empty()) {
                jet[0] = 1.0;
            }
            for (const auto &piece : basis[static_cast<std::size_t>(c)]) {
                const auto pj = detail::wp_power_jet(wf, x + piece.shift, piece.power);
                for (int k = 0; k < 4; ++k) {
                    jet[static_cast<std::size_t>(k)] += pj[static_cast<std::size_t>(k)];
                }
            }
            mat(row, c) = jet[3] - 4.0 * (pv.v - E) * jet[1] - 2.0 * pv.dv * jet[0];
        }
        const double nrm = mat.row(row).norm();
        if (nrm > 0) {
            mat.row(row) /= nrm;
        }
        ++row;
    }
    // Column scaling keeps the singular values comparable across powers.
    Eigen::VectorXd colscale(ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        colscale(c) = mat.col(c).norm() > 0 ? mat.col(c).norm() : 1.0;
        mat.col(c) /= colscale(c);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    NumericXi out;
    out.E = E;
    const double smax = sv(0);
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        out.singular_values.push_back(sv(k) / smax);
        if (sv(k) <= 1e-8 * smax) {
            ++out.nullity;
        }
    }
    Eigen::VectorXcd x = svd.matrixV().col(ncols - 1);
    out.residual = (mat * x).norm() / x.norm();
    x = x.cwiseQuotient(colscale.cast<cplx>());
    if (std::abs(x(0)) > 0) {
        x /= x(0);
    }
    out.c0 = x(0);
    Eigen::Index pos = 1;
    for (std::size_t i = 0; i < 4; ++i) {
        for (int j = 0; j < spec.l[i]; ++j) {
            out.b[i].push_back(x(pos++));
        }
    }
    for (std::size_t k = 0; k < spec.deltas.size(); ++k) {
        out.d.push_back(x(pos++));
    }
    return out;
}

} // namespace heungap

#endif
