#ifndef HEUNGAP_MONODROMY_FLOQUET_HPP
#define HEUNGAP_MONODROMY_FLOQUET_HPP

#include "../potential.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap
{

/// The integration path ran into (or too close to) a pole of the potential.
class PathError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Floquet data of one period shift x -> x + 2 omega_k.
struct MonodromyResult
{
    int k = 1;
    cplx E;
    Eigen::Matrix2cd matrix;
    cplx trace;
    std::array<cplx, 2> multipliers;
    double det_error = 0.0;
};

struct FloquetOptions
{
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_evaluations = 4'000'000;
};

inline cplx default_base_point(const Lattice &lat) { return 0.5 * lat.omega1 + 0.5 * lat.omega3; }

namespace detail
{

using OdeState = std::array<cplx, 4>; // f1, f1', f2, f2'

// Fundamental matrix Y(x0 + T) with Y(x0) = I for -f'' + (v(x + shift) - E) f = 0.
inline Eigen::Matrix2cd transfer_matrix(const NumericPotential &pot, cplx E, cplx x0, cplx T, cplx shift,
                                        const FloquetOptions &opt)
{
    namespace ode = boost::numeric::odeint;
    long evals = 0;
    auto rhs = [&](const OdeState &y, OdeState &dy, double t) {
        if (++evals > opt.max_evaluations) {
            throw PathError("integrate_floquet: step size underflow, path too close to a pole");
        }
        const cplx q = pot.v(x0 + t * T + shift) - E;
        dy[0] = T * y[1];
        dy[1] = T * q * y[0];
        dy[2] = T * y[3];
        dy[3] = T * q * y[2];
    };
    OdeState y{1.0, 0.0, 0.0, 1.0};
    try {
        ode::integrate_adaptive(ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<OdeState>()), rhs,
                                y, 0.0, 1.0, 1e-3);
    } catch (const PoleError &e) {
        throw PathError(std::string("integrate_floquet: ") + e.what());
    }
    Eigen::Matrix2cd m;
    m << y[0], y[2], y[1], y[3];
    return m;
}

inline MonodromyResult make_result(int k, cplx E, const Eigen::Matrix2cd &m)
{
    MonodromyResult r;
    r.k = k;
    r.E = E;
    r.matrix = m;
    r.trace = m.trace();
    r.det_error = std::abs(m.determinant() - 1.0);
    const cplx disc = std::sqrt(r.trace * r.trace - 4.0);
    r.multipliers = {(r.trace + disc) / 2.0, (r.trace - disc) / 2.0};
    return r;
}

} // namespace detail

/// Monodromy along the straight segment base -> base + 2 omega_k.
inline MonodromyResult integrate_floquet(const PotentialSpec &p, const Lattice &lat, cplx E, int k,
                                         cplx base = cplx(NAN, NAN), const FloquetOptions &opt = {})
{
    if (k != 1 && k != 3) {
        throw std::invalid_argument("integrate_floquet: k must be 1 or 3");
    }
    if (!lat.is_rectangular()) {
        throw std::invalid_argument("integrate_floquet: rectangular lattice required");
    }
    if (std::isnan(base.real())) {
        base = default_base_point(lat);
    }
    const NumericPotential pot(p, lat);
    const Eigen::Matrix2cd m = detail::transfer_matrix(pot, E, base, 2.0 * lat.omega(k), 0.0, opt);
    return detail::make_result(k, E, m);
}

/// Multiplier pairs (m1, m3) of the two common eigenvectors of M1 and M3.
struct FloquetPair
{
    std::array<cplx, 2> m1;
    std::array<cplx, 2> m3;
};

inline FloquetPair floquet_pair(const MonodromyResult &r1, const MonodromyResult &r3)
{
    const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(r1.matrix);
    FloquetPair out;
    for (int j = 0; j < 2; ++j) {
        const Eigen::Vector2cd v = es.eigenvectors().col(j);
        out.m1[static_cast<std::size_t>(j)] = es.eigenvalues()(j);
        const Eigen::Vector2cd w = r3.matrix * v;
        out.m3[static_cast<std::size_t>(j)] = v.dot(w) / v.dot(v);
    }
    return out;
}

enum class BandKind { bounded_band, gap, periodic_edge, antiperiodic_edge };

inline const char *band_kind_name(BandKind k)
{
    switch (k) {
        case BandKind::bounded_band: return "bounded-band";
        case BandKind::gap: return "gap";
        case BandKind::periodic_edge: return "periodic-edge";
        case BandKind::antiperiodic_edge: return "antiperiodic-edge";
    }
    return "?";
}

struct BandClassification
{
    double E = 0.0;
    BandKind kind = BandKind::gap;
    double trace1 = 0.0;
    double trace3 = 0.0;
};

struct BandScan
{
    std::vector<BandClassification> points;
    std::vector<double> edges;
};

/// Real-line realization: v(x + omega3) on [0, 2 omega1].
class RealLineMonodromy
{
public:
    RealLineMonodromy(const PotentialSpec &p, const Lattice &lat, FloquetOptions opt = {})
        : pot_(p, lat), lat_(lat), opt_(opt)
    {
        if (!lat.is_rectangular()) {
            throw std::invalid_argument("classify_band: rectangular lattice required");
        }
    }

    /// Monodromy matrix for k = 1 on the real line; k = 3 is taken from the
    /// generic base point (same conjugacy class).
    Eigen::Matrix2cd matrix(double E, int k) const
    {
        if (k == 1) {
            return detail::transfer_matrix(pot_, E, 0.0, 2.0 * lat_.omega1, lat_.omega3, opt_);
        }
        return detail::transfer_matrix(pot_, E, default_base_point(lat_), 2.0 * lat_.omega3, 0.0, opt_);
    }

    double trace1(double E) const { return matrix(E, 1).trace().real(); }
    double trace3(double E) const { return matrix(E, 3).trace().real(); }

    // Bisection on |trace| - 2 between a band point and a gap point.
    double refine_edge(double a, double b, double tol = 1e-10) const
    {
        double fa = std::abs(trace1(a)) - 2.0;
        for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = std::abs(trace1(m)) - 2.0;
            if ((fm > 0) == (fa > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }

private:
    NumericPotential pot_;
    Lattice lat_;
    FloquetOptions opt_;
};

/// Classify a real E grid by the real-line trace; edges refined between
/// neighbouring band and gap points. Points with ||tr| - 2| <= edge_tol are
/// edges and do not start a gap.
inline BandScan classify_band(const PotentialSpec &p, const Lattice &lat, const std::vector<double> &grid,
                              double edge_tol = 1e-8, bool with_trace3 = false)
{
    const RealLineMonodromy rl(p, lat);
    BandScan out;
    for (const double E : grid) {
        BandClassification c;
        c.E = E;
        c.trace1 = rl.trace1(E);
        c.trace3 = with_trace3 ? rl.trace3(E) : NAN;
        const double d = std::abs(c.trace1) - 2.0;
        if (std::abs(d) <= edge_tol) {
            c.kind = c.trace1 > 0 ? BandKind::periodic_edge : BandKind::antiperiodic_edge;
        } else {
            c.kind = d < 0 ? BandKind::bounded_band : BandKind::gap;
        }
        out.points.push_back(c);
    }
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const auto &c = out.points[i];
        if (c.kind == BandKind::periodic_edge || c.kind == BandKind::antiperiodic_edge) {
            out.edges.push_back(c.E);
            continue;
        }
        if (i + 1 < out.points.size()) {
            const auto &n = out.points[i + 1];
            const bool flip = (c.kind == BandKind::gap && n.kind == BandKind::bounded_band)
                              || (c.kind == BandKind::bounded_band && n.kind == BandKind::gap);
            if (flip) {
                out.edges.push_back(rl.refine_edge(c.E, n.E));
            }
        }
    }
    return out;
}

} // namespace heungap

#endif
