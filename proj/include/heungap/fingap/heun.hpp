#ifndef HEUNGAP_FINGAP_HEUN_HPP
#define HEUNGAP_FINGAP_HEUN_HPP

#include "../elliptic.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace heungap
{

/// Heun's equation
///   y'' + (gamma/z + delta/(z-1) + epsilon/(z-t)) y' + (alpha beta z - q)/(z(z-1)(z-t)) y = 0
/// with gamma + delta + epsilon = alpha + beta + 1.
struct HeunParams
{
    cplx alpha, beta, gamma, delta, epsilon, q, t;

    cplx fuchs_defect() const { return gamma + delta + epsilon - alpha - beta - 1.0; }
};

/// Elliptic-form data of a Heun equation.
///
/// l_raw are the values given by the linear l-maps; l applies l -> -l-1
/// wherever Re(l) < -1/2, which leaves l(l+1) unchanged. E is computed for the
/// lattice scale e2 - e1 = scale.
struct EllipticForm
{
    std::array<cplx, 4> l_raw;
    std::array<cplx, 4> l;
    cplx E;
    cplx t;
    cplx scale;

    /// Nearest non-negative integers to l, if every l is within tol of one.
    bool integral_l(std::array<int, 4> &out, double tol = 1e-12) const
    {
        for (std::size_t i = 0; i < 4; ++i) {
            const double r = std::round(l[i].real());
            if (std::abs(l[i] - r) > tol || r < 0) {
                return false;
            }
            out[i] = static_cast<int>(r);
        }
        return true;
    }
};

namespace detail
{

// The bracket multiplying (e2 - e1) in the E formula, without the -4q term.
inline cplx heun_energy_shift(cplx alpha, cplx beta, cplx gamma, cplx delta, cplx epsilon, cplx t)
{
    const cplx ab2 = (alpha - beta) * (alpha - beta);
    const cplx first = -ab2 + 2.0 * gamma * gamma + 6.0 * gamma * epsilon + 2.0 * epsilon * epsilon - 4.0 * gamma
                       - 4.0 * epsilon - delta * delta + 2.0 * delta + 1.0;
    const cplx second = -ab2 + 2.0 * gamma * gamma + 6.0 * gamma * delta + 2.0 * delta * delta - 4.0 * gamma
                        - 4.0 * delta - epsilon * epsilon + 2.0 * epsilon + 1.0;
    return first / 3.0 + second * t / 3.0;
}

inline cplx reflect_l(cplx l) { return l.real() < -0.5 ? -l - 1.0 : l; }

} // namespace detail

inline EllipticForm heun_to_elliptic(const HeunParams &h, cplx scale = 1.0)
{
    if (std::abs(h.fuchs_defect()) > 1e-12 * (1.0 + std::abs(h.alpha) + std::abs(h.beta))) {
        throw std::invalid_argument("heun_to_elliptic: Fuchs relation gamma+delta+epsilon = alpha+beta+1 violated");
    }
    EllipticForm f{};
    f.l_raw = {h.beta - h.alpha - 0.5, 0.5 - h.gamma, 0.5 - h.delta, 0.5 - h.epsilon};
    for (std::size_t i = 0; i < 4; ++i) {
        f.l[i] = detail::reflect_l(f.l_raw[i]);
    }
    f.t = h.t;
    f.scale = scale;
    f.E = scale * (-4.0 * h.q + detail::heun_energy_shift(h.alpha, h.beta, h.gamma, h.delta, h.epsilon, h.t));
    return f;
}

/// Inverse map for a concrete lattice: t = (e3-e1)/(e2-e1), scale e2 - e1.
/// The l values are taken as the raw l-map values (no reflection).
inline HeunParams elliptic_to_heun(const std::array<cplx, 4> &l, cplx E, const Lattice &lat)
{
    const cplx scale = lat.e2 - lat.e1;
    if (std::abs(scale) <= 1e-14 * (1.0 + std::abs(lat.e1))) {
        throw LatticeError("elliptic_to_heun: e2 = e1, t is undefined");
    }
    HeunParams h{};
    h.gamma = 0.5 - l[1];
    h.delta = 0.5 - l[2];
    h.epsilon = 0.5 - l[3];
    const cplx diff = l[0] + 0.5;                       // beta - alpha
    const cplx sum = h.gamma + h.delta + h.epsilon - 1.0; // alpha + beta
    h.beta = (sum + diff) / 2.0;
    h.alpha = (sum - diff) / 2.0;
    h.t = (lat.e3 - lat.e1) / scale;
    h.q = (detail::heun_energy_shift(h.alpha, h.beta, h.gamma, h.delta, h.epsilon, h.t) - E / scale) / 4.0;
    return h;
}

} // namespace heungap

#endif
