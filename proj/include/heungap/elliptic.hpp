#ifndef HEUNGAP_ELLIPTIC_HPP
#define HEUNGAP_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heungap
{

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

class LatticeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a Weierstrass function is evaluated on the lattice.
class PoleError : public std::domain_error
{
public:
    PoleError(const std::string &what, cplx lattice_point)
        : std::domain_error(what), lattice_point_(lattice_point)
    {}
    cplx lattice_point() const noexcept { return lattice_point_; }

private:
    cplx lattice_point_;
};

/// Period lattice 2*omega1*Z + 2*omega3*Z with its Weierstrass data.
///
/// The public fields refer to the basis the lattice was built from. The
/// evaluation basis (eval_*) is the same lattice after reduction of tau
/// towards the fundamental domain.
struct Lattice
{
    cplx omega1, omega3;
    cplx tau, nome;
    cplx e1, e2, e3;
    cplx g2, g3;
    cplx eta1, eta3;

    cplx eval_omega1, eval_omega3;
    cplx eval_nome, eval_nome_quarter;
    cplx eval_eta1, eval_eta3;

    /// omega_0 = 0, omega_2 = -omega_1 - omega_3.
    cplx half_period(int i) const
    {
        switch (i) {
            case 0: return 0.0;
            case 1: return omega1;
            case 2: return -omega1 - omega3;
            case 3: return omega3;
            default: throw std::out_of_range("half-period index must be in 0..3");
        }
    }

    /// e_i = wp(omega_i) for i = 1, 2, 3.
    cplx e(int i) const
    {
        switch (i) {
            case 1: return e1;
            case 2: return e2;
            case 3: return e3;
            default: throw std::out_of_range("e_i index must be in 1..3");
        }
    }

    /// zeta(omega_k) for k = 1, 3.
    cplx eta(int k) const
    {
        if (k == 1) {
            return eta1;
        }
        if (k == 3) {
            return eta3;
        }
        throw std::out_of_range("quasi-period index must be 1 or 3");
    }

    cplx omega(int k) const
    {
        if (k == 1) {
            return omega1;
        }
        if (k == 3) {
            return omega3;
        }
        throw std::out_of_range("period index must be 1 or 3");
    }

    bool is_rectangular(double tol = 1e-14) const
    {
        return omega1.real() > 0 && std::abs(omega1.imag()) <= tol * std::abs(omega1)
               && omega3.imag() > 0 && std::abs(omega3.real()) <= tol * std::abs(omega3);
    }
};

namespace detail
{

struct ThetaValues
{
    // theta_1 and its first three v-derivatives, without the common factor
    // 2 q^{1/4}.
    cplx t0, t1, t2, t3;
};

inline ThetaValues theta1_series(cplx v, cplx q)
{
    ThetaValues s{0.0, 0.0, 0.0, 0.0};
    cplx qpow = 1.0; // q^{n(n+1)}
    for (int n = 0; n < 200; ++n) {
        if (n > 0) {
            qpow *= std::pow(q, 2 * n);
        }
        const double k = 2.0 * n + 1.0;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx a = sign * qpow;
        const cplx sn = std::sin(k * v);
        const cplx cs = std::cos(k * v);
        const cplx d0 = a * sn, d1 = a * k * cs, d2 = -a * k * k * sn, d3 = -a * k * k * k * cs;
        s.t0 += d0;
        s.t1 += d1;
        s.t2 += d2;
        s.t3 += d3;
        if (n >= 2 && std::abs(d0) <= 1e-17 * std::abs(s.t0) && std::abs(d1) <= 1e-17 * std::abs(s.t1)
            && std::abs(d2) <= 1e-17 * std::abs(s.t2) && std::abs(d3) <= 1e-17 * std::abs(s.t3)) {
            break;
        }
        if (std::abs(qpow) == 0.0) {
            break;
        }
    }
    return s;
}

struct Reduced
{
    cplx x0;
    long m, n; // x = x0 + 2 m w1 + 2 n w3
};

inline Reduced reduce_argument(cplx x, cplx w1, cplx w3)
{
    // Solve x = a*2w1 + b*2w3 for real a, b.
    const cplx p1 = 2.0 * w1, p3 = 2.0 * w3;
    const double det = p1.real() * p3.imag() - p1.imag() * p3.real();
    const double a = (x.real() * p3.imag() - x.imag() * p3.real()) / det;
    const double b = (p1.real() * x.imag() - p1.imag() * x.real()) / det;
    const long m = std::lround(a);
    const long n = std::lround(b);
    return {x - static_cast<double>(m) * p1 - static_cast<double>(n) * p3, m, n};
}

} // namespace detail

/// Weierstrass functions evaluated through Jacobi theta_1 series in the
/// evaluation basis of a Lattice.
class Weierstrass
{
public:
    explicit Weierstrass(const Lattice &lat) : lat_(lat) {}

    cplx wp(cplx x) const
    {
        const auto [x0, m, n] = reduced(x);
        const auto t = theta_at(x0);
        const cplx c = std::numbers::pi / (2.0 * lat_.eval_omega1);
        const cplx r1 = t.t1 / t.t0;
        return -lat_.eval_eta1 / lat_.eval_omega1 + c * c * (r1 * r1 - t.t2 / t.t0);
    }

    cplx wp_prime(cplx x) const
    {
        const auto [x0, m, n] = reduced(x);
        const auto t = theta_at(x0);
        const cplx c = std::numbers::pi / (2.0 * lat_.eval_omega1);
        const cplx r1 = t.t1 / t.t0, r2 = t.t2 / t.t0, r3 = t.t3 / t.t0;
        return -c * c * c * (r3 - 3.0 * r1 * r2 + 2.0 * r1 * r1 * r1);
    }

    cplx zeta(cplx x) const
    {
        const auto [x0, m, n] = reduced(x);
        const auto t = theta_at(x0);
        const cplx c = std::numbers::pi / (2.0 * lat_.eval_omega1);
        const cplx base = lat_.eval_eta1 * x0 / lat_.eval_omega1 + c * t.t1 / t.t0;
        return base + 2.0 * static_cast<double>(m) * lat_.eval_eta1 + 2.0 * static_cast<double>(n) * lat_.eval_eta3;
    }

    cplx sigma(cplx x) const
    {
        const auto r = detail::reduce_argument(x, lat_.eval_omega1, lat_.eval_omega3);
        const cplx v = std::numbers::pi * r.x0 / (2.0 * lat_.eval_omega1);
        const auto t = detail::theta1_series(v, lat_.eval_nome);
        const auto t_origin = detail::theta1_series(0.0, lat_.eval_nome);
        const cplx s0 = (2.0 * lat_.eval_omega1 / std::numbers::pi)
                        * std::exp(lat_.eval_eta1 * r.x0 * r.x0 / (2.0 * lat_.eval_omega1)) * t.t0 / t_origin.t1;
        const double m = static_cast<double>(r.m), n = static_cast<double>(r.n);
        const cplx big_omega = m * lat_.eval_omega1 + n * lat_.eval_omega3;
        const cplx big_eta = m * lat_.eval_eta1 + n * lat_.eval_eta3;
        const double sign = ((r.m + r.n + r.m * r.n) % 2 == 0) ? 1.0 : -1.0;
        return sign * s0 * std::exp(2.0 * big_eta * (r.x0 + big_omega));
    }

    /// wp''(x) = 6 wp^2 - g2/2.
    cplx wp_second(cplx x) const
    {
        const cplx p = wp(x);
        return 6.0 * p * p - lat_.g2 / 2.0;
    }

    const Lattice &lattice() const noexcept { return lat_; }

private:
    detail::Reduced reduced(cplx x) const
    {
        auto r = detail::reduce_argument(x, lat_.eval_omega1, lat_.eval_omega3);
        if (std::abs(r.x0) < 1e-13 * std::abs(lat_.eval_omega1)) {
            throw PoleError("Weierstrass function evaluated at a lattice point", x - r.x0);
        }
        return r;
    }

    detail::ThetaValues theta_at(cplx x0) const
    {
        const cplx v = std::numbers::pi * x0 / (2.0 * lat_.eval_omega1);
        return detail::theta1_series(v, lat_.eval_nome);
    }

    Lattice lat_;
};

/// Build the lattice with half-periods omega1, omega3 (Im(omega3/omega1) > 0).
inline Lattice lattice_from_periods(cplx omega1, cplx omega3)
{
    if (omega1 == 0.0) {
        throw LatticeError("degenerate lattice: omega1 = 0");
    }
    const cplx tau = omega3 / omega1;
    if (!(tau.imag() > 0) || !std::isfinite(tau.imag())) {
        throw LatticeError("degenerate lattice: Im(omega3/omega1) must be positive");
    }
    Lattice lat{};
    lat.omega1 = omega1;
    lat.omega3 = omega3;
    lat.tau = tau;
    lat.nome = std::exp(kI * std::numbers::pi * tau);

    cplx w1 = omega1, w3 = omega3;
    if (std::abs(lat.nome) > 0.5) {
        for (int iter = 0; iter < 64; ++iter) {
            cplx t = w3 / w1;
            const double shift = std::round(t.real());
            w3 -= shift * w1;
            t = w3 / w1;
            if (std::abs(t) < 1.0 - 1e-15) {
                const cplx old_w1 = w1;
                w1 = w3;
                w3 = -old_w1;
            } else {
                break;
            }
        }
    }
    lat.eval_omega1 = w1;
    lat.eval_omega3 = w3;
    const cplx eval_tau = w3 / w1;
    lat.eval_nome = std::exp(kI * std::numbers::pi * eval_tau);
    lat.eval_nome_quarter = std::exp(kI * std::numbers::pi * eval_tau / 4.0);

    const auto t0 = detail::theta1_series(0.0, lat.eval_nome);
    lat.eval_eta1 = -std::numbers::pi * std::numbers::pi * t0.t3 / (12.0 * w1 * t0.t1);
    // Legendre relation eta1*omega3 - eta3*omega1 = pi*i/2.
    lat.eval_eta3 = (lat.eval_eta1 * w3 - kI * std::numbers::pi / 2.0) / w1;

    const Weierstrass wf(lat);
    lat.e1 = wf.wp(omega1);
    lat.e2 = wf.wp(-omega1 - omega3);
    lat.e3 = wf.wp(omega3);
    lat.g2 = -4.0 * (lat.e1 * lat.e2 + lat.e2 * lat.e3 + lat.e3 * lat.e1);
    lat.g3 = 4.0 * lat.e1 * lat.e2 * lat.e3;
    lat.eta1 = wf.zeta(omega1);
    lat.eta3 = wf.zeta(omega3);
    return lat;
}

/// Point alpha in the period cell with wp(alpha) = value and
/// wp'(alpha) = derivative (the sign of wp' selects alpha versus -alpha).
inline cplx wp_inverse(const Lattice &lat, cplx value, cplx derivative)
{
    const Weierstrass wf(lat);
    const cplx w1 = lat.eval_omega1, w3 = lat.eval_omega3;
    cplx best = 0.0;
    double best_res = INFINITY;
    auto newton = [&](cplx alpha) {
        try {
            for (int it = 0; it < 60; ++it) {
                const cplx step = (wf.wp(alpha) - value) / wf.wp_prime(alpha);
                alpha -= step;
                if (std::abs(step) < 1e-15 * (1.0 + std::abs(alpha))) {
                    break;
                }
            }
            const double res = std::abs(wf.wp(alpha) - value) / (1.0 + std::abs(value));
            if (std::isfinite(res) && res < best_res) {
                best_res = res;
                best = alpha;
            }
        } catch (const PoleError &) {
        }
    };
    // Large values sit near the origin: wp(x) ~ 1/x^2.
    if (std::abs(value) * std::norm(w1) > 100.0) {
        newton(1.0 / std::sqrt(value));
    }
    for (int a = 1; a < 8 && best_res > 1e-13; ++a) {
        for (int b = 0; b < 8 && best_res > 1e-13; ++b) {
            const cplx alpha = (a / 4.0 - 1.0) * w1 + (b / 4.0 - 1.0) * w3;
            if (std::abs(alpha) >= 0.1 * std::abs(w1)) {
                newton(alpha);
            }
        }
    }
    if (!(best_res < 1e-9)) {
        throw std::runtime_error("wp_inverse: Newton iteration did not converge");
    }
    const cplx d = wf.wp_prime(best);
    if (std::abs(d - derivative) > std::abs(d + derivative)) {
        best = -best;
    }
    // Near a half-period wp - value has a double root; polish on wp' instead.
    const double scale = 1.0 + std::abs(value);
    if (std::abs(derivative) < 1e-3 * scale * std::sqrt(scale)) {
        for (int it = 0; it < 20; ++it) {
            const cplx p = wf.wp(best);
            const cplx step = (wf.wp_prime(best) - derivative) / (6.0 * p * p - lat.g2 / 2.0);
            best -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(best))) {
                break;
            }
        }
    }
    return detail::reduce_argument(best, w1, w3).x0;
}

} // namespace heungap

#endif
