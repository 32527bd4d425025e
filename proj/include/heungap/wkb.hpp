#ifndef HEUNGAP_WKB_HPP
#define HEUNGAP_WKB_HPP

#include "elliptic.hpp"
#include "monodromy/floquet.hpp"
#include "symalg/multipoly.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap
{

using symalg::Context;
using symalg::MultiPoly;
using symalg::Rational;
using symalg::Var;

class WkbError : public std::runtime_error
{
public:
    WkbError(const std::string &what, int order) : std::runtime_error(what), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

/// S_{-1}, S_0, ..., S_N for -psi'' + eta^2 (wp - E) psi = 0, psi = exp(int S).
/// Elements of the wkb context: u = (wp - E)^{1/2}, u^{-1} formal.
struct WkbSeries
{
    std::vector<MultiPoly> terms; // terms[j + 1] = S_j
    int order = -1;

    const MultiPoly &S(int j) const { return terms.at(static_cast<std::size_t>(j + 1)); }
};

namespace detail
{

inline MultiPoly wkb_var(Var v) { return symalg::var(v, Context::wkb); }

inline MultiPoly u_power(int k)
{
    symalg::Exponents e{};
    e[symalg::index(Var::u)] = k;
    return MultiPoly::term(e, Rational(1), Context::wkb);
}

} // namespace detail

inline WkbSeries wkb_terms(int N)
{
    if (N < -1 || N > 12) {
        throw std::invalid_argument("wkb_terms: -1 <= N <= 12 required");
    }
    WkbSeries s;
    s.order = N;
    s.terms.push_back(detail::wkb_var(Var::u));
    const MultiPoly half_inv_u = detail::u_power(-1) / Rational(2);
    for (int j = 0; j <= N; ++j) {
        MultiPoly rhs = symalg::derive_x(s.S(j - 1));
        for (int k = 0; k <= j - 1; ++k) {
            rhs += s.S(k) * s.S(j - 1 - k);
        }
        s.terms.push_back(-(rhs * half_inv_u));
    }
    return s;
}

/// Coefficient of eta^p in S^2 + S' - eta^2 Q, p = 2, 1, ..., 1 - N, built by
/// direct series multiplication.
inline std::vector<MultiPoly> riccati_coefficients(const WkbSeries &s)
{
    const int N = s.order;
    std::vector<MultiPoly> out;
    const MultiPoly Q = detail::wkb_var(Var::z) - detail::wkb_var(Var::E);
    for (int n = -2; n <= N - 1; ++n) {
        MultiPoly c(Context::wkb);
        for (int a = -1; a <= N; ++a) {
            const int b = n - a;
            if (b >= -1 && b <= N) {
                c += s.S(a) * s.S(b);
            }
        }
        if (n >= -1) {
            c += symalg::derive_x(s.S(n));
        }
        if (n == -2) {
            c -= Q;
        }
        out.push_back(c);
    }
    return out;
}

/// Exact check through eta^{1-N}; throws WkbError naming the eta power.
inline void verify_riccati(const WkbSeries &s, int N)
{
    if (N > s.order) {
        throw std::invalid_argument("verify_riccati: series too short");
    }
    WkbSeries t = s;
    t.order = N;
    t.terms.resize(static_cast<std::size_t>(N + 2));
    const auto coeffs = riccati_coefficients(t);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!symalg::wkb_normal_form(coeffs[i]).is_zero()) {
            const int p = 2 - static_cast<int>(i);
            throw WkbError("Riccati residual nonzero at eta^" + std::to_string(p), p);
        }
    }
}

struct OddEvenSplit
{
    std::vector<MultiPoly> odd;  // S_{-1}, S_1, S_3, ...
    std::vector<MultiPoly> even; // S_0, S_2, ...
};

/// Splits S and checks 2 S_odd S_even + S_odd' = O(eta^{-N}) order by order.
inline OddEvenSplit split_odd_even(const WkbSeries &s)
{
    OddEvenSplit r;
    for (int j = -1; j <= s.order; ++j) {
        ((j % 2 != 0) ? r.odd : r.even).push_back(s.S(j));
    }
    const int N = s.order;
    for (int n = -1; n <= N - 1; ++n) {
        MultiPoly c(Context::wkb);
        for (int a = -1; a <= N; a += 2) {
            const int b = n - a;
            if (b >= 0 && b <= N && b % 2 == 0) {
                c += Rational(2) * s.S(a) * s.S(b);
            }
        }
        if (n % 2 != 0) {
            c += symalg::derive_x(s.S(n));
        }
        if (!symalg::wkb_normal_form(c).is_zero()) {
            throw WkbError("odd/even relation fails at eta^" + std::to_string(-n), -n);
        }
    }
    return r;
}

/// psi_1 ... psi_N for -psi'' + (l(l+1) wp + eta^2) psi = 0 (E = -eta^2),
/// psi = exp(eta x + sum psi_j eta^{-j}). Coefficients in Q[l, g2, g3].
struct LargeESeries
{
    std::vector<MultiPoly> psi;   // psi[j - 1] = psi_j
    std::vector<MultiPoly> dpsi;  // derivatives, free of zeta and x
    MultiPoly strength{Context::g_lattice}; // l(l+1)

    const MultiPoly &term(int j) const { return psi.at(static_cast<std::size_t>(j - 1)); }
};

namespace detail
{

inline MultiPoly glat(Var v) { return symalg::var(v, Context::g_lattice); }

// x-antiderivative of z^k, k >= 0, as a combination of z^m w, zeta and x.
// Uses (z^m w)' = (4m+6) z^{m+2} - (m + 1/2) g2 z^m - m g3 z^{m-1}.
inline MultiPoly integrate_z_power(int k)
{
    if (k == 0) {
        return glat(Var::x);
    }
    if (k == 1) {
        return -glat(Var::zeta);
    }
    const int m = k - 2;
    const auto z = glat(Var::z), w = glat(Var::w);
    MultiPoly r = z.pow(static_cast<unsigned>(m)) * w;
    r += Rational(2 * m + 1, 2) * glat(Var::g2) * integrate_z_power(m);
    if (m >= 1) {
        r += Rational(m) * glat(Var::g3) * integrate_z_power(m - 1);
    }
    return r / Rational(4 * m + 6);
}

} // namespace detail

/// Antiderivative with zero constant of an element of Q[l, g2, g3][z, w].
inline MultiPoly integrate_x(const MultiPoly &f)
{
    MultiPoly out(Context::g_lattice);
    for (const auto &[e, c] : f.terms()) {
        if (e[symalg::index(Var::zeta)] != 0 || e[symalg::index(Var::x)] != 0 || e[symalg::index(Var::u)] != 0
            || e[symalg::index(Var::E)] != 0) {
            throw std::logic_error("integrate_x: integrand outside Q[l, g2, g3][z, w]");
        }
        symalg::Exponents rest = e;
        const int kz = rest[symalg::index(Var::z)];
        const int kw = rest[symalg::index(Var::w)];
        rest[symalg::index(Var::z)] = 0;
        rest[symalg::index(Var::w)] = 0;
        const MultiPoly coeff = MultiPoly::term(rest, c, Context::g_lattice);
        if (kw == 1) {
            out += coeff * detail::glat(Var::z).pow(static_cast<unsigned>(kz + 1)) / Rational(kz + 1);
        } else if (kw == 0) {
            out += coeff * detail::integrate_z_power(kz);
        } else {
            throw std::logic_error("integrate_x: unreduced power of w");
        }
    }
    return out;
}

/// Recursion 2 psi_j' = [j = 1] v - psi_{j-1}'' - sum_{k+m=j-1, k,m>=1} psi_k' psi_m'.
inline LargeESeries large_e_terms(const MultiPoly &strength, int N)
{
    if (N < 1 || N > 10) {
        throw std::invalid_argument("large_e_terms: 1 <= N <= 10 required");
    }
    LargeESeries s;
    s.strength = strength.with_context(Context::g_lattice);
    for (int j = 1; j <= N; ++j) {
        MultiPoly rhs(Context::g_lattice);
        if (j == 1) {
            rhs = s.strength * detail::glat(Var::z);
        } else {
            rhs = -symalg::derive_x(s.dpsi[static_cast<std::size_t>(j - 2)]);
        }
        for (int k = 1; k <= j - 2; ++k) {
            rhs -= s.dpsi[static_cast<std::size_t>(k - 1)] * s.dpsi[static_cast<std::size_t>(j - 2 - k)];
        }
        MultiPoly d = rhs / Rational(2);
        s.psi.push_back(integrate_x(d));
        s.dpsi.push_back(std::move(d));
    }
    return s;
}

/// Symbolic strength l(l+1) with l kept as a variable.
inline LargeESeries large_e_terms(int N)
{
    const auto l = detail::glat(Var::l);
    return large_e_terms(l * l + l, N);
}

inline LargeESeries large_e_terms(int l, int N)
{
    return large_e_terms(MultiPoly(Rational(static_cast<long>(l) * (l + 1)), Context::g_lattice), N);
}

/// Increment of the exponent coefficient of eta^power under x -> x + 2 omega_i:
/// omega * omega_i + eta * eta_i with eta_i = zeta(omega_i).
struct MonodromyIncrement
{
    int power = 0;
    MultiPoly omega{Context::g_lattice};
    MultiPoly eta{Context::g_lattice};
};

/// Odd-order increments eta^1, eta^{-1}, eta^{-3}, ...; even orders must be
/// doubly periodic.
inline std::vector<MonodromyIncrement> monodromy_increments(const LargeESeries &s)
{
    std::vector<MonodromyIncrement> out;
    out.push_back({1, MultiPoly(Rational(2), Context::g_lattice), MultiPoly(Context::g_lattice)});
    for (int j = 1; j <= static_cast<int>(s.psi.size()); ++j) {
        const MultiPoly &p = s.term(j);
        MonodromyIncrement inc;
        inc.power = -j;
        for (const auto &[e, c] : p.terms()) {
            const int kz = e[symalg::index(Var::zeta)], kx = e[symalg::index(Var::x)];
            if (kz + kx > 1 || (kz + kx == 1 && (e[symalg::index(Var::z)] != 0 || e[symalg::index(Var::w)] != 0))) {
                throw WkbError("psi_" + std::to_string(j) + " is not affine in zeta and x", -j);
            }
            symalg::Exponents rest = e;
            rest[symalg::index(Var::zeta)] = 0;
            rest[symalg::index(Var::x)] = 0;
            if (kz == 1) {
                inc.eta += MultiPoly::term(rest, 2 * c, Context::g_lattice);
            } else if (kx == 1) {
                inc.omega += MultiPoly::term(rest, 2 * c, Context::g_lattice);
            }
        }
        const bool zero = inc.omega.is_zero() && inc.eta.is_zero();
        if (j % 2 == 0) {
            if (!zero) {
                throw WkbError("nonzero increment at even order " + std::to_string(j), -j);
            }
            continue;
        }
        out.push_back(std::move(inc));
    }
    return out;
}

struct NumericIncrement
{
    int power = 0;
    cplx value = 0.0;
};

/// Numeric increments for integer l on a lattice, period index i in {1, 3}.
inline std::vector<NumericIncrement> monodromy_asymptotics(const LargeESeries &s, int i, const Lattice &lat, int l = 0)
{
    if (i != 1 && i != 3) {
        throw std::invalid_argument("monodromy_asymptotics: i must be 1 or 3");
    }
    std::array<cplx, symalg::kNumVars> vals{};
    vals[symalg::index(Var::g2)] = lat.g2;
    vals[symalg::index(Var::g3)] = lat.g3;
    vals[symalg::index(Var::l)] = static_cast<double>(l);
    std::vector<NumericIncrement> out;
    for (const auto &inc : monodromy_increments(s)) {
        out.push_back({inc.power, inc.omega.evaluate(vals) * lat.omega(i) + inc.eta.evaluate(vals) * lat.eta(i)});
    }
    return out;
}

struct BridgePoint
{
    double eta = 0.0;
    cplx log_multiplier = 0.0; // branch closest to the prediction
    cplx prediction = 0.0;     // terms through eta^{lowest_power}
    cplx residual = 0.0;
};

/// Floquet multiplier of -f'' + l(l+1) wp f = -eta^2 f over 2 omega_i against
/// the truncated large-E exponent.
inline BridgePoint monodromy_bridge(int l, const Lattice &lat, double eta, int i, int lowest_power = -3)
{
    const auto series = large_e_terms(l, std::max(1, -lowest_power));
    BridgePoint b;
    b.eta = eta;
    for (const auto &inc : monodromy_asymptotics(series, i, lat, l)) {
        if (inc.power >= lowest_power) {
            b.prediction += inc.value * std::pow(eta, inc.power);
        }
    }
    const auto r = integrate_floquet(PotentialSpec::lame(l), lat, -eta * eta, i);
    double best = INFINITY;
    for (const cplx m : r.multipliers) {
        cplx lg = std::log(m);
        const double turns = std::round((b.prediction - lg).imag() / (2.0 * std::numbers::pi));
        lg += cplx(0.0, 2.0 * std::numbers::pi * turns);
        if (std::abs(lg - b.prediction) < best) {
            best = std::abs(lg - b.prediction);
            b.log_multiplier = lg;
        }
    }
    b.residual = b.log_multiplier - b.prediction;
    return b;
}

} // namespace heungap

#endif
