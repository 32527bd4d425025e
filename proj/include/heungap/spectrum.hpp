#ifndef HEUNGAP_SPECTRUM_HPP
#define HEUNGAP_SPECTRUM_HPP

#include "elliptic.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap
{

class SpectrumError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalues E of -f'' + l(l+1) wp f = E f with doubly periodic f.
/// family[k] = (rho1, rho2, rho3): f = prod (wp - e_i)^{rho_i/2} P(wp).
struct LameEigenvalues
{
    int l = 0;
    std::vector<double> values;
    std::vector<std::array<int, 3>> family;
};

namespace detail
{

struct RealRoots
{
    double e1, e2, e3;
};

inline RealRoots real_roots(const Lattice &lat)
{
    if (!lat.is_rectangular()) {
        throw std::invalid_argument("spectrum: rectangular lattice required");
    }
    return {lat.e1.real(), lat.e2.real(), lat.e3.real()};
}

// Eigenvalues for one family. With t = wp - e2, a = e1 - e2, b = e3 - e2 and
// u = P(t), the equation reads A u'' + B u' + (C - l(l+1)(t + e2)) u = -E u
// with A = 4 t (t-a)(t-b) and B, C of degree 2 and 1.
inline std::vector<double> family_eigenvalues(int l, const std::array<int, 3> &rho, const RealRoots &r)
{
    const int weight = rho[0] + rho[1] + rho[2];
    if ((l - weight) % 2 != 0 || l < weight) {
        return {};
    }
    const int N = (l - weight) / 2;
    const double a = r.e1 - r.e2, b = r.e3 - r.e2;
    const std::array<double, 3> ti{a, 0.0, b}; // t at e1, e2, e3
    const std::array<double, 3> al{rho[0] / 2.0, rho[1] / 2.0, rho[2] / 2.0};
    // A = A3 t^3 + A2 t^2 + A1 t.
    const double A3 = 4.0, A2 = -4.0 * (a + b), A1 = 4.0 * a * b;
    // B = 4 sum_i rho_i prod_{j != i}(t - t_j) + 2 (3 t^2 - 2 (a+b) t + ab).
    double B2 = 6.0, B1 = -4.0 * (a + b), B0 = 2.0 * a * b;
    for (int i = 0; i < 3; ++i) {
        if (rho[static_cast<std::size_t>(i)] == 0) {
            continue;
        }
        const double p = ti[static_cast<std::size_t>((i + 1) % 3)], q = ti[static_cast<std::size_t>((i + 2) % 3)];
        B2 += 4.0;
        B1 += -4.0 * (p + q);
        B0 += 4.0 * p * q;
    }
    // C = 8 sum_{i<k} al_i al_k (t - t_m) + 2 sum_i al_i sum_{m != i} (t - t_m).
    double C1 = 0.0, C0 = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int k = i + 1; k < 3; ++k) {
            const int m = 3 - i - k;
            const double c = 8.0 * al[static_cast<std::size_t>(i)] * al[static_cast<std::size_t>(k)];
            C1 += c;
            C0 -= c * ti[static_cast<std::size_t>(m)];
        }
        for (int m = 0; m < 3; ++m) {
            if (m != i) {
                C1 += 2.0 * al[static_cast<std::size_t>(i)];
                C0 -= 2.0 * al[static_cast<std::size_t>(i)] * ti[static_cast<std::size_t>(m)];
            }
        }
    }
    const double ll = static_cast<double>(l) * (l + 1);
    C1 -= ll;
    C0 -= ll * r.e2;
    // Column k (t^k) feeds rows k+1, k, k-1.
    auto up = [&](int k) { return A3 * k * (k - 1) + B2 * k + C1; };
    auto diag = [&](int k) { return A2 * k * (k - 1) + B1 * k + C0; };
    auto down = [&](int k) { return A1 * k * (k - 1) + B0 * k; };
    if (std::abs(up(N)) > 1e-9 * (1.0 + ll)) {
        throw SpectrumError("lame_eigenvalues: recurrence does not close");
    }
    const int n = N + 1;
    Eigen::VectorXd d(n), e(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        d(k) = -diag(k);
    }
    for (int k = 0; k + 1 < n; ++k) {
        const double prod = up(k) * down(k + 1);
        if (!(prod > 0)) {
            throw SpectrumError("lame_eigenvalues: recurrence is not symmetrizable");
        }
        e(k) = std::sqrt(prod);
    }
    if (n == 1) {
        return {d(0)};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(n - 1), Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return out;
}

} // namespace detail

inline LameEigenvalues lame_eigenvalues(int l, const Lattice &lat)
{
    if (l < 1 || l > 200) {
        throw std::invalid_argument("lame_eigenvalues: 1 <= l <= 200 required");
    }
    const auto r = detail::real_roots(lat);
    struct Item
    {
        double v;
        std::array<int, 3> rho;
    };
    std::vector<Item> items;
    for (int mask = 0; mask < 8; ++mask) {
        const std::array<int, 3> rho{mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
        for (const double v : detail::family_eigenvalues(l, rho, r)) {
            items.push_back({v, rho});
        }
    }
    if (static_cast<int>(items.size()) != 2 * l + 1) {
        throw SpectrumError("lame_eigenvalues: found " + std::to_string(items.size()) + " values, expected 2l+1");
    }
    std::sort(items.begin(), items.end(), [](const Item &x, const Item &y) { return x.v < y.v; });
    LameEigenvalues out;
    out.l = l;
    for (const auto &it : items) {
        out.values.push_back(it.v);
        out.family.push_back(it.rho);
    }
    return out;
}

namespace detail
{

inline boost::math::quadrature::tanh_sinh<double> &quadrature()
{
    static boost::math::quadrature::tanh_sinh<double> ts;
    return ts;
}

// Distances of z from the left and right ends, exact near each end.
struct EndDistance
{
    double left, right;
};

inline EndDistance end_distance(double z, double zc, double a, double b)
{
    if (zc <= 0) {
        return {-zc, b - z};
    }
    return {z - a, zc};
}

inline void check_open_interval(double E, const RealRoots &r, const char *what)
{
    if (!(E > r.e3 && E < r.e1) || E == r.e2) {
        throw std::domain_error(std::string(what) + ": E must lie in (e3, e2) or (e2, e1)");
    }
}

} // namespace detail

/// int_{e2}^{e1} sqrt((z - E)/((e1 - z)(z - e2)(z - e3))) dz, E <= e2.
inline double lower_phase_integral(double E, const Lattice &lat)
{
    const auto r = detail::real_roots(lat);
    return detail::quadrature().integrate(
        [&](double z, double zc) {
            const auto d = detail::end_distance(z, zc, r.e2, r.e1);
            return std::sqrt((d.left + (r.e2 - E)) / (d.right * d.left * (z - r.e3)));
        },
        r.e2, r.e1, 1e-14);
}

/// int_{e3}^{e2} sqrt((E - z)/((e1 - z)(e2 - z)(z - e3))) dz, E >= e2.
inline double upper_phase_integral(double E, const Lattice &lat)
{
    const auto r = detail::real_roots(lat);
    return detail::quadrature().integrate(
        [&](double z, double zc) {
            const auto d = detail::end_distance(z, zc, r.e3, r.e2);
            return std::sqrt((d.right + (E - r.e2)) / ((r.e1 - z) * d.right * d.left));
        },
        r.e3, r.e2, 1e-14);
}

/// WKB count of Lame-polynomial locations below E (normalized energy).
inline double counting_function(double E, double eta, const Lattice &lat)
{
    const auto r = detail::real_roots(lat);
    detail::check_open_interval(E, r, "counting_function");
    if (E < r.e2) {
        return eta / std::numbers::pi * (std::numbers::pi - lower_phase_integral(E, lat));
    }
    return eta / std::numbers::pi * upper_phase_integral(E, lat);
}

/// (1/eta) dn/dE. The part singular as E -> e2 is integrated in closed form:
/// int_0^L ds / sqrt(s (s + delta)) = 2 asinh(sqrt(L / delta)).
inline double density(double E, const Lattice &lat)
{
    const auto r = detail::real_roots(lat);
    if (E == r.e1 || E == r.e2 || E == r.e3) {
        throw std::domain_error("density: E at a singular point");
    }
    detail::check_open_interval(E, r, "density");
    const bool upper = E > r.e2;
    const double a = upper ? r.e3 : r.e2, b = upper ? r.e2 : r.e1;
    const double delta = std::abs(E - r.e2), L = b - a;
    const double w0 = 1.0 / std::sqrt((r.e1 - E) * (E - r.e3));
    const double singular = w0 * 2.0 * std::asinh(std::sqrt(L / delta));
    const double rest = detail::quadrature().integrate(
        [&](double z, double zc) {
            const auto d = detail::end_distance(z, zc, a, b);
            const double s = upper ? d.right : d.left; // distance to e2
            // The far end (e3 or e1) is an endpoint too; use its exact distance.
            const double w = upper ? 1.0 / std::sqrt((r.e1 - z) * d.left) : 1.0 / std::sqrt(d.right * (z - r.e3));
            return (w - w0) / std::sqrt(s * (s + delta));
        },
        a, b, 1e-13);
    return (singular + rest) / (2.0 * std::numbers::pi);
}

/// Logarithmic law of the density at e2.
inline double density_asymptotic_e2(double E, const Lattice &lat)
{
    const auto r = detail::real_roots(lat);
    const double a = r.e1 - r.e2, b = r.e2 - r.e3;
    return std::log(16.0 * a * b / ((r.e1 - r.e3) * std::abs(E - r.e2))) / (2.0 * std::numbers::pi * std::sqrt(a * b));
}

/// Adjacent eigenvalues paired when their gap is below ratio * median gap.
/// min_inter is the smallest spacing of neighbouring pair centres.
struct Pairing
{
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> singles;
    double max_intra = 0.0;
    double min_inter = INFINITY;
};

inline Pairing pair_eigenvalues(const std::vector<double> &sorted, double ratio = 0.25)
{
    Pairing p;
    if (sorted.size() < 2) {
        p.singles = sorted;
        return p;
    }
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        gaps.push_back(sorted[i + 1] - sorted[i]);
    }
    std::vector<double> g = gaps;
    std::nth_element(g.begin(), g.begin() + static_cast<long>(g.size() / 2), g.end());
    const double median = g[g.size() / 2];
    for (std::size_t i = 0; i < sorted.size();) {
        if (i + 1 < sorted.size() && gaps[i] < ratio * median) {
            p.pairs.emplace_back(sorted[i], sorted[i + 1]);
            p.max_intra = std::max(p.max_intra, gaps[i]);
            i += 2;
        } else {
            p.singles.push_back(sorted[i]);
            i += 1;
        }
    }
    // Spacing between neighbouring pair centres; singles are not counted.
    for (std::size_t i = 0; i + 1 < p.pairs.size(); ++i) {
        const double c0 = 0.5 * (p.pairs[i].first + p.pairs[i].second);
        const double c1 = 0.5 * (p.pairs[i + 1].first + p.pairs[i + 1].second);
        p.min_inter = std::min(p.min_inter, c1 - c0);
    }
    return p;
}

struct QuantizationResidual
{
    double top = 0.0;    // m-th location from the top, target n = eta - m
    double bottom = 0.0; // m-th location from the bottom, target n = m
    double E_top = 0.0, E_bottom = 0.0;
};

namespace detail
{

// Merged locations, lowest first: pairs anchored at each end of the spectrum,
// meeting at the unpaired value nearest l(l+1) e2.
inline std::vector<double> merged_locations(const std::vector<double> &v, double centre)
{
    const auto n = static_cast<long>(v.size());
    // Pairs from both ends leave the single at an even index.
    long s = 0;
    for (long i = 2; i < n; i += 2) {
        if (std::abs(v[static_cast<std::size_t>(i)] - centre) < std::abs(v[static_cast<std::size_t>(s)] - centre)) {
            s = i;
        }
    }
    std::vector<double> out;
    for (long i = 0; i + 1 < s; i += 2) {
        out.push_back(0.5 * (v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i + 1)]));
    }
    for (long i = s + 1; i + 1 < n; i += 2) {
        out.push_back(0.5 * (v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i + 1)]));
    }
    return out;
}

} // namespace detail

/// Residuals of the phase conditions at the m-th merged location from either
/// end, measured through n(E): on the matching branch (pi/eta)|n - target| is
/// exactly |phase integral - (pi - m pi/eta)|.
inline QuantizationResidual quantization_check(int l, int m, const Lattice &lat)
{
    if (m < 1 || m > l) {
        throw std::invalid_argument("quantization_check: 1 <= m <= l required");
    }
    const auto ev = lame_eigenvalues(l, lat);
    const double ll = static_cast<double>(l) * (l + 1), eta = std::sqrt(ll);
    const auto r = detail::real_roots(lat);
    const auto loc = detail::merged_locations(ev.values, ll * r.e2);
    if (static_cast<std::size_t>(m) > loc.size()) {
        throw std::invalid_argument("quantization_check: m exceeds the number of merged locations");
    }
    const auto um = static_cast<std::size_t>(m);
    QuantizationResidual q;
    q.E_top = loc[loc.size() - um] / ll;
    q.E_bottom = loc[um - 1] / ll;
    const double scale = std::numbers::pi / eta;
    q.top = scale * std::abs(counting_function(q.E_top, eta, lat) - (eta - m));
    q.bottom = scale * std::abs(counting_function(q.E_bottom, eta, lat) - m);
    return q;
}

struct WkbCountReport
{
    std::vector<double> probes;
    std::vector<int> raw;
    std::vector<double> wkb; // 2 n(E)
    double max_deviation = 0.0;
};

/// Raw count of eigenvalues below l(l+1) E against 2 n(E) at each probe.
inline WkbCountReport empirical_vs_wkb(int l, const Lattice &lat, const std::vector<double> &probes)
{
    if (l < 20) {
        throw std::invalid_argument("empirical_vs_wkb: l >= 20 required");
    }
    const auto ev = lame_eigenvalues(l, lat);
    const double ll = static_cast<double>(l) * (l + 1), eta = std::sqrt(ll);
    WkbCountReport rep;
    rep.probes = probes;
    for (const double E : probes) {
        const auto raw = std::lower_bound(ev.values.begin(), ev.values.end(), ll * E) - ev.values.begin();
        const double w = 2.0 * counting_function(E, eta, lat);
        rep.raw.push_back(static_cast<int>(raw));
        rep.wkb.push_back(w);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(static_cast<double>(raw) - w));
    }
    return rep;
}

/// Normalized energies halfway between neighbouring merged locations,
/// spread evenly over the spectrum and skipping the two around e2.
inline std::vector<double> gap_midpoints(int l, const Lattice &lat, int count = 9)
{
    const auto ev = lame_eigenvalues(l, lat);
    const double ll = static_cast<double>(l) * (l + 1);
    const auto r = detail::real_roots(lat);
    const auto loc = detail::merged_locations(ev.values, ll * r.e2);
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < loc.size(); ++i) {
        if (loc[i] < ll * r.e2 && loc[i + 1] > ll * r.e2) {
            continue;
        }
        mids.push_back(0.5 * (loc[i] + loc[i + 1]) / ll);
    }
    if (count < 1 || mids.size() < static_cast<std::size_t>(count)) {
        throw std::invalid_argument("gap_midpoints: not enough gaps");
    }
    std::vector<double> out;
    for (int k = 0; k < count; ++k) {
        const auto idx = count == 1 ? mids.size() / 2 : static_cast<std::size_t>(std::lround(static_cast<double>(k) * (mids.size() - 1) / (count - 1)));
        out.push_back(mids[idx]);
    }
    return out;
}

struct HistogramReport
{
    std::vector<double> edges;
    std::vector<int> observed;
    std::vector<double> expected;
    int excluded_bin = -1;
    double linf_relative = 0.0; // max |obs - exp| / max exp over kept bins
};

/// Normalized eigenvalues binned over [e3, e1] against 2 (n(b) - n(a)).
inline HistogramReport density_histogram(int l, const Lattice &lat, int bins = 20)
{
    const auto ev = lame_eigenvalues(l, lat);
    const auto r = detail::real_roots(lat);
    const double ll = static_cast<double>(l) * (l + 1), eta = std::sqrt(ll);
    HistogramReport h;
    for (int k = 0; k <= bins; ++k) {
        h.edges.push_back(r.e3 + (r.e1 - r.e3) * k / bins);
    }
    h.observed.assign(static_cast<std::size_t>(bins), 0);
    for (const double v : ev.values) {
        const double E = v / ll;
        int k = static_cast<int>(std::floor((E - r.e3) / (r.e1 - r.e3) * bins));
        k = std::clamp(k, 0, bins - 1);
        ++h.observed[static_cast<std::size_t>(k)];
    }
    auto n_at = [&](double E) {
        if (E <= r.e3) {
            return 0.0;
        }
        if (E >= r.e1) {
            return eta;
        }
        if (E == r.e2) {
            E = std::nextafter(E, r.e1);
        }
        return counting_function(E, eta, lat);
    };
    double max_exp = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double a = h.edges[static_cast<std::size_t>(k)], b = h.edges[static_cast<std::size_t>(k + 1)];
        h.expected.push_back(2.0 * (n_at(b) - n_at(a)));
        if (a <= r.e2 && r.e2 < b) {
            h.excluded_bin = k;
        } else {
            max_exp = std::max(max_exp, h.expected.back());
        }
    }
    double worst = 0.0;
    for (int k = 0; k < bins; ++k) {
        if (k == h.excluded_bin) {
            continue;
        }
        worst = std::max(worst, std::abs(h.observed[static_cast<std::size_t>(k)] - h.expected[static_cast<std::size_t>(k)]));
    }
    h.linf_relative = worst / max_exp;
    return h;
}

} // namespace heungap

#endif
