#include <heungap/monodromy/floquet.hpp>
#include <heungap/spectrum.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>

using namespace heungap;

namespace
{

Lattice square() { return lattice_from_periods(1.0, cplx(0.0, 1.0)); }
Lattice oblong() { return lattice_from_periods(1.0, cplx(0.0, 1.6)); }
Lattice thin() { return lattice_from_periods(1.0, cplx(0.0, 5.0)); }

nlohmann::json golden()
{
    std::ifstream in(std::string(HEUNGAP_GOLDEN_DIR) + "/spectrum.json");
    return nlohmann::json::parse(in);
}

double e(const Lattice &lat, int i) { return lat.e(i).real(); }

// Roots of (E^2 - 3 g2)(E^3 - 9 g2 E/4 - 27 g3/4): the cubic by the
// trigonometric formula, all three real for a rectangular lattice.
std::vector<double> lame_two_edges(const Lattice &lat)
{
    const double g2 = lat.g2.real(), g3 = lat.g3.real();
    const double p = -2.25 * g2, q = -6.75 * g3;
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double th = std::acos(3.0 * q / (p * m)) / 3.0;
    std::vector<double> out{std::sqrt(3 * g2), -std::sqrt(3 * g2)};
    for (int k = 0; k < 3; ++k) {
        out.push_back(m * std::cos(th - 2.0 * std::numbers::pi * k / 3.0));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(LameEigenvalues, LameOneIsMinusRoots)
{
    for (const auto &lat : {square(), oblong()}) {
        const auto ev = lame_eigenvalues(1, lat);
        ASSERT_EQ(ev.values.size(), 3u);
        std::vector<double> want{-e(lat, 1), -e(lat, 2), -e(lat, 3)};
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(ev.values[i], want[i], 1e-12);
        }
    }
}

TEST(LameEigenvalues, LameTwoAreRootsOfQ)
{
    for (const auto &lat : {square(), oblong()}) {
        const auto ev = lame_eigenvalues(2, lat);
        const auto want = lame_two_edges(lat);
        ASSERT_EQ(want.size(), 5u);
        ASSERT_EQ(ev.values.size(), 5u);
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_NEAR(ev.values[i], want[i], 1e-10 * (1 + std::abs(want[i])));
        }
    }
}

TEST(LameEigenvalues, CountAndRange)
{
    const Lattice lat = oblong();
    for (int l = 1; l <= 200; l += (l < 10 ? 1 : 17)) {
        const auto ev = lame_eigenvalues(l, lat);
        EXPECT_EQ(static_cast<int>(ev.values.size()), 2 * l + 1) << l;
        EXPECT_TRUE(std::is_sorted(ev.values.begin(), ev.values.end()));
        const double ll = l * (l + 1.0);
        for (const double v : ev.values) {
            EXPECT_GE(v / ll, e(lat, 3) - 0.1);
            EXPECT_LE(v / ll, e(lat, 1) + 0.1);
        }
    }
    EXPECT_EQ(lame_eigenvalues(200, square()).values.size(), 401u);
}

TEST(LameEigenvalues, FamiliesMatchParity)
{
    const auto ev = lame_eigenvalues(7, square());
    for (const auto &rho : ev.family) {
        EXPECT_EQ((7 - rho[0] - rho[1] - rho[2]) % 2, 0);
    }
}

TEST(LameEigenvalues, DoublyPeriodicFloquetTest)
{
    FloquetOptions tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    for (const auto &lat : {square(), oblong()}) {
        for (int l = 1; l <= 4; ++l) {
            const auto ev = lame_eigenvalues(l, lat);
            for (const double E : ev.values) {
                // Both period paths from omega1 + omega3 keep the potential real.
                const cplx base = lat.omega1 + lat.omega3;
                const double t1 = integrate_floquet(PotentialSpec::lame(l), lat, E, 1, base, tight).trace.real();
                const double t3 = integrate_floquet(PotentialSpec::lame(l), lat, E, 3, base, tight).trace.real();
                EXPECT_NEAR(std::abs(t1), 2.0, 1e-6) << l << " " << E;
                EXPECT_NEAR(std::abs(t3), 2.0, 1e-6) << l << " " << E;
            }
        }
    }
}

TEST(LameEigenvalues, Preconditions)
{
    EXPECT_THROW(lame_eigenvalues(0, square()), std::invalid_argument);
    EXPECT_THROW(lame_eigenvalues(201, square()), std::invalid_argument);
    EXPECT_THROW(lame_eigenvalues(2, lattice_from_periods(1.0, cplx(0.3, 1.0))), std::invalid_argument);
}

TEST(CountingFunction, EndValues)
{
    for (const auto &lat : {square(), oblong()}) {
        const double eta = std::sqrt(60.0 * 61.0);
        EXPECT_NEAR(counting_function(e(lat, 3) + 1e-10, eta, lat), 0.0, 1e-3);
        EXPECT_NEAR(counting_function(e(lat, 1) - 1e-10, eta, lat), eta, 1e-3);
    }
}

TEST(CountingFunction, ContinuousAcrossE2)
{
    // Linear extrapolation from e2 -/+ h, 2h removes the h log h slope term to O(h).
    for (const auto &lat : {square(), oblong()}) {
        const double e2 = e(lat, 2);
        auto limit = [&](double sign) {
            const double h = 1e-6;
            return 2 * counting_function(e2 + sign * h, 1.0, lat) - counting_function(e2 + sign * 2 * h, 1.0, lat);
        };
        EXPECT_NEAR(limit(-1), limit(1), 1e-5);
    }
}

TEST(CountingFunction, MonotoneAndDensityIsDerivative)
{
    for (const auto &lat : {square(), oblong()}) {
        const double lo = e(lat, 3), hi = e(lat, 1), e2 = e(lat, 2);
        double prev = 0.0;
        for (int k = 1; k < 60; ++k) {
            const double E = lo + (hi - lo) * k / 60.0;
            if (std::abs(E - e2) < 1e-9) {
                continue;
            }
            const double n = counting_function(E, 1.0, lat);
            EXPECT_GE(n, prev);
            prev = n;
            if (std::abs(E - e2) < 0.05 || hi - E < 0.05 || E - lo < 0.05) {
                continue;
            }
            auto fd = [&](double h) { return (counting_function(E + h, 1.0, lat) - counting_function(E - h, 1.0, lat)) / (2 * h); };
            const double d1 = fd(2e-3), d2 = fd(1e-3);
            const double rich = (4 * d2 - d1) / 3;
            const double rho = density(E, lat);
            EXPECT_GT(rho, 0.0);
            EXPECT_NEAR(rich, rho, 1e-4 * rho) << E;
        }
    }
}

TEST(CountingFunction, Domain)
{
    const Lattice lat = square();
    EXPECT_THROW(counting_function(e(lat, 1) + 0.1, 1.0, lat), std::domain_error);
    EXPECT_THROW(counting_function(e(lat, 2), 1.0, lat), std::domain_error);
    EXPECT_THROW(density(e(lat, 3), lat), std::domain_error);
}

TEST(CountingFunction, PiIdentities)
{
    for (const auto &lat : {square(), oblong()}) {
        const double e1 = e(lat, 1), e2 = e(lat, 2), e3 = e(lat, 3);
        auto &q = detail::quadrature();
        const double i1 = q.integrate(
            [&](double z, double zc) {
                const auto d = detail::end_distance(z, zc, e3, e2);
                return 1.0 / std::sqrt(d.right * d.left);
            },
            e3, e2, 1e-14);
        const double i2 = q.integrate(
            [&](double z, double zc) {
                const auto d = detail::end_distance(z, zc, e2, e1);
                return 1.0 / std::sqrt(d.right * d.left);
            },
            e2, e1, 1e-14);
        const double j1 = q.integrate(
            [&](double z, double zc) {
                const auto d = detail::end_distance(z, zc, e3, e2);
                return 1.0 / std::sqrt((e1 - z) * d.left);
            },
            e3, e2, 1e-14);
        const double j2 = q.integrate(
            [&](double z, double zc) {
                const auto d = detail::end_distance(z, zc, e2, e1);
                return 1.0 / std::sqrt(d.right * (z - e3));
            },
            e2, e1, 1e-14);
        EXPECT_NEAR(i1, std::numbers::pi, 1e-10);
        EXPECT_NEAR(i2, std::numbers::pi, 1e-10);
        EXPECT_NEAR((std::numbers::pi - j1) - (j2 - std::numbers::pi), std::numbers::pi, 1e-10);
    }
}

TEST(Density, SymmetricWhenG3Vanishes)
{
    const Lattice lat = square();
    for (const double E : {0.01, 0.3, 0.9, 1.5}) {
        EXPECT_NEAR(density(E, lat), density(-E, lat), 1e-12);
    }
}

TEST(Density, IntegratesToOne)
{
    for (const auto &lat : {square(), oblong()}) {
        auto &q = detail::quadrature();
        auto f = [&](double E) { return density(E, lat); };
        const double total = q.integrate(f, e(lat, 3), e(lat, 2), 1e-10) + q.integrate(f, e(lat, 2), e(lat, 1), 1e-10);
        EXPECT_NEAR(total, 1.0, 1e-8);
    }
}

TEST(Density, LogarithmicLawAtE2)
{
    const auto g = golden()["asymptotic_ratio"];
    for (const auto &lat : {square(), oblong()}) {
        const double e2 = e(lat, 2);
        double prev = INFINITY;
        for (const double f : {1e-2, 1e-3, 1e-5, 1e-8}) {
            const double d = f * (e(lat, 1) - e2);
            EXPECT_DOUBLE_EQ(density_asymptotic_e2(e2 + d, lat), density_asymptotic_e2(e2 - d, lat));
            const double worst = std::max(std::abs(density(e2 + d, lat) / density_asymptotic_e2(e2 + d, lat) - 1),
                                          std::abs(density(e2 - d, lat) / density_asymptotic_e2(e2 - d, lat) - 1));
            if (f == g["offset"].get<double>()) {
                EXPECT_LT(worst, g["limit"].get<double>());
            }
            EXPECT_LE(worst, prev);
            prev = worst;
        }
    }
}

TEST(Density, PowerLawOnThinLattice)
{
    const Lattice lat = thin();
    const double e1 = e(lat, 1), e2 = e(lat, 2);
    ASSERT_LT(e2 - e(lat, 3), 1e-4);
    for (const double f : {0.05, 0.2, 0.5, 0.8}) {
        const double E = e2 + f * (e1 - e2);
        EXPECT_NEAR(density(E, lat), 1.0 / (2.0 * std::sqrt((e1 - e2) * (E - e2))), 1e-3 * density(E, lat));
    }
}

TEST(Quantization, ResidualShrinksWithL)
{
    for (const auto &lat : {square(), oblong()}) {
        const auto a = quantization_check(20, 1, lat), b = quantization_check(40, 1, lat);
        EXPECT_LT(b.top, a.top);
        EXPECT_LT(b.bottom, a.bottom);
        for (const int l : {20, 40}) {
            const auto deep = quantization_check(l, l, lat);
            EXPECT_TRUE(std::isfinite(deep.top));
            EXPECT_LT(deep.top, 0.5);
            EXPECT_LT(deep.bottom, 0.5);
        }
    }
    EXPECT_THROW(quantization_check(20, 0, square()), std::invalid_argument);
    EXPECT_THROW(quantization_check(20, 21, square()), std::invalid_argument);
}

TEST(Quantization, TopLocationsInUpperBranch)
{
    const Lattice lat = square();
    const auto q = quantization_check(40, 3, lat);
    EXPECT_GT(q.E_top, e(lat, 2));
    EXPECT_LT(q.E_bottom, e(lat, 2));
    const double eta = std::sqrt(40.0 * 41.0);
    EXPECT_NEAR(q.top, std::abs(upper_phase_integral(q.E_top, lat) - (std::numbers::pi - 3 * std::numbers::pi / eta)), 1e-12);
    EXPECT_NEAR(q.bottom, std::abs(lower_phase_integral(q.E_bottom, lat) - (std::numbers::pi - 3 * std::numbers::pi / eta)), 1e-12);
}

TEST(Pairing, InteriorPairsMerge)
{
    const auto g = golden()["pairing"];
    const auto ev = lame_eigenvalues(g["l"].get<int>(), square());
    const auto p = pair_eigenvalues(ev.values);
    EXPECT_GE(p.pairs.size(), 50u);
    const double ratio = p.max_intra / p.min_inter;
    EXPECT_LT(ratio, g["limit"].get<double>());
    EXPECT_NEAR(ratio, g["observed"].get<double>(), golden()["regression_tolerance"].get<double>());
}

TEST(BorceaShapiro, CountMatchesTwiceN)
{
    const auto gd = golden();
    const auto g = gd["probe_max_deviation"];
    const int l = g["l"].get<int>();
    EXPECT_EQ(static_cast<int>(lame_eigenvalues(l, square()).values.size()), gd["l60_count"].get<int>());
    const auto probes = gap_midpoints(l, square(), g["probes"].get<int>());
    const auto rep = empirical_vs_wkb(l, square(), probes);
    EXPECT_LE(rep.max_deviation, g["limit"].get<double>());
    EXPECT_NEAR(rep.max_deviation, g["observed"].get<double>(), gd["regression_tolerance"].get<double>());
    EXPECT_LE(empirical_vs_wkb(l, oblong(), gap_midpoints(l, oblong())).max_deviation, g["limit"].get<double>());
    EXPECT_THROW(empirical_vs_wkb(19, square(), probes), std::invalid_argument);
}

TEST(BorceaShapiro, HistogramMatchesDensity)
{
    const auto gd = golden();
    const auto g = gd["histogram"];
    const auto h = density_histogram(g["l"].get<int>(), square(), g["bins"].get<int>());
    int total = 0;
    for (const int c : h.observed) {
        total += c;
    }
    EXPECT_EQ(total, 2 * g["l"].get<int>() + 1);
    EXPECT_GE(h.excluded_bin, 0);
    EXPECT_LE(h.linf_relative, g["limit"].get<double>());
    EXPECT_NEAR(h.linf_relative, g["observed"].get<double>(), gd["regression_tolerance"].get<double>());
}
