#include <heungap/acceptance.hpp>
#include <heungap/fingap.hpp>
#include <heungap/io.hpp>
#include <heungap/monodromy.hpp>
#include <heungap/spectrum.hpp>
#include <heungap/wkb.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

using namespace heungap;

namespace
{

// Named invariant violated at run time; maps to exit code 3.
class InvariantFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Options
{
    std::string config;
    std::string lattice = "1,1i";
    std::string l = "0,0,0,0";
    std::string deltas;
    std::string format = "text";
    std::string E;
    double e_min = 0.0, e_max = 0.0;
    int grid = 0;
    double tol = 0.0;
    bool dump_config = false;

    // per subcommand
    std::string k = "both";
    std::string method = "all";
    bool three_way = false;
    bool specialize = false;
    int terms = 4;
    bool auto_delta = false;
};

// Results land in index order whatever the completion order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F f)
{
    std::vector<T> out(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(m);
                    if (!err) {
                        err = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (err) {
        std::rethrow_exception(err);
    }
    return out;
}

RunConfig build_config(const Options &o, const CLI::App &app)
{
    RunConfig c;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) {
            throw ConfigError("cannot open config " + o.config);
        }
        try {
            c = run_config_from_json(json::parse(in));
        } catch (const json::exception &e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    auto given = [&](const char *name) { return app.count(name) > 0 || o.config.empty(); };
    if (given("--lattice")) {
        std::tie(c.omega1, c.omega3) = parse_lattice_spec(o.lattice);
    }
    if (given("--l")) {
        c.potential.l = parse_l(o.l);
    }
    if (app.count("--delta") > 0) {
        if (o.deltas != "auto") {
            c.potential.deltas = parse_deltas(o.deltas);
        } else {
            c.potential.deltas.clear();
        }
        c.potential.M = o.deltas == "auto" ? 1 : static_cast<int>(c.potential.deltas.size());
    }
    if (app.count("--format") > 0 || o.config.empty()) {
        c.format = parse_format(o.format);
    }
    if (app.count("--E") > 0) {
        c.energy = parse_complex(o.E);
    }
    if (app.count("--E-min") + app.count("--E-max") + app.count("--grid") > 0) {
        EnergyRange r = c.energies.value_or(EnergyRange{});
        if (app.count("--E-min") > 0) {
            r.lo = o.e_min;
        }
        if (app.count("--E-max") > 0) {
            r.hi = o.e_max;
        }
        if (app.count("--grid") > 0) {
            r.count = o.grid;
        }
        c.energies = r;
    }
    if (app.count("--tol") > 0) {
        c.tolerance = o.tol;
    } else if (std::getenv("HEUNGAP_TOL") != nullptr) {
        c.tolerance = env_tolerance(1.0);
    }
    if (c.tolerance && !(*c.tolerance > 0)) {
        throw ConfigError("tolerance must be positive");
    }
    if (c.energies && c.energies->count < 1) {
        throw ConfigError("grid must have at least one point");
    }
    if (c.energies && !(c.energies->lo <= c.energies->hi)) {
        throw ConfigError("E-min must not exceed E-max");
    }
    if (!o.auto_delta) {
        try {
            c.potential.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    }
    return c;
}

Lattice make_lattice(const RunConfig &c)
{
    try {
        return c.lattice();
    } catch (const std::exception &e) {
        throw ConfigError(std::string("lattice: ") + e.what());
    }
}

void require_symbolic(const RunConfig &c)
{
    if (c.potential.M != 0) {
        throw ConfigError("symbolic commands need M = 0");
    }
}

void require_no_csv(const RunConfig &c, const char *cmd)
{
    if (c.format == OutputFormat::csv) {
        throw ConfigError(std::string(cmd) + " has no CSV form; use json or text");
    }
}

json l_json(const std::array<int, 4> &l) { return l; }

// Real energies: the range if given, else the single E (must be real).
std::vector<double> real_energies(const RunConfig &c, const char *cmd)
{
    if (c.energies) {
        return c.energies->grid();
    }
    if (c.energy) {
        if (c.energy->imag() != 0.0) {
            throw ConfigError(std::string(cmd) + " needs a real E");
        }
        return {c.energy->real()};
    }
    throw ConfigError(std::string(cmd) + " needs --E or --E-min/--E-max/--grid");
}

int cmd_xi(const RunConfig &c, const Options &o)
{
    require_no_csv(c, "xi");
    if (c.potential.M > 0) {
        // Numeric mode: one delta point, Xi solved by collocation at a fixed E.
        if (c.potential.M != 1) {
            throw ConfigError("numeric xi supports M = 1 only");
        }
        if (!c.energy) {
            throw ConfigError("numeric xi needs --E");
        }
        const Lattice lat = make_lattice(c);
        const Weierstrass wf(lat);
        PotentialSpec spec = c.potential;
        if (o.auto_delta) {
            spec.deltas = {solve_delta_condition(spec.l, lat)};
        }
        const cplx cond = delta_condition(spec.l, wf, spec.deltas[0]);
        const NumericXi nx = compute_xi_numeric(spec, lat, *c.energy);
        const double tol = c.tolerance.value_or(1e-8);
        if (c.format == OutputFormat::json) {
            json j{{"command", "xi"},
                   {"mode", "numeric"},
                   {"l", l_json(spec.l)},
                   {"delta", complex_json(spec.deltas[0])},
                   {"E", complex_json(*c.energy)},
                   {"condition_residual", std::abs(cond)},
                   {"nullity", nx.nullity},
                   {"residual", nx.residual}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "delta = " << render_complex(spec.deltas[0]) << "\n"
                      << "condition residual = " << render_real(std::abs(cond)) << "\n"
                      << "nullity = " << nx.nullity << "\n"
                      << "residual = " << render_real(nx.residual) << "\n";
        }
        if (nx.nullity != 1 || nx.residual > tol) {
            throw InvariantFailure("doubly periodic product solution: nullity " + std::to_string(nx.nullity) + ", residual "
                                   + render_real(nx.residual));
        }
        return 0;
    }
    const XiFunction xi = compute_xi(c.potential);
    if (!xi_residual(xi).is_zero()) {
        throw InvariantFailure("Xi does not solve the product equation");
    }
    const std::string text = xi.as_pole_fraction().to_string();
    if (c.format == OutputFormat::json) {
        json b = json::array();
        for (const auto &bi : xi.b) {
            json row = json::array();
            for (const auto &bij : bi) {
                row.push_back(bij.to_string());
            }
            b.push_back(row);
        }
        json j{{"command", "xi"}, {"mode", "symbolic"}, {"l", l_json(xi.l)}, {"genus", xi.genus},
               {"xi", text},      {"c0", xi.c0.to_string()}, {"b", b}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text << "\n";
    }
    return 0;
}

int cmd_qpoly(const RunConfig &c, const Options &o)
{
    require_no_csv(c, "qpoly");
    require_symbolic(c);
    const XiFunction xi = compute_xi(c.potential);
    const SpectralPolynomial q = compute_q(xi);
    const std::string text = q.coeffs.to_string();
    std::vector<double> edges;
    if (o.specialize) {
        edges = spectral_band_edges(q.coeffs, make_lattice(c));
    }
    if (c.format == OutputFormat::json) {
        json j{{"command", "qpoly"}, {"l", l_json(xi.l)}, {"genus", q.genus}, {"degree", 2 * q.genus + 1}, {"q", text}};
        if (o.specialize) {
            const Lattice lat = make_lattice(c);
            json coeffs = json::array();
            for (const cplx v : detail::numeric_coefficients(q.coeffs, lat)) {
                coeffs.push_back(complex_json(v));
            }
            j["lattice"] = lattice_json(lat);
            j["coefficients"] = coeffs;
            j["band_edges"] = edges;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text << "\n";
        for (const double e : edges) {
            std::cout << "edge " << render_real(e) << "\n";
        }
    }
    return 0;
}

int cmd_opA(const RunConfig &c)
{
    require_no_csv(c, "opA");
    require_symbolic(c);
    const XiFunction xi = compute_xi(c.potential);
    const SpectralPolynomial q = compute_q(xi);
    const CommutingOperator A = build_A(xi);
    const CheckReport comm = verify_commutation(A, xi.l, xi.ctx);
    if (!comm.ok) {
        throw InvariantFailure("[A,H] = 0 violated: " + comm.detail);
    }
    const CheckReport bc = verify_burchnall_chaundy(A, q, xi.l, xi.ctx);
    if (!bc.ok) {
        throw InvariantFailure("A^2 + Q(H) = 0 violated: " + bc.detail);
    }
    const std::string text = A.op.to_string();
    if (c.format == OutputFormat::json) {
        json coeffs = json::array();
        for (int k = 0; k <= A.op.order(); ++k) {
            coeffs.push_back(A.op.coefficient(static_cast<std::size_t>(k)).to_string());
        }
        json a = json::array();
        for (const auto &aj : A.a_seq) {
            a.push_back(aj.to_string());
        }
        json j{{"command", "opA"}, {"l", l_json(xi.l)}, {"genus", A.genus}, {"order", A.op.order()}, {"operator", text},
               {"coefficients", coeffs}, {"a", a}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text << "\n";
    }
    return 0;
}

int cmd_bands(const RunConfig &c)
{
    const Lattice lat = make_lattice(c);
    EnergyRange range;
    if (c.energies && c.energies->hi > c.energies->lo) {
        range = *c.energies;
    } else {
        // Default window around the roots of Q.
        if (c.potential.M != 0) {
            throw ConfigError("bands with delta points needs --E-min and --E-max");
        }
        const auto edges = spectral_band_edges(compute_q(compute_xi(c.potential)).coeffs, lat);
        const double lo = edges.empty() ? 0.0 : edges.front(), hi = edges.empty() ? 0.0 : edges.back();
        const double pad = std::max(hi - lo, 2.0);
        range = EnergyRange{lo - pad, hi + pad, c.energies ? c.energies->count : 400};
    }
    if (range.count < 2) {
        throw ConfigError("bands needs a grid of at least 2 points");
    }
    const BandScan s = classify_band(c.potential, lat, range.grid(), 1e-8, true);
    switch (c.format) {
        case OutputFormat::csv: {
            CsvWriter w(std::cout, {"E", "trace1", "trace3", "kind"});
            for (const auto &p : s.points) {
                w.row(p.E, p.trace1, p.trace3, band_kind_name(p.kind));
            }
            break;
        }
        case OutputFormat::json: {
            json pts = json::array();
            for (const auto &p : s.points) {
                pts.push_back({{"E", p.E}, {"trace1", p.trace1}, {"trace3", p.trace3}, {"kind", band_kind_name(p.kind)}});
            }
            json j{{"command", "bands"}, {"l", l_json(c.potential.l)}, {"lattice", lattice_json(lat)}, {"points", pts},
                   {"edges", s.edges}};
            std::cout << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::text:
            for (const double e : s.edges) {
                std::cout << "edge " << render_real(e) << "\n";
            }
            break;
    }
    return 0;
}

struct MonodromyRow
{
    double E = 0.0;
    int k = 1;
    cplx mult;
    std::string method;
};

int cmd_monodromy(const RunConfig &c, const Options &o)
{
    const Lattice lat = make_lattice(c);
    std::vector<int> ks;
    if (o.k == "1" || o.k == "both") {
        ks.push_back(1);
    }
    if (o.k == "3" || o.k == "both") {
        ks.push_back(3);
    }
    if (ks.empty()) {
        throw ConfigError("--k must be 1, 3 or both");
    }
    const bool all = o.method == "all" || o.three_way;
    if (!all && o.method != "floquet" && o.method != "hyperelliptic" && o.method != "hk") {
        throw ConfigError("--method must be floquet, hyperelliptic, hk or all");
    }
    const bool lame12 = c.potential.is_lame() && (c.potential.l[0] == 1 || c.potential.l[0] == 2);
    if ((all || o.method == "hk") && !lame12) {
        throw ConfigError("Hermite-Krichever route needs l = 1 or 2 (Lame)");
    }
    if (o.method == "hyperelliptic" && (c.potential.M != 0 || !c.potential.is_lame())) {
        throw ConfigError("hyperelliptic route needs a Lame potential");
    }
    // Complex E: Floquet only.
    if (c.energy && c.energy->imag() != 0.0 && !c.energies) {
        if (all || o.method != "floquet") {
            throw ConfigError("complex E supports --method floquet only");
        }
        std::vector<MonodromyRow> rows;
        for (const int k : ks) {
            const auto r = integrate_floquet(c.potential, lat, *c.energy, k);
            rows.push_back({c.energy->real(), k, r.multipliers[0], "floquet"});
        }
        if (c.format == OutputFormat::json) {
            json out = json::array();
            for (const auto &r : rows) {
                const auto f = integrate_floquet(c.potential, lat, *c.energy, r.k);
                out.push_back({{"E", complex_json(*c.energy)}, {"k", r.k}, {"method", "floquet"},
                               {"multipliers", json::array({complex_json(f.multipliers[0]), complex_json(f.multipliers[1])})},
                               {"trace", complex_json(f.trace)}});
            }
            std::cout << json{{"command", "monodromy"}, {"l", l_json(c.potential.l)}, {"results", out}}.dump(2) << "\n";
        } else {
            for (const auto &r : rows) {
                std::cout << "k=" << r.k << " multiplier " << render_complex(r.mult) << "\n";
            }
        }
        return 0;
    }
    const std::vector<double> Es = real_energies(c, "monodromy");
    std::optional<XiFunction> xi;
    std::optional<SpectralPolynomial> q;
    std::optional<NumericSpectralData> sd;
    if (all || o.method == "hyperelliptic" || o.method == "hk") {
        xi = compute_xi(c.potential);
        q = compute_q(*xi);
        sd.emplace(*xi, *q, lat);
    }
    const double tol = c.tolerance.value_or(1e-6);
    struct Point
    {
        std::vector<MonodromyRow> rows;
        double disagreement = 0.0;
        bool excluded = false;
    };
    // Band edges (double Floquet multiplier) and, for l = 2, the pole of
    // wp(alpha) at E^2 = 3 g2 are left out of the agreement metric.
    auto degenerate = [&](double E) {
        if (!sd) {
            return false;
        }
        for (const double r : sd->edges()) {
            if (std::abs(E - r) < 1e-6 * std::max(1.0, std::abs(r))) {
                return true;
            }
        }
        return c.potential.l[0] == 2 && std::abs(E * E - 3.0 * lat.g2.real()) < 1e-3;
    };
    const auto points = parallel_map<Point>(Es.size(), [&](std::size_t idx) {
        const double E = Es[idx];
        Point p;
        std::array<cplx, 2> h{}, kk{}, f{};
        std::array<std::array<cplx, 2>, 2> fm{};
        if (all || o.method == "floquet") {
            const auto fp = floquet_pair(integrate_floquet(c.potential, lat, E, 1), integrate_floquet(c.potential, lat, E, 3));
            fm = {fp.m1, fp.m3};
        }
        if (all || o.method == "hyperelliptic") {
            h = {monodromy_hyperelliptic(*sd, c.potential, E, 1).multiplier, monodromy_hyperelliptic(*sd, c.potential, E, 3).multiplier};
        }
        if (all || o.method == "hk") {
            const cplx s = sqrt_minus_q(sd->Q(E).real());
            const HKParams hk = c.potential.l[0] == 1 ? hk_example_l1(E, s, lat) : hk_example_l2(cplx(E), s, lat);
            kk = {hk_multiplier(hk, lat, 1), hk_multiplier(hk, lat, 3)};
        }
        auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
        // The Floquet eigenvalue on the same branch as the integral route.
        std::size_t j = 0;
        if (all) {
            j = rel(fm[0][0], h[0]) + rel(fm[1][0], h[1]) <= rel(fm[0][1], h[0]) + rel(fm[1][1], h[1]) ? 0 : 1;
        }
        f = {fm[0][j], fm[1][j]};
        for (const int k : ks) {
            const std::size_t i = k == 1 ? 0 : 1;
            if (all || o.method == "floquet") {
                p.rows.push_back({E, k, f[i], "floquet"});
            }
            if (all || o.method == "hyperelliptic") {
                p.rows.push_back({E, k, h[i], "hyperelliptic"});
            }
            if (all || o.method == "hk") {
                p.rows.push_back({E, k, kk[i], "hk"});
            }
            if (all) {
                p.disagreement = std::max({p.disagreement, rel(f[i], h[i]), rel(kk[i], h[i]), rel(kk[i], f[i])});
            }
        }
        p.excluded = all && degenerate(E);
        return p;
    });
    double worst = 0.0, worst_E = 0.0;
    int excluded = 0;
    for (const auto &p : points) {
        if (p.excluded) {
            ++excluded;
            continue;
        }
        if (p.disagreement >= worst) {
            worst = p.disagreement;
            worst_E = p.rows.empty() ? 0.0 : p.rows.front().E;
        }
    }
    switch (c.format) {
        case OutputFormat::csv: {
            CsvWriter w(std::cout, {"E", "k", "re_mult", "im_mult", "method"});
            for (const auto &p : points) {
                for (const auto &r : p.rows) {
                    w.row(r.E, r.k, r.mult.real(), r.mult.imag(), r.method);
                }
            }
            break;
        }
        case OutputFormat::json: {
            json rows = json::array();
            for (const auto &p : points) {
                for (const auto &r : p.rows) {
                    rows.push_back({{"E", r.E}, {"k", r.k}, {"multiplier", complex_json(r.mult)}, {"method", r.method}});
                }
            }
            json j{{"command", "monodromy"}, {"l", l_json(c.potential.l)}, {"lattice", lattice_json(lat)}, {"rows", rows}};
            if (all) {
                j["max_disagreement"] = worst;
                j["excluded"] = excluded;
                j["tolerance"] = tol;
            }
            std::cout << j.dump(2) << "\n";
            break;
        }
        case OutputFormat::text:
            for (const auto &p : points) {
                for (const auto &r : p.rows) {
                    std::cout << "E=" << render_real(r.E) << " k=" << r.k << " " << r.method << " "
                              << render_complex(r.mult) << "\n";
                }
            }
            if (all) {
                std::cout << "max relative disagreement " << render_real(worst) << " (" << excluded
                          << " degenerate points excluded)\n";
            }
            break;
    }
    if (o.three_way && worst >= tol) {
        throw InvariantFailure("three-way multiplier agreement: " + render_real(worst) + " at E=" + render_real(worst_E)
                               + " exceeds " + render_real(tol));
    }
    return 0;
}

int cmd_reduction(const RunConfig &c)
{
    const Lattice lat = make_lattice(c);
    const std::vector<double> Es = real_energies(c, "reduction");
    const auto reps = parallel_map<ReductionReport>(Es.size(), [&](std::size_t i) { return reduction_check(Es[i], lat); });
    const double tol = c.tolerance.value_or(1e-8);
    double worst = 0.0;
    for (const auto &r : reps) {
        worst = std::max({worst, r.diff1, r.diff2});
    }
    switch (c.format) {
        case OutputFormat::csv: {
            CsvWriter w(std::cout, {"E", "re_xi", "im_xi", "diff1", "diff2"});
            for (const auto &r : reps) {
                w.row(r.E, r.xi.real(), r.xi.imag(), r.diff1, r.diff2);
            }
            break;
        }
        case OutputFormat::json: {
            json rows = json::array();
            for (const auto &r : reps) {
                rows.push_back({{"E", r.E},
                                {"xi", complex_json(r.xi)},
                                {"alpha", complex_json(r.alpha)},
                                {"kappa", complex_json(r.kappa)},
                                {"lhs1", complex_json(r.lhs1)},
                                {"rhs1", complex_json(r.rhs1)},
                                {"diff1", r.diff1},
                                {"lhs2", complex_json(r.lhs2)},
                                {"rhs2", complex_json(r.rhs2)},
                                {"diff2", r.diff2}});
            }
            std::cout << json{{"command", "reduction"}, {"lattice", lattice_json(lat)}, {"rows", rows}, {"max_residual", worst}}.dump(2)
                      << "\n";
            break;
        }
        case OutputFormat::text:
            for (const auto &r : reps) {
                std::cout << "E=" << render_real(r.E) << " xi=" << render_complex(r.xi) << " diff1=" << render_real(r.diff1)
                          << " diff2=" << render_real(r.diff2) << "\n";
            }
            break;
    }
    if (worst >= tol) {
        throw InvariantFailure("reduction identities: residual " + render_real(worst) + " exceeds " + render_real(tol));
    }
    return 0;
}

std::string family_name(const std::array<int, 3> &rho)
{
    return std::to_string(rho[0]) + std::to_string(rho[1]) + std::to_string(rho[2]);
}

int cmd_lame(const RunConfig &c)
{
    if (!c.potential.is_lame() || c.potential.l[0] < 1) {
        throw ConfigError("lame needs --l n with n >= 1");
    }
    const int l = c.potential.l[0];
    const Lattice lat = make_lattice(c);
    if (!lat.is_rectangular()) {
        throw ConfigError("lame needs a rectangular lattice");
    }
    LameEigenvalues ev;
    try {
        ev = lame_eigenvalues(l, lat);
    } catch (const SpectrumError &e) {
        throw InvariantFailure(std::string("2l+1 eigenvalue count: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    switch (c.format) {
        case OutputFormat::csv: {
            CsvWriter w(std::cout, {"l", "E", "family"});
            for (std::size_t i = 0; i < ev.values.size(); ++i) {
                w.row(l, ev.values[i], family_name(ev.family[i]));
            }
            break;
        }
        case OutputFormat::json: {
            json rows = json::array();
            for (std::size_t i = 0; i < ev.values.size(); ++i) {
                rows.push_back({{"E", ev.values[i]}, {"family", ev.family[i]}});
            }
            std::cout << json{{"command", "lame"}, {"l", l}, {"count", ev.values.size()}, {"eigenvalues", rows}}.dump(2) << "\n";
            break;
        }
        case OutputFormat::text:
            for (std::size_t i = 0; i < ev.values.size(); ++i) {
                std::cout << render_real(ev.values[i]) << " " << family_name(ev.family[i]) << "\n";
            }
            break;
    }
    return 0;
}

int cmd_density(const RunConfig &c)
{
    const Lattice lat = make_lattice(c);
    if (!lat.is_rectangular()) {
        throw ConfigError("density needs a rectangular lattice");
    }
    const auto r = detail::real_roots(lat);
    const int l = c.potential.l[0];
    const double eta = l > 0 ? std::sqrt(static_cast<double>(l) * (l + 1)) : 1.0;
    // Default: midpoints of N cells over (e3, e1).
    std::vector<double> Es;
    if (c.energies && c.energies->hi > c.energies->lo) {
        Es = c.energies->grid();
    } else {
        const int n = c.energies ? c.energies->count : 200;
        for (int k = 0; k < n; ++k) {
            Es.push_back(r.e3 + (r.e1 - r.e3) * (k + 0.5) / n);
        }
    }
    for (double &E : Es) {
        if (!(E > r.e3 && E < r.e1)) {
            throw ConfigError("density energies must lie strictly between e3 and e1");
        }
        if (E == r.e2) {
            E = std::nextafter(E, r.e1);
        }
    }
    const auto vals = parallel_map<std::pair<double, double>>(Es.size(), [&](std::size_t i) {
        return std::pair{counting_function(Es[i], eta, lat), eta * density(Es[i], lat)};
    });
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (Es[i] > Es[i - 1] && vals[i].first < vals[i - 1].first) {
            throw InvariantFailure("counting function not monotone at E=" + render_real(Es[i]));
        }
    }
    switch (c.format) {
        case OutputFormat::csv: {
            CsvWriter w(std::cout, {"E", "n", "density"});
            for (std::size_t i = 0; i < Es.size(); ++i) {
                w.row(Es[i], vals[i].first, vals[i].second);
            }
            break;
        }
        case OutputFormat::json: {
            json rows = json::array();
            for (std::size_t i = 0; i < Es.size(); ++i) {
                rows.push_back({{"E", Es[i]}, {"n", vals[i].first}, {"density", vals[i].second}});
            }
            std::cout << json{{"command", "density"}, {"eta", eta}, {"lattice", lattice_json(lat)}, {"rows", rows}}.dump(2) << "\n";
            break;
        }
        case OutputFormat::text:
            for (std::size_t i = 0; i < Es.size(); ++i) {
                std::cout << render_real(Es[i]) << " " << render_real(vals[i].first) << " " << render_real(vals[i].second) << "\n";
            }
            break;
    }
    return 0;
}

int cmd_wkb(const RunConfig &c, const Options &o)
{
    require_no_csv(c, "wkb");
    if (o.terms < 1 || o.terms > 12) {
        throw ConfigError("--terms must be between 1 and 12");
    }
    // N terms of each series: S_-1 .. S_{N-2} and psi_1 .. psi_N.
    const auto s = wkb_terms(o.terms - 2);
    try {
        verify_riccati(s, o.terms - 2);
    } catch (const WkbError &e) {
        throw InvariantFailure(std::string("Riccati equation: ") + e.what());
    }
    const auto L = large_e_terms(o.terms);
    if (c.format == OutputFormat::json) {
        json S = json::array(), psi = json::array(), inc = json::array();
        for (int j = -1; j <= o.terms - 2; ++j) {
            S.push_back({{"order", j}, {"expr", s.S(j).to_string()}});
        }
        for (int j = 1; j <= o.terms; ++j) {
            psi.push_back({{"order", j}, {"expr", L.term(j).to_string()}});
        }
        for (const auto &i : monodromy_increments(L)) {
            inc.push_back({{"power", i.power}, {"omega", i.omega.to_string()}, {"eta", i.eta.to_string()}});
        }
        std::cout << json{{"command", "wkb"}, {"terms", o.terms}, {"S", S}, {"psi", psi}, {"increments", inc}}.dump(2) << "\n";
    } else {
        for (int j = -1; j <= o.terms - 2; ++j) {
            std::cout << "S_" << j << " = " << s.S(j) << "\n";
        }
        for (int j = 1; j <= o.terms; ++j) {
            std::cout << "psi_" << j << " = " << L.term(j) << "\n";
        }
    }
    return 0;
}

int cmd_check(const RunConfig &c)
{
    require_no_csv(c, "check");
    const auto results = run_acceptance(c.tolerance);
    bool ok = true;
    for (const auto &r : results) {
        ok = ok && r.pass;
    }
    if (c.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto &r : results) {
            rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}, {"budget", r.budget},
                            {"detail", r.detail}});
        }
        std::cout << json{{"command", "check"}, {"pass", ok}, {"criteria", rows}}.dump(2) << "\n";
    } else {
        for (const auto &r : results) {
            std::cout << format_line(r) << "\n";
        }
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Finite-gap Heun/Lame toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "JSON run config; flags override its fields");
    app.add_option("--lattice", o.lattice, "half periods 'omega1,omega3', e.g. 1,1i");
    app.add_option("--l", o.l, "l0,l1,l2,l3 or a single n for Lame");
    app.add_option("--delta", o.deltas, "semicolon-separated delta points, or 'auto' for M=1");
    app.add_option("--format", o.format, "json, csv or text");
    app.add_option("--E", o.E, "energy, complex allowed as a+bi");
    app.add_option("--E-min", o.e_min, "grid start");
    app.add_option("--E-max", o.e_max, "grid end");
    app.add_option("--grid", o.grid, "number of grid points");
    app.add_option("--tol", o.tol, "tolerance override (also HEUNGAP_TOL)");
    app.add_flag("--dump-config", o.dump_config, "print the effective config as JSON and exit");

    auto *xi = app.add_subcommand("xi", "product solution Xi(x,E)");
    auto *qp = app.add_subcommand("qpoly", "spectral polynomial Q(E)");
    qp->add_flag("--specialize", o.specialize, "evaluate on the lattice and list real roots");
    auto *opA = app.add_subcommand("opA", "commuting operator A");
    auto *bands = app.add_subcommand("bands", "real-line band scan");
    auto *mono = app.add_subcommand("monodromy", "period-shift multipliers");
    mono->add_option("--k", o.k, "1, 3 or both");
    mono->add_option("--method", o.method, "floquet, hyperelliptic, hk or all");
    mono->add_flag("--check-three-way", o.three_way, "fail unless all routes agree");
    auto *red = app.add_subcommand("reduction", "genus-2 to elliptic reduction identities (l=2)");
    auto *lame = app.add_subcommand("lame", "Lame polynomial eigenvalues");
    auto *dens = app.add_subcommand("density", "WKB counting function and density");
    auto *wkb = app.add_subcommand("wkb", "WKB and large-E series");
    wkb->add_option("--terms", o.terms, "number of terms of each series");
    auto *check = app.add_subcommand("check", "run the acceptance criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        o.auto_delta = o.deltas == "auto";
        const RunConfig c = build_config(o, app);
        if (o.dump_config) {
            std::cout << to_json(c).dump(2) << "\n";
            return 0;
        }
        if (o.auto_delta && !xi->parsed()) {
            throw ConfigError("--delta auto is only supported by xi");
        }
        if (xi->parsed()) {
            return cmd_xi(c, o);
        }
        if (qp->parsed()) {
            return cmd_qpoly(c, o);
        }
        if (opA->parsed()) {
            return cmd_opA(c);
        }
        if (bands->parsed()) {
            return cmd_bands(c);
        }
        if (mono->parsed()) {
            return cmd_monodromy(c, o);
        }
        if (red->parsed()) {
            return cmd_reduction(c);
        }
        if (lame->parsed()) {
            return cmd_lame(c);
        }
        if (dens->parsed()) {
            return cmd_density(c);
        }
        if (wkb->parsed()) {
            return cmd_wkb(c, o);
        }
        if (check->parsed()) {
            return cmd_check(c);
        }
    } catch (const ConfigError &e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const InvariantFailure &e) {
        std::cerr << "consistency failure: " << e.what() << "\n";
        return 3;
    } catch (const ConsistencyError &e) {
        std::cerr << "consistency failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
