#ifndef HEUNGAP_IO_HPP
#define HEUNGAP_IO_HPP

#include "elliptic.hpp"
#include "potential.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace heungap
{

using json = nlohmann::json;

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_real(std::string_view s, std::string_view whole)
{
    double v = 0.0;
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
        throw ConfigError("cannot parse number '" + std::string(whole) + "'");
    }
    return v;
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/// "a", "bi", "a+bi", "a-bi", "i", "-i"; exponents allowed in a and b.
inline cplx parse_complex(std::string_view text)
{
    const std::string_view s = detail::trim(text);
    if (s.empty()) {
        throw ConfigError("empty complex number");
    }
    if (s.back() != 'i') {
        return {detail::parse_real(s, text), 0.0};
    }
    const std::string_view body = s.substr(0, s.size() - 1);
    // The imaginary part starts at the last sign not following an exponent marker.
    std::size_t split = 0;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string_view re = body.substr(0, split), im = body.substr(split);
    auto imag = [&](std::string_view t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return detail::parse_real(t, text);
    };
    return {re.empty() ? 0.0 : detail::parse_real(re, text), imag(im)};
}

inline std::string render_real(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Shortest round-trip text: parse_complex(render_complex(c)) == c.
inline std::string render_complex(cplx c)
{
    if (c.imag() == 0.0 && !std::signbit(c.imag())) {
        return render_real(c.real());
    }
    std::string im = render_real(c.imag());
    if (c.real() == 0.0 && !std::signbit(c.real())) {
        return im + "i";
    }
    if (im.front() != '-') {
        im = "+" + im;
    }
    return render_real(c.real()) + im + "i";
}

/// "omega1,omega3", e.g. "1,1i" for the square lattice.
inline std::pair<cplx, cplx> parse_lattice_spec(std::string_view s)
{
    const auto parts = detail::split(s, ',');
    if (parts.size() != 2) {
        throw ConfigError("lattice must be 'omega1,omega3', got '" + std::string(s) + "'");
    }
    return {parse_complex(parts[0]), parse_complex(parts[1])};
}

/// "l0,l1,l2,l3", or a single integer n for (n,0,0,0).
inline std::array<int, 4> parse_l(std::string_view s)
{
    const auto parts = detail::split(s, ',');
    if (parts.size() != 4 && parts.size() != 1) {
        throw ConfigError("l must be 'l0,l1,l2,l3' or a single integer, got '" + std::string(s) + "'");
    }
    std::array<int, 4> l{};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto &p = parts[i];
        const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), l[i]);
        if (ec != std::errc() || ptr != p.data() + p.size() || p.empty() || l[i] < 0) {
            throw ConfigError("l entries must be non-negative integers, got '" + p + "'");
        }
    }
    return l;
}

/// Semicolon-separated complex points.
inline std::vector<cplx> parse_deltas(std::string_view s)
{
    std::vector<cplx> out;
    if (detail::trim(s).empty()) {
        return out;
    }
    for (const auto &p : detail::split(s, ';')) {
        out.push_back(parse_complex(p));
    }
    return out;
}

enum class OutputFormat { json, csv, text };

inline OutputFormat parse_format(std::string_view s)
{
    if (s == "json") {
        return OutputFormat::json;
    }
    if (s == "csv") {
        return OutputFormat::csv;
    }
    if (s == "text") {
        return OutputFormat::text;
    }
    throw ConfigError("format must be json, csv or text");
}

inline std::string_view format_name(OutputFormat f)
{
    switch (f) {
        case OutputFormat::json: return "json";
        case OutputFormat::csv: return "csv";
        case OutputFormat::text: return "text";
    }
    return "?";
}

struct EnergyRange
{
    double lo = 0.0, hi = 0.0;
    int count = 0;

    std::vector<double> grid() const
    {
        std::vector<double> out;
        for (int k = 0; k < count; ++k) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
        }
        return out;
    }
};

struct RunConfig
{
    cplx omega1{1.0, 0.0};
    cplx omega3{0.0, 1.0};
    PotentialSpec potential;
    std::optional<cplx> energy;
    std::optional<EnergyRange> energies;
    OutputFormat format = OutputFormat::text;
    std::optional<double> tolerance;

    Lattice lattice() const { return lattice_from_periods(omega1, omega3); }
};

inline json to_json(const RunConfig &c)
{
    json j;
    j["lattice"] = render_complex(c.omega1) + "," + render_complex(c.omega3);
    j["l"] = c.potential.l;
    j["M"] = c.potential.M;
    std::vector<std::string> d;
    for (const cplx x : c.potential.deltas) {
        d.push_back(render_complex(x));
    }
    j["deltas"] = d;
    if (c.energy) {
        j["E"] = render_complex(*c.energy);
    }
    if (c.energies) {
        j["energies"] = {{"lo", c.energies->lo}, {"hi", c.energies->hi}, {"count", c.energies->count}};
    }
    j["format"] = std::string(format_name(c.format));
    if (c.tolerance) {
        j["tolerance"] = *c.tolerance;
    }
    return j;
}

inline RunConfig run_config_from_json(const json &j)
{
    try {
        RunConfig c;
        std::tie(c.omega1, c.omega3) = parse_lattice_spec(j.at("lattice").get<std::string>());
        c.potential.l = j.at("l").get<std::array<int, 4>>();
        c.potential.M = j.value("M", 0);
        for (const auto &d : j.value("deltas", std::vector<std::string>{})) {
            c.potential.deltas.push_back(parse_complex(d));
        }
        c.potential.validate();
        if (j.contains("E")) {
            c.energy = parse_complex(j.at("E").get<std::string>());
        }
        if (j.contains("energies")) {
            const auto &e = j.at("energies");
            c.energies = EnergyRange{e.at("lo").get<double>(), e.at("hi").get<double>(), e.at("count").get<int>()};
        }
        c.format = parse_format(j.value("format", std::string("text")));
        if (j.contains("tolerance")) {
            c.tolerance = j.at("tolerance").get<double>();
        }
        return c;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

/// HEUNGAP_TOL if set and positive, otherwise fallback.
inline double env_tolerance(double fallback)
{
    const char *s = std::getenv("HEUNGAP_TOL");
    if (s == nullptr || *s == '\0') {
        return fallback;
    }
    const double v = detail::parse_real(s, s);
    if (!(v > 0) || !std::isfinite(v)) {
        throw ConfigError("HEUNGAP_TOL must be a positive number");
    }
    return v;
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json lattice_json(const Lattice &lat)
{
    return {{"omega1", complex_json(lat.omega1)}, {"omega3", complex_json(lat.omega3)},
            {"g2", complex_json(lat.g2)},         {"g3", complex_json(lat.g3)},
            {"e", json::array({complex_json(lat.e1), complex_json(lat.e2), complex_json(lat.e3)})},
            {"eta1", complex_json(lat.eta1)},     {"eta3", complex_json(lat.eta3)}};
}

/// Minimal CSV writer; doubles in shortest round-trip form.
class CsvWriter
{
public:
    CsvWriter(std::ostream &os, const std::vector<std::string> &header) : os_(os)
    {
        row_strings(header);
    }

    template <class... Cells>
    void row(const Cells &...cells)
    {
        std::vector<std::string> v{cell(cells)...};
        row_strings(v);
    }

private:
    static std::string cell(double v) { return render_real(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string &s) { return s; }
    static std::string cell(const char *s) { return s; }

    void row_strings(const std::vector<std::string> &v)
    {
        for (std::size_t i = 0; i < v.size(); ++i) {
            os_ << (i ? "," : "") << v[i];
        }
        os_ << "\n";
    }

    std::ostream &os_;
};

} // namespace heungap

#endif
