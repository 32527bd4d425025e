#ifndef HEUNGAP_SYMALG_MULTIPOLY_HPP
#define HEUNGAP_SYMALG_MULTIPOLY_HPP

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heungap::symalg
{

/// Symbols of the Weierstrass differential algebra.
///
/// z stands for wp(x) itself and w for wp'(x). zeta and x appear only in the
/// large-E WKB terms, u = (wp - E)^{1/2} only in the large-eta WKB terms, and
/// l is the Lame strength parameter when it is kept symbolic.
enum class Var : std::size_t { e1, e2, E, z, w, g2, g3, zeta, x, u, l };

inline constexpr std::size_t kNumVars = 11;

inline constexpr std::array<std::string_view, kNumVars> kVarNames{
    "e1", "e2", "E", "z", "w", "g2", "g3", "zeta", "x", "u", "l"};

inline constexpr std::size_t index(Var v) noexcept { return static_cast<std::size_t>(v); }

using Rational = mpq_class;
using Exponents = std::array<int, kNumVars>;

/// Reduction context. Determines which algebraic relations are applied
/// eagerly after every product.
///
///  - plain:     no relations.
///  - e_lattice: w^2 = 4(z - e1)(z - e2)(z + e1 + e2), i.e. e3 = -e1 - e2.
///  - g_lattice: w^2 = 4z^3 - g2 z - g3.
///  - wkb:       g_lattice rules plus u^2 = z - E; negative powers of u allowed.
enum class Context { plain, e_lattice, g_lattice, wkb };

inline std::string_view context_name(Context c)
{
    switch (c) {
        case Context::plain: return "plain";
        case Context::e_lattice: return "e_lattice";
        case Context::g_lattice: return "g_lattice";
        case Context::wkb: return "wkb";
    }
    return "?";
}

class ContextError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail
{

// Lexicographic order on exponent vectors with variable priority
// E > z > w > u > zeta > x > l > g2 > g3 > e1 > e2. Larger monomials first.
inline constexpr std::array<Var, kNumVars> kOrderPriority{
    Var::E, Var::z, Var::w, Var::u, Var::zeta, Var::x, Var::l, Var::g2, Var::g3, Var::e1, Var::e2};

// Variables are printed inside a monomial in this order.
inline constexpr std::array<Var, kNumVars> kPrintOrder{
    Var::l, Var::e1, Var::e2, Var::g2, Var::g3, Var::E, Var::z, Var::w, Var::zeta, Var::x, Var::u};

struct MonomialGreater
{
    bool operator()(const Exponents &a, const Exponents &b) const noexcept
    {
        for (Var v : kOrderPriority) {
            const auto i = index(v);
            if (a[i] != b[i]) {
                return a[i] > b[i];
            }
        }
        return false;
    }
};

inline Context merge_context(Context a, Context b)
{
    if (a == b || b == Context::plain) {
        return a;
    }
    if (a == Context::plain) {
        return b;
    }
    if ((a == Context::g_lattice && b == Context::wkb) || (a == Context::wkb && b == Context::g_lattice)) {
        return Context::wkb;
    }
    throw ContextError("incompatible polynomial contexts: " + std::string(context_name(a)) + " and "
                       + std::string(context_name(b)));
}

inline bool divides(const Exponents &a, const Exponents &b) noexcept
{
    for (std::size_t i = 0; i < kNumVars; ++i) {
        if (a[i] > b[i]) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a canonical map (no zero coefficients), and the
/// reduction rules of the attached Context are applied after every product,
/// so that in the lattice contexts w appears at most linearly.
class MultiPoly
{
public:
    using TermMap = std::map<Exponents, Rational, detail::MonomialGreater>;

    MultiPoly() = default;
    explicit MultiPoly(Context ctx) : ctx_(ctx) {}
    MultiPoly(const Rational &c, Context ctx = Context::plain) : ctx_(ctx)
    {
        if (c != 0) {
            terms_.emplace(Exponents{}, c);
        }
    }
    MultiPoly(long c, Context ctx = Context::plain) : MultiPoly(Rational(c), ctx) {}

    static MultiPoly variable(Var v, Context ctx = Context::plain) { return monomial(v, 1, ctx); }

    static MultiPoly monomial(Var v, int power, Context ctx = Context::plain)
    {
        Exponents e{};
        e[index(v)] = power;
        return term(e, Rational(1), ctx);
    }

    static MultiPoly term(const Exponents &e, const Rational &c, Context ctx = Context::plain)
    {
        MultiPoly p(ctx);
        check_exponents(e, ctx);
        if (c != 0) {
            p.terms_.emplace(e, c);
        }
        p.reduce();
        return p;
    }

    Context context() const noexcept { return ctx_; }
    const TermMap &terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    bool is_constant() const noexcept
    {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{});
    }

    Rational constant_term() const
    {
        auto it = terms_.find(Exponents{});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational coefficient(const Exponents &e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    bool contains(Var v) const noexcept
    {
        return std::any_of(terms_.begin(), terms_.end(),
                           [v](const auto &t) { return t.first[index(v)] != 0; });
    }

    int degree(Var v) const
    {
        int d = 0;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            if (first || e[index(v)] > d) {
                d = e[index(v)];
                first = false;
            }
        }
        return d;
    }

    int min_degree(Var v) const
    {
        int d = 0;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            if (first || e[index(v)] < d) {
                d = e[index(v)];
                first = false;
            }
        }
        return d;
    }

    const std::pair<const Exponents, Rational> &leading_term() const
    {
        if (terms_.empty()) {
            throw std::domain_error("leading term of the zero polynomial");
        }
        return *terms_.begin();
    }

    /// Same terms, different reduction context (reductions re-applied).
    MultiPoly with_context(Context ctx) const
    {
        MultiPoly p(ctx);
        for (const auto &[e, c] : terms_) {
            check_exponents(e, ctx);
        }
        p.terms_ = terms_;
        p.reduce();
        return p;
    }

    /// Coefficients with respect to v: p = sum_k coeff[k] * v^k.
    std::map<int, MultiPoly> coefficients_in(Var v) const
    {
        std::map<int, MultiPoly> out;
        for (const auto &[e, c] : terms_) {
            Exponents rest = e;
            const int k = rest[index(v)];
            rest[index(v)] = 0;
            auto [it, inserted] = out.try_emplace(k, MultiPoly(ctx_));
            it->second.terms_.emplace(rest, c);
        }
        return out;
    }

    MultiPoly coefficient_of(Var v, int k) const
    {
        MultiPoly out(ctx_);
        for (const auto &[e, c] : terms_) {
            if (e[index(v)] == k) {
                Exponents rest = e;
                rest[index(v)] = 0;
                out.terms_.emplace(rest, c);
            }
        }
        return out;
    }

    MultiPoly operator-() const
    {
        MultiPoly p = *this;
        for (auto &[e, c] : p.terms_) {
            c = -c;
        }
        return p;
    }

    MultiPoly &operator+=(const MultiPoly &o)
    {
        ctx_ = detail::merge_context(ctx_, o.ctx_);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, c);
        }
        return *this;
    }

    MultiPoly &operator-=(const MultiPoly &o)
    {
        ctx_ = detail::merge_context(ctx_, o.ctx_);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, -c);
        }
        return *this;
    }

    MultiPoly &operator*=(const MultiPoly &o)
    {
        *this = *this * o;
        return *this;
    }

    MultiPoly &operator*=(const Rational &s)
    {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto &[e, c] : terms_) {
            c *= s;
        }
        return *this;
    }

    MultiPoly &operator/=(const Rational &s)
    {
        if (s == 0) {
            throw std::domain_error("division of a polynomial by zero");
        }
        for (auto &[e, c] : terms_) {
            c /= s;
        }
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly &b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly &b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, const Rational &s) { return a *= s; }
    friend MultiPoly operator*(const Rational &s, MultiPoly a) { return a *= s; }
    friend MultiPoly operator/(MultiPoly a, const Rational &s) { return a /= s; }

    friend MultiPoly operator*(const MultiPoly &a, const MultiPoly &b)
    {
        MultiPoly p(detail::merge_context(a.ctx_, b.ctx_));
        for (const auto &[ea, ca] : a.terms_) {
            for (const auto &[eb, cb] : b.terms_) {
                Exponents e;
                for (std::size_t i = 0; i < kNumVars; ++i) {
                    e[i] = ea[i] + eb[i];
                }
                p.add_term(e, ca * cb);
            }
        }
        p.reduce();
        return p;
    }

    /// Exact equality in the quotient algebra of the (merged) context.
    friend bool operator==(const MultiPoly &a, const MultiPoly &b);
    friend bool operator!=(const MultiPoly &a, const MultiPoly &b) { return !(a == b); }

    MultiPoly pow(unsigned n) const
    {
        MultiPoly result(Rational(1), ctx_);
        MultiPoly base = *this;
        while (n != 0) {
            if (n & 1U) {
                result *= base;
            }
            n >>= 1U;
            if (n != 0) {
                base *= base;
            }
        }
        return result;
    }

    /// Replace v by value. v must only appear with non-negative exponents.
    MultiPoly substitute(Var v, const MultiPoly &value) const
    {
        const Context ctx = detail::merge_context(ctx_, value.ctx_);
        MultiPoly out(ctx);
        std::vector<MultiPoly> powers{MultiPoly(Rational(1), ctx)};
        for (const auto &[k, coeff] : coefficients_in(v)) {
            if (k < 0) {
                throw std::domain_error("cannot substitute a variable carrying negative exponents");
            }
            while (static_cast<int>(powers.size()) <= k) {
                powers.push_back(powers.back() * value);
            }
            out += coeff.with_context(ctx) * powers[static_cast<std::size_t>(k)];
        }
        return out;
    }

    /// Numeric evaluation; values indexed by Var.
    std::complex<double> evaluate(const std::array<std::complex<double>, kNumVars> &values) const
    {
        std::complex<double> sum = 0.0;
        for (const auto &[e, c] : terms_) {
            std::complex<double> t = c.get_d();
            for (std::size_t i = 0; i < kNumVars; ++i) {
                if (e[i] != 0) {
                    t *= std::pow(values[i], e[i]);
                }
            }
            sum += t;
        }
        return sum;
    }

    /// Canonical text rendering, e.g. "E^3 - (1/4)*g2*E + (1/4)*g3".
    std::string to_string() const
    {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream os;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            const bool negative = c < 0;
            const Rational mag = abs(c);
            if (first) {
                if (negative) {
                    os << "-";
                }
            } else {
                os << (negative ? " - " : " + ");
            }
            first = false;
            const std::string mono = monomial_string(e);
            if (mono.empty()) {
                os << coefficient_string(mag);
            } else if (mag == 1) {
                os << mono;
            } else {
                os << coefficient_string(mag) << "*" << mono;
            }
        }
        return os.str();
    }

private:
    static void check_exponents(const Exponents &e, Context ctx)
    {
        for (std::size_t i = 0; i < kNumVars; ++i) {
            if (e[i] < 0 && !(ctx == Context::wkb && i == index(Var::u))) {
                throw ContextError("negative exponent for variable " + std::string(kVarNames[i]));
            }
        }
    }

    static std::string coefficient_string(const Rational &mag)
    {
        if (mag.get_den() == 1) {
            return mag.get_num().get_str();
        }
        return "(" + mag.get_num().get_str() + "/" + mag.get_den().get_str() + ")";
    }

    static std::string monomial_string(const Exponents &e)
    {
        std::string s;
        for (Var v : detail::kPrintOrder) {
            const int k = e[index(v)];
            if (k == 0) {
                continue;
            }
            if (!s.empty()) {
                s += "*";
            }
            s += kVarNames[index(v)];
            if (k != 1) {
                s += "^" + std::to_string(k);
            }
        }
        return s;
    }

    void add_term(const Exponents &e, const Rational &c)
    {
        if (c == 0) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                terms_.erase(it);
            }
        }
    }

    // w^2 in terms of z and the lattice symbols of the context.
    static MultiPoly w_squared(Context ctx)
    {
        const auto z = variable(Var::z, Context::plain);
        if (ctx == Context::e_lattice) {
            const auto e1 = variable(Var::e1);
            const auto e2 = variable(Var::e2);
            return Rational(4) * (z - e1) * (z - e2) * (z + e1 + e2);
        }
        return Rational(4) * z * z * z - variable(Var::g2) * z - variable(Var::g3);
    }

    void reduce()
    {
        if (ctx_ == Context::plain) {
            return;
        }
        const std::size_t iw = index(Var::w);
        const std::size_t iu = index(Var::u);
        const bool use_u = ctx_ == Context::wkb;
        auto needs = [&](const Exponents &e) { return e[iw] >= 2 || (use_u && e[iu] >= 2); };
        if (std::none_of(terms_.begin(), terms_.end(), [&](const auto &t) { return needs(t.first); })) {
            return;
        }
        const MultiPoly wsq = w_squared(ctx_);
        MultiPoly zme(Context::plain);
        if (use_u) {
            zme = variable(Var::z) - variable(Var::E);
        }
        // Each pass lowers the w- and u-degree of offending terms by two.
        while (true) {
            TermMap pending;
            for (auto it = terms_.begin(); it != terms_.end();) {
                if (needs(it->first)) {
                    pending.insert(*it);
                    it = terms_.erase(it);
                } else {
                    ++it;
                }
            }
            if (pending.empty()) {
                break;
            }
            for (const auto &[e, c] : pending) {
                Exponents rest = e;
                const MultiPoly *factor = nullptr;
                if (rest[iw] >= 2) {
                    rest[iw] -= 2;
                    factor = &wsq;
                } else {
                    rest[iu] -= 2;
                    factor = &zme;
                }
                for (const auto &[ef, cf] : factor->terms_) {
                    Exponents sum;
                    for (std::size_t i = 0; i < kNumVars; ++i) {
                        sum[i] = rest[i] + ef[i];
                    }
                    add_term(sum, c * cf);
                }
            }
        }
    }

    friend MultiPoly wkb_normal_form(const MultiPoly &p);

    TermMap terms_;
    Context ctx_ = Context::plain;
};

/// Canonical form of a wkb-context element: z is eliminated through
/// z = u^2 + E, leaving a Laurent polynomial in u that is at most linear in w.
/// Two wkb elements are equal iff their normal forms coincide.
inline MultiPoly wkb_normal_form(const MultiPoly &p)
{
    const auto u = MultiPoly::variable(Var::u);
    const auto E = MultiPoly::variable(Var::E);
    const MultiPoly zval = u * u + E;
    MultiPoly plain_p(Context::plain);
    plain_p.terms_ = p.terms_;
    // Split off the non-negative part in z; u may be negative so substitute
    // only into z.
    MultiPoly out(Context::plain);
    std::vector<MultiPoly> zpow{MultiPoly(Rational(1))};
    const MultiPoly wsq = Rational(4) * zval.pow(3) - MultiPoly::variable(Var::g2) * zval - MultiPoly::variable(Var::g3);
    std::vector<MultiPoly> wsqpow{MultiPoly(Rational(1))};
    for (const auto &[e, c] : plain_p.terms_) {
        Exponents rest = e;
        const int kz = rest[index(Var::z)];
        const int kw = rest[index(Var::w)];
        rest[index(Var::z)] = 0;
        rest[index(Var::w)] = kw % 2;
        while (static_cast<int>(zpow.size()) <= kz) {
            zpow.push_back(zpow.back() * zval);
        }
        while (static_cast<int>(wsqpow.size()) <= kw / 2) {
            wsqpow.push_back(wsqpow.back() * wsq);
        }
        MultiPoly t(Context::plain);
        t.terms_.emplace(rest, c);
        out += t * zpow[static_cast<std::size_t>(kz)] * wsqpow[static_cast<std::size_t>(kw / 2)];
    }
    return out;
}

inline bool operator==(const MultiPoly &a, const MultiPoly &b)
{
    const Context ctx = detail::merge_context(a.ctx_, b.ctx_);
    if (ctx == Context::wkb) {
        return wkb_normal_form(a - b).is_zero();
    }
    return a.terms_ == b.terms_;
}

inline MultiPoly var(Var v, Context ctx = Context::plain) { return MultiPoly::variable(v, ctx); }

inline std::ostream &operator<<(std::ostream &os, const MultiPoly &p) { return os << p.to_string(); }

/// The invariant g2 expressed in the lattice symbols of ctx.
inline MultiPoly g2_of(Context ctx)
{
    if (ctx == Context::e_lattice) {
        const auto e1 = var(Var::e1, ctx);
        const auto e2 = var(Var::e2, ctx);
        return Rational(4) * (e1 * e1 + e1 * e2 + e2 * e2);
    }
    return var(Var::g2, ctx);
}

/// The invariant g3 expressed in the lattice symbols of ctx.
inline MultiPoly g3_of(Context ctx)
{
    if (ctx == Context::e_lattice) {
        const auto e1 = var(Var::e1, ctx);
        const auto e2 = var(Var::e2, ctx);
        return Rational(-4) * e1 * e2 * (e1 + e2);
    }
    return var(Var::g3, ctx);
}

/// Derivation d/dx: z' = w, w' = 6z^2 - g2/2, zeta' = -z, x' = 1,
/// u' = w/(2u); e1, e2, E, g2, g3, l are constants.
inline MultiPoly derive_x(const MultiPoly &f)
{
    const Context ctx = f.context();
    MultiPoly out(ctx);
    if (f.is_zero()) {
        return out;
    }
    const auto z = var(Var::z, ctx);
    const MultiPoly dz = var(Var::w, ctx);
    const MultiPoly dw = Rational(6) * z * z - g2_of(ctx) / Rational(2);
    const MultiPoly dzeta = -z;
    const MultiPoly dx(Rational(1), ctx);
    MultiPoly du(ctx);
    if (f.contains(Var::u)) {
        if (ctx != Context::wkb) {
            throw ContextError("u only has a derivation rule in the wkb context");
        }
        du = MultiPoly::term([] {
            Exponents e{};
            e[index(Var::w)] = 1;
            e[index(Var::u)] = -1;
            return e;
        }(), Rational(1, 2), ctx);
    }
    const std::array<std::pair<Var, const MultiPoly *>, 5> rules{{
        {Var::z, &dz}, {Var::w, &dw}, {Var::zeta, &dzeta}, {Var::x, &dx}, {Var::u, &du}}};
    for (const auto &[e, c] : f.terms()) {
        for (const auto &[v, dv] : rules) {
            const int k = e[index(v)];
            if (k == 0) {
                continue;
            }
            Exponents rest = e;
            rest[index(v)] = k - 1;
            out += MultiPoly::term(rest, c * k, ctx) * (*dv);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polynomial division and gcd over Q. These operate on the raw polynomial
// ring (no reductions): callers ensure that divisors are free of w and u.

namespace detail
{

inline MultiPoly as_plain(const MultiPoly &p) { return p.with_context(Context::plain); }

inline MultiPoly shift_term(const MultiPoly &p, const Exponents &e, const Rational &c)
{
    return p * MultiPoly::term(e, c);
}

} // namespace detail

/// Exact quotient a / b, or nullopt when b does not divide a.
inline std::optional<MultiPoly> exact_divide(const MultiPoly &a, const MultiPoly &b)
{
    if (b.is_zero()) {
        throw std::domain_error("polynomial division by zero");
    }
    MultiPoly r = detail::as_plain(a);
    const MultiPoly d = detail::as_plain(b);
    MultiPoly q(Context::plain);
    const auto &[lead_e, lead_c] = d.leading_term();
    while (!r.is_zero()) {
        const auto &[re, rc] = r.leading_term();
        if (!detail::divides(lead_e, re)) {
            return std::nullopt;
        }
        Exponents qe;
        for (std::size_t i = 0; i < kNumVars; ++i) {
            qe[i] = re[i] - lead_e[i];
        }
        const Rational qc = rc / lead_c;
        const MultiPoly t = MultiPoly::term(qe, qc);
        q += t;
        r -= t * d;
    }
    return q.with_context(detail::merge_context(a.context(), b.context()));
}

inline MultiPoly divide_or_throw(const MultiPoly &a, const MultiPoly &b)
{
    auto q = exact_divide(a, b);
    if (!q) {
        throw std::logic_error("inexact polynomial division: (" + a.to_string() + ") / (" + b.to_string() + ")");
    }
    return *q;
}

/// Pseudo-remainder of a by b with respect to v.
inline MultiPoly pseudo_remainder(const MultiPoly &a, const MultiPoly &b, Var v)
{
    MultiPoly r = detail::as_plain(a);
    const MultiPoly d = detail::as_plain(b);
    const int db = d.degree(v);
    const MultiPoly lc = d.coefficient_of(v, db);
    int dr = r.degree(v);
    while (!r.is_zero() && dr >= db) {
        const MultiPoly lr = r.coefficient_of(v, dr);
        r = lc * r - lr * MultiPoly::monomial(v, dr - db) * d;
        dr = r.is_zero() ? 0 : r.degree(v);
    }
    return r;
}

/// Scale p so that its leading coefficient (in the canonical order) is 1.
inline MultiPoly make_monic(const MultiPoly &p)
{
    if (p.is_zero()) {
        return p;
    }
    return p / p.leading_term().second;
}

inline MultiPoly gcd(const MultiPoly &a, const MultiPoly &b);

/// Gcd of the coefficients of p with respect to v.
inline MultiPoly content(const MultiPoly &p, Var v)
{
    MultiPoly g(Context::plain);
    for (const auto &[k, c] : p.coefficients_in(v)) {
        g = gcd(g, c);
        if (g.is_constant() && !g.is_zero()) {
            return MultiPoly(Rational(1));
        }
    }
    return g;
}

/// Monic greatest common divisor over Q (recursive primitive PRS).
inline MultiPoly gcd(const MultiPoly &a_in, const MultiPoly &b_in)
{
    const MultiPoly a = detail::as_plain(a_in);
    const MultiPoly b = detail::as_plain(b_in);
    if (a.is_zero()) {
        return make_monic(b);
    }
    if (b.is_zero()) {
        return make_monic(a);
    }
    if (a.is_constant() || b.is_constant()) {
        return MultiPoly(Rational(1));
    }
    if (a.size() == 1 && b.size() == 1) {
        Exponents e;
        const auto &ea = a.leading_term().first;
        const auto &eb = b.leading_term().first;
        for (std::size_t i = 0; i < kNumVars; ++i) {
            e[i] = std::min(ea[i], eb[i]);
        }
        return MultiPoly::term(e, Rational(1));
    }
    // Main variable: the highest-priority variable present in either input.
    Var v = Var::E;
    for (Var cand : detail::kOrderPriority) {
        if (a.contains(cand) || b.contains(cand)) {
            v = cand;
            break;
        }
    }
    if (!a.contains(v)) {
        return gcd(a, content(b, v));
    }
    if (!b.contains(v)) {
        return gcd(content(a, v), b);
    }
    const MultiPoly ca = content(a, v);
    const MultiPoly cb = content(b, v);
    const MultiPoly c = gcd(ca, cb);
    MultiPoly pa = divide_or_throw(a, ca);
    MultiPoly pb = divide_or_throw(b, cb);
    if (pa.degree(v) < pb.degree(v)) {
        std::swap(pa, pb);
    }
    MultiPoly g(Context::plain);
    while (true) {
        const MultiPoly r = pseudo_remainder(pa, pb, v);
        if (r.is_zero()) {
            g = pb;
            break;
        }
        if (r.degree(v) == 0) {
            g = MultiPoly(Rational(1));
            break;
        }
        pa = pb;
        pb = divide_or_throw(r, content(r, v));
    }
    if (g.contains(v)) {
        g = divide_or_throw(g, content(g, v));
    }
    return make_monic(c * g);
}

/// Least common multiple (monic).
inline MultiPoly lcm(const MultiPoly &a, const MultiPoly &b)
{
    if (a.is_zero() || b.is_zero()) {
        return MultiPoly(Context::plain);
    }
    return make_monic(divide_or_throw(detail::as_plain(a) * detail::as_plain(b), gcd(a, b)));
}

} // namespace heungap::symalg

#endif
