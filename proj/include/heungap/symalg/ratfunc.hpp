#ifndef HEUNGAP_SYMALG_RATFUNC_HPP
#define HEUNGAP_SYMALG_RATFUNC_HPP

#include "multipoly.hpp"

#include <stdexcept>
#include <string>

namespace heungap::symalg
{

/// Reduced fraction num/den of polynomials.
///
/// The denominator must be free of w and u; then cancelling the polynomial gcd
/// (with w treated as an ordinary symbol) yields a canonical representative,
/// and the denominator is scaled to leading coefficient 1.
class RatFunc
{
public:
    RatFunc() : num_(Context::plain), den_(Rational(1)) {}
    RatFunc(const MultiPoly &num) : num_(num), den_(Rational(1), num.context()) {} // NOLINT
    RatFunc(const Rational &c, Context ctx = Context::plain) : RatFunc(MultiPoly(c, ctx)) {}
    RatFunc(const MultiPoly &num, const MultiPoly &den) : num_(num), den_(den)
    {
        normalize();
    }

    const MultiPoly &num() const noexcept { return num_; }
    const MultiPoly &den() const noexcept { return den_; }
    Context context() const noexcept { return detail::merge_context(num_.context(), den_.context()); }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const noexcept { return den_.is_constant(); }

    RatFunc operator-() const
    {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend RatFunc operator+(const RatFunc &a, const RatFunc &b)
    {
        if (a.den_ == b.den_) {
            return RatFunc(a.num_ + b.num_, a.den_);
        }
        if (a.is_polynomial() && b.is_polynomial()) {
            return RatFunc(a.num_ + b.num_);
        }
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }

    friend RatFunc operator-(const RatFunc &a, const RatFunc &b) { return a + (-b); }

    friend RatFunc operator*(const RatFunc &a, const RatFunc &b)
    {
        if (a.is_zero() || b.is_zero()) {
            return RatFunc(MultiPoly(a.context()));
        }
        if (a.is_polynomial() && b.is_polynomial()) {
            return RatFunc(a.num_ * b.num_);
        }
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }

    friend RatFunc operator/(const RatFunc &a, const RatFunc &b)
    {
        if (b.is_zero()) {
            throw std::domain_error("rational function division by zero");
        }
        if (b.num_.contains(Var::w) || b.num_.contains(Var::u)) {
            throw ContextError("division by an element involving w or u is not supported");
        }
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }

    RatFunc &operator+=(const RatFunc &o) { return *this = *this + o; }
    RatFunc &operator-=(const RatFunc &o) { return *this = *this - o; }
    RatFunc &operator*=(const RatFunc &o) { return *this = *this * o; }

    friend bool operator==(const RatFunc &a, const RatFunc &b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc &a, const RatFunc &b) { return !(a == b); }

    std::string to_string() const
    {
        if (is_polynomial()) {
            return num_.to_string();
        }
        return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
    }

private:
    void normalize()
    {
        if (den_.is_zero()) {
            throw std::domain_error("rational function with zero denominator");
        }
        if (den_.contains(Var::w) || den_.contains(Var::u)) {
            throw ContextError("rational function denominators must be free of w and u");
        }
        const Context ctx = detail::merge_context(num_.context(), den_.context());
        if (num_.is_zero()) {
            num_ = MultiPoly(ctx);
            den_ = MultiPoly(Rational(1), ctx);
            return;
        }
        if (!den_.is_constant()) {
            const MultiPoly g = gcd(num_, den_);
            if (!g.is_constant()) {
                num_ = divide_or_throw(num_, g);
                den_ = divide_or_throw(den_, g);
            }
        }
        const Rational lc = den_.leading_term().second;
        num_ = (num_ / lc).with_context(ctx);
        den_ = (den_ / lc).with_context(ctx);
    }

    MultiPoly num_;
    MultiPoly den_;
};

/// d/dx of a rational function (quotient rule, then reduced).
inline RatFunc derive_x(const RatFunc &f)
{
    if (f.is_polynomial()) {
        return RatFunc(derive_x(f.num()) / f.den().constant_term());
    }
    const MultiPoly &n = f.num();
    const MultiPoly &d = f.den();
    // (n/d)' = (n' d - n d') / d^2, and d' is linear in w; cancelling against d
    // keeps the denominator w-free.
    return RatFunc(derive_x(n) * d - n * derive_x(d), d * d);
}

} // namespace heungap::symalg

#endif
