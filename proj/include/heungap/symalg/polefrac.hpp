#ifndef HEUNGAP_SYMALG_POLEFRAC_HPP
#define HEUNGAP_SYMALG_POLEFRAC_HPP

#include "ratfunc.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap::symalg
{

/// e_i in the symbols of ctx, with e3 = -e1 - e2.
inline MultiPoly e_symbol(int i, Context ctx)
{
    const MultiPoly e1 = var(Var::e1, ctx), e2 = var(Var::e2, ctx);
    switch (i) {
        case 1: return e1;
        case 2: return e2;
        case 3: return -e1 - e2;
        default: throw std::out_of_range("e_symbol index must be in 1..3");
    }
}

/// num / prod_{i=1..3} (z - e_i)^{k_i}.
///
/// The denominator is fixed in shape, so sums and derivatives need no gcd.
/// Common factors (z - e_i) are divided out after each operation, which
/// keeps the representation canonical: two fractions are equal iff the
/// difference has a zero numerator.
class PoleFraction
{
public:
    using Orders = std::array<int, 3>;

    PoleFraction() : num_(Context::plain) {}
    PoleFraction(const MultiPoly &num) : num_(num) {} // NOLINT
    PoleFraction(const Rational &c, Context ctx = Context::plain) : num_(c, ctx) {}
    PoleFraction(const MultiPoly &num, const Orders &k) : num_(num), k_(k)
    {
        if ((k[0] | k[1] | k[2]) != 0 && num.context() != Context::e_lattice && !num.is_zero()) {
            throw ContextError("pole fractions with poles require the e_lattice context");
        }
        simplify();
    }

    const MultiPoly &num() const noexcept { return num_; }
    const Orders &orders() const noexcept { return k_; }
    Context context() const noexcept { return num_.context(); }
    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const noexcept { return k_ == Orders{0, 0, 0}; }

    static MultiPoly factor(int i, Context ctx) { return var(Var::z, ctx) - e_symbol(i, ctx); }

    MultiPoly denominator() const
    {
        MultiPoly d(Rational(1), num_.context());
        for (int i = 0; i < 3; ++i) {
            if (k_[static_cast<std::size_t>(i)] > 0) {
                d *= factor(i + 1, num_.context()).pow(static_cast<unsigned>(k_[static_cast<std::size_t>(i)]));
            }
        }
        return d;
    }

    /// Same function with numerator over prod (z - e_i)^{target_i}.
    MultiPoly numerator_over(const Orders &target) const
    {
        MultiPoly n = num_;
        for (int i = 0; i < 3; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (target[ui] < k_[ui]) {
                throw std::logic_error("PoleFraction: cannot lower a pole order");
            }
            if (target[ui] > k_[ui]) {
                n *= factor(i + 1, n.context()).pow(static_cast<unsigned>(target[ui] - k_[ui]));
            }
        }
        return n;
    }

    RatFunc to_ratfunc() const { return RatFunc(num_, denominator()); }

    std::string to_string() const
    {
        if (is_polynomial()) {
            return num_.to_string();
        }
        return "(" + num_.to_string() + ")/(" + denominator().to_string() + ")";
    }

    PoleFraction operator-() const
    {
        PoleFraction r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend PoleFraction operator+(const PoleFraction &a, const PoleFraction &b)
    {
        if (a.k_ == b.k_) {
            return PoleFraction(a.num_ + b.num_, a.k_);
        }
        const Orders k{std::max(a.k_[0], b.k_[0]), std::max(a.k_[1], b.k_[1]), std::max(a.k_[2], b.k_[2])};
        return PoleFraction(a.numerator_over(k) + b.numerator_over(k), k);
    }
    friend PoleFraction operator-(const PoleFraction &a, const PoleFraction &b) { return a + (-b); }

    friend PoleFraction operator*(const PoleFraction &a, const PoleFraction &b)
    {
        if (a.is_zero() || b.is_zero()) {
            return PoleFraction(MultiPoly(merge_context(a, b)));
        }
        return PoleFraction(a.num_ * b.num_, {a.k_[0] + b.k_[0], a.k_[1] + b.k_[1], a.k_[2] + b.k_[2]});
    }

    PoleFraction &operator+=(const PoleFraction &o) { return *this = *this + o; }
    PoleFraction &operator-=(const PoleFraction &o) { return *this = *this - o; }
    PoleFraction &operator*=(const PoleFraction &o) { return *this = *this * o; }

    friend bool operator==(const PoleFraction &a, const PoleFraction &b) { return (a - b).is_zero(); }
    friend bool operator!=(const PoleFraction &a, const PoleFraction &b) { return !(a == b); }

private:
    static Context merge_context(const PoleFraction &a, const PoleFraction &b)
    {
        return detail::merge_context(a.context(), b.context());
    }

    // Divide out factors (z - e_i) shared by the numerator. The algebra is
    // free over Q[z, ...] on {1, w}, so exact division in the raw ring (w as a
    // symbol) decides divisibility.
    void simplify()
    {
        if (num_.is_zero()) {
            k_ = {0, 0, 0};
            return;
        }
        const Context ctx = num_.context();
        for (int i = 0; i < 3; ++i) {
            auto &ki = k_[static_cast<std::size_t>(i)];
            if (ki == 0) {
                continue;
            }
            const MultiPoly f = factor(i + 1, Context::plain);
            MultiPoly n = num_.with_context(Context::plain);
            while (ki > 0) {
                auto q = exact_divide(n, f);
                if (!q) {
                    break;
                }
                n = std::move(*q);
                --ki;
            }
            num_ = n.with_context(ctx);
        }
    }

    MultiPoly num_;
    Orders k_{0, 0, 0};
};

inline PoleFraction derive_x(const PoleFraction &f)
{
    const Context ctx = f.num().context();
    // (N / prod F_i^k_i)' = (N' prod F_i - N w sum_i k_i prod_{j != i} F_j) / prod F_i^{k_i+1},
    // products over the factors present.
    std::vector<int> present;
    for (int i = 0; i < 3; ++i) {
        if (f.orders()[static_cast<std::size_t>(i)] > 0) {
            present.push_back(i);
        }
    }
    if (present.empty()) {
        return PoleFraction(derive_x(f.num()));
    }
    MultiPoly all(Rational(1), ctx);
    for (int i : present) {
        all *= PoleFraction::factor(i + 1, ctx);
    }
    MultiPoly s(ctx);
    for (int i : present) {
        MultiPoly others(Rational(f.orders()[static_cast<std::size_t>(i)]), ctx);
        for (int j : present) {
            if (j != i) {
                others *= PoleFraction::factor(j + 1, ctx);
            }
        }
        s += others;
    }
    PoleFraction::Orders k = f.orders();
    for (int i : present) {
        k[static_cast<std::size_t>(i)] += 1;
    }
    return PoleFraction(derive_x(f.num()) * all - f.num() * var(Var::w, ctx) * s, k);
}

} // namespace heungap::symalg

#endif
