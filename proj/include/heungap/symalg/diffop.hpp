#ifndef HEUNGAP_SYMALG_DIFFOP_HPP
#define HEUNGAP_SYMALG_DIFFOP_HPP

#include "polefrac.hpp"
#include "ratfunc.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace heungap::symalg
{

/// Linear differential operator sum_k c_k D^k with D = d/dx, coefficients in
/// a differential ring C (RatFunc or PoleFraction).
template <class C>
class BasicDiffOp
{
public:
    using Coeff = C;
    using DiffOp = BasicDiffOp<C>;

    BasicDiffOp() = default;
    explicit BasicDiffOp(std::vector<C> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    /// Multiplication operator f * D^0.
    static DiffOp multiplication(const Coeff &f) { return DiffOp({f}); }

    /// D^k with unit coefficient in ctx.
    static DiffOp derivative(std::size_t k, Context ctx = Context::plain)
    {
        std::vector<Coeff> c(k + 1, Coeff(MultiPoly(ctx)));
        c[k] = Coeff(Rational(1), ctx);
        return DiffOp(std::move(c));
    }

    const std::vector<Coeff> &coefficients() const noexcept { return coeffs_; }

    /// Order of the operator; -1 for the zero operator.
    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    Coeff coefficient(std::size_t k) const
    {
        return k < coeffs_.size() ? coeffs_[k] : Coeff();
    }

    friend DiffOp operator+(const DiffOp &a, const DiffOp &b)
    {
        std::vector<Coeff> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = a.coefficient(k) + b.coefficient(k);
        }
        return DiffOp(std::move(c));
    }

    friend DiffOp operator-(const DiffOp &a) { return a * Coeff(Rational(-1)); }
    friend DiffOp operator-(const DiffOp &a, const DiffOp &b) { return a + (-b); }

    /// Left multiplication by a function: f * A.
    friend DiffOp operator*(const Coeff &f, const DiffOp &a)
    {
        std::vector<Coeff> c;
        c.reserve(a.coeffs_.size());
        for (const auto &ck : a.coeffs_) {
            c.push_back(f * ck);
        }
        return DiffOp(std::move(c));
    }
    friend DiffOp operator*(const DiffOp &a, const Coeff &f) { return f * a; }

    bool operator==(const DiffOp &o) const { return coeffs_ == o.coeffs_; }
    bool operator!=(const DiffOp &o) const { return !(*this == o); }

    std::string to_string() const
    {
        if (coeffs_.empty()) {
            return "0";
        }
        std::string s;
        for (std::size_t k = coeffs_.size(); k-- > 0;) {
            if (coeffs_[k].is_zero()) {
                continue;
            }
            if (!s.empty()) {
                s += " + ";
            }
            s += "[" + coeffs_[k].to_string() + "]";
            if (k > 0) {
                s += "*D";
                if (k > 1) {
                    s += "^" + std::to_string(k);
                }
            }
        }
        return s;
    }

private:
    void trim()
    {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) {
            coeffs_.pop_back();
        }
    }

    std::vector<Coeff> coeffs_;
};

using DiffOp = BasicDiffOp<RatFunc>;
using PoleDiffOp = BasicDiffOp<PoleFraction>;

/// Composition A o B, using D^i f = sum_k C(i,k) f^{(k)} D^{i-k}.
template <class C>
BasicDiffOp<C> op_compose(const BasicDiffOp<C> &a, const BasicDiffOp<C> &b)
{
    using Coeff = C;
    using DiffOp = BasicDiffOp<C>;
    if (a.is_zero() || b.is_zero()) {
        return DiffOp();
    }
    const auto &ac = a.coefficients();
    const auto &bc = b.coefficients();
    const std::size_t order_a = ac.size() - 1;
    std::vector<Coeff> out(order_a + bc.size());
    for (std::size_t j = 0; j < bc.size(); ++j) {
        if (bc[j].is_zero()) {
            continue;
        }
        // Derivatives of b_j up to the order of A.
        std::vector<Coeff> db{bc[j]};
        for (std::size_t k = 1; k <= order_a; ++k) {
            db.push_back(derive_x(db.back()));
        }
        for (std::size_t i = 0; i <= order_a; ++i) {
            if (ac[i].is_zero()) {
                continue;
            }
            mpz_class binom = 1;
            for (std::size_t k = 0; k <= i; ++k) {
                if (!db[k].is_zero()) {
                    out[i - k + j] += ac[i] * db[k] * Coeff(Rational(binom));
                }
                binom = binom * static_cast<unsigned long>(i - k) / static_cast<unsigned long>(k + 1);
            }
        }
    }
    return DiffOp(std::move(out));
}

template <class C>
BasicDiffOp<C> op_commutator(const BasicDiffOp<C> &a, const BasicDiffOp<C> &b)
{
    return op_compose(a, b) - op_compose(b, a);
}

} // namespace heungap::symalg

#endif
