#ifndef HEUNGAP_POTENTIAL_HPP
#define HEUNGAP_POTENTIAL_HPP

#include "elliptic.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace heungap
{

/// v(x) = sum_i l_i(l_i+1) wp(x+omega_i) + 2 sum_j (wp(x-delta_j) + wp(x+delta_j)).
struct PotentialSpec
{
    std::array<int, 4> l{0, 0, 0, 0};
    int M = 0;
    std::vector<cplx> deltas;

    static PotentialSpec lame(int n) { return PotentialSpec{{n, 0, 0, 0}, 0, {}}; }

    bool is_lame() const noexcept { return l[1] == 0 && l[2] == 0 && l[3] == 0 && M == 0; }

    void validate() const
    {
        for (int li : l) {
            if (li < 0) {
                throw std::invalid_argument("potential: l_i must be non-negative integers");
            }
        }
        if (M < 0 || static_cast<std::size_t>(M) != deltas.size()) {
            throw std::invalid_argument("potential: M must equal the number of delta points");
        }
    }
};

/// v and its first derivatives at a point.
struct PotentialValue
{
    cplx v, dv, d2v;
};

/// Numeric evaluation of a potential on a fixed lattice.
class NumericPotential
{
public:
    NumericPotential(const PotentialSpec &spec, const Lattice &lat) : spec_(spec), wf_(lat)
    {
        spec_.validate();
    }

    PotentialValue operator()(cplx x) const
    {
        PotentialValue out{0.0, 0.0, 0.0};
        const Lattice &lat = wf_.lattice();
        for (int i = 0; i < 4; ++i) {
            const int li = spec_.l[static_cast<std::size_t>(i)];
            if (li == 0) {
                continue;
            }
            add(out, static_cast<double>(li * (li + 1)), x + lat.half_period(i));
        }
        for (const cplx d : spec_.deltas) {
            add(out, 2.0, x - d);
            add(out, 2.0, x + d);
        }
        return out;
    }

    cplx v(cplx x) const { return (*this)(x).v; }

    const PotentialSpec &spec() const noexcept { return spec_; }
    const Weierstrass &weierstrass() const noexcept { return wf_; }
    const Lattice &lattice() const noexcept { return wf_.lattice(); }

private:
    void add(PotentialValue &out, double c, cplx y) const
    {
        const cplx p = wf_.wp(y);
        out.v += c * p;
        out.dv += c * wf_.wp_prime(y);
        out.d2v += c * (6.0 * p * p - wf_.lattice().g2 / 2.0);
    }

    PotentialSpec spec_;
    Weierstrass wf_;
};

} // namespace heungap

#endif
