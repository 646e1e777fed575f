#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace horizon {

struct Minimum {
    double x;
    double fx;
    std::size_t evaluations;
};

// Golden-section search for a unimodal f on [lo, hi]; stops when the bracket
// is narrower than `tol`. Only interior points are evaluated.
template <typename F>
Minimum golden_section_minimize(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = std::numbers::phi - 1.0;  // 0.618...
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    std::size_t evals = 2;
    while (std::abs(b - a) > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return fc <= fd ? Minimum{c, fc, evals} : Minimum{d, fd, evals};
}

}  // namespace horizon
