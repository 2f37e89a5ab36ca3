#pragma once

#include "errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace bhflow::roots {

// Root of f on [a, b] given a sign change; TOMS 748 down to a few ulps.
template <class F>
double bracketed(F&& f, double a, double b, double fa, double fb, const char* what)
{
    if (fa == 0)
        return a;
    if (fb == 0)
        return b;
    if ((fa > 0) == (fb > 0))
        throw numerical_error(std::string(what) + ": interval does not bracket a root");
    std::uintmax_t iters = 200;
    auto tol = [](double x, double y) { return std::abs(x - y) <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), std::abs(y)) || std::abs(x - y) < 1e-300; };
    auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    if (iters >= 200)
        throw numerical_error(std::string(what) + ": no convergence after 200 iterations");
    const double x = res.first, y = res.second;
    if (x == y)
        return x;
    const double fx = f(x), fy = f(y);
    return std::abs(fx) <= std::abs(fy) ? x : y;
}

template <class F>
double bracketed(F&& f, double a, double b, const char* what)
{
    return bracketed(f, a, b, f(a), f(b), what);
}

// Move `far` away from `near` (geometric steps in the offset) until f changes sign.
// Returns the bracket {near', far'} with f(near') and f(far') of opposite sign.
template <class F>
std::pair<double, double> expand(F&& f, double near, double step, double limit, const char* what)
{
    const double f0 = f(near);
    if (f0 == 0)
        return {near, near};
    double lo = near, x = near + step;
    for (int i = 0; i < 200; ++i) {
        if ((step > 0 && x >= limit) || (step < 0 && x <= limit))
            x = limit;
        const double fx = f(x);
        if ((fx > 0) != (f0 > 0) || fx == 0)
            return {lo, x};
        if (x == limit)
            break;
        lo = x;
        step *= 2;
        x = near + step;
    }
    throw numerical_error(std::string(what) + ": could not bracket a sign change");
}

} // namespace bhflow::roots
