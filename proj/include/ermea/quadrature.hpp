// quadrature.hpp: Globally adaptive Gauss-Kronrod driver with an absolute tolerance

#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ermea {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = true;
    double roundoff_error = 0.0; // part of `error` from pieces that stopped improving under bisection
};

// Boost's recursive driver only supports a relative tolerance, which never terminates
// early for integrals that cancel to ~0; this keeps a heap of subintervals instead.
template <class F>
QuadResult integrate_adaptive(F&& f, std::vector<double> breaks, double abs_tol, double rel_tol = 0.0,
                              int max_intervals = 4000)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Piece {
        double a, b, value, error;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto eval = [&](double a, double b) {
        double err = 0.0;
        const double v = GK::integrate(f, a, b, 0, 0.0, &err);
        // Boost reports the estimate for the integrand mapped onto [-1, 1]
        return Piece{a, b, v, 0.5 * (b - a) * err};
    };

    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    QuadResult res;
    if (breaks.size() < 2) return res;

    std::priority_queue<Piece> heap;
    std::vector<Piece> frozen;
    double total = 0.0, err = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        if (!(breaks[k + 1] > breaks[k])) continue;
        Piece p = eval(breaks[k], breaks[k + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (!heap.empty() && err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (count >= max_intervals) {
            res.converged = false;
            break;
        }
        Piece p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            frozen.push_back(p);
            err -= p.error;
            continue;
        }
        Piece l = eval(p.a, mid), r = eval(mid, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        ++count;
        // no gain from bisection at a relative error near machine noise: stop refining here
        if (l.error + r.error >= 0.5 * p.error && p.error <= 1e-7 * (std::abs(l.value) + std::abs(r.value))) {
            frozen.push_back(l);
            frozen.push_back(r);
            err -= l.error + r.error;
            continue;
        }
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed the drift of incremental updates
    double sum = 0.0, esum = 0.0, fsum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    for (const auto& p : frozen) {
        sum += p.value;
        fsum += p.error;
    }
    res.value = sum;
    res.error = esum + fsum;
    res.roundoff_error = fsum;
    res.intervals = count;
    if (esum > std::max(abs_tol, rel_tol * std::abs(sum))) res.converged = false;
    return res;
}

} // namespace ermea
