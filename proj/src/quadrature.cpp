#include "gibbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gibbs {

namespace {

struct Leaf {
    double a, b, fa, fm, fb;
    double fl, fr;  // quarter-point values, reused by the children
    double value;  // two-panel Simpson plus Richardson correction
    double err;

    bool operator<(const Leaf& o) const { return err < o.err; }
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  double abs_tol, int max_panels)
{
    QuadratureResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }

    auto make_leaf = [&](double la, double lb, double fa, double fm, double fb) {
        const double m = 0.5 * (la + lb);
        const double fl = f(0.5 * (la + m));
        const double fr = f(0.5 * (m + lb));
        const double coarse = simpson(la, lb, fa, fm, fb);
        const double fine = simpson(la, m, fa, fl, fm) + simpson(m, lb, fm, fr, fb);
        return Leaf{la, lb, fa, fm, fb, fl, fr, fine + (fine - coarse) / 15.0, std::abs(fine - coarse) / 15.0};
    };

    // Global refinement: split the leaf with the largest error estimate until
    // the summed estimate meets the tolerance.
    std::priority_queue<Leaf> heap;
    heap.push(make_leaf(a, b, f(a), f(0.5 * (a + b)), f(b)));
    double total = heap.top().value;
    double err = heap.top().err;
    int panels = 1;
    auto done = [&] { return err <= std::max(rel_tol * std::abs(total), abs_tol) || err == 0.0; };
    while (!done() && panels < max_panels) {
        const Leaf worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        const Leaf left = make_leaf(worst.a, m, worst.fa, worst.fl, worst.fm);
        const Leaf right = make_leaf(m, worst.b, worst.fm, worst.fr, worst.fb);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    // Re-sum from the leaves to drop drift from the incremental updates.
    double sum = 0.0, esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().err;
        heap.pop();
    }
    res.value = sum;
    res.error_estimate = esum;
    res.panels = panels;
    res.converged = esum <= std::max(rel_tol * std::abs(sum), abs_tol) || esum == 0.0;
    return res;
}

}  // namespace gibbs
