#include "lawvar/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lawvar {

namespace {

void require_same_space(const RandomVariable& x, const RandomVariable& y) {
    if (x.space() != y.space()) throw std::invalid_argument("space mismatch");
}

double sorted_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double e : v) s += e;
    return s;
}

}  // namespace

QuantileFunction::QuantileFunction(const RandomVariable& x) : sorted_(x.values()) {
    std::sort(sorted_.begin(), sorted_.end());
}

double QuantileFunction::operator()(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
    int n = static_cast<int>(sorted_.size());
    auto k = static_cast<int>(std::ceil(alpha * n));  // 1-indexed level
    k = std::clamp(k, 1, n);
    return sorted_[k - 1];
}

double quantile(const RandomVariable& x, double alpha) { return QuantileFunction(x)(alpha); }

RearrangementBounds rearrangement_bounds(const RandomVariable& x, const RandomVariable& y) {
    require_same_space(x, y);
    std::vector<double> xs(x.values()), ys(y.values());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    int n = x.size();
    std::vector<double> same(n), opposite(n);
    for (int i = 0; i < n; ++i) {
        same[i] = xs[i] * ys[i];
        opposite[i] = xs[i] * ys[n - 1 - i];
    }
    return RearrangementBounds{sorted_sum(std::move(opposite)) / n,
                               sorted_sum(std::move(same)) / n};
}

bool interval_is_singleton(const RandomVariable& x, const RandomVariable& y, double tol) {
    if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
    auto [lo, hi] = rearrangement_bounds(x, y);
    return hi - lo <= tol;
}

RandomVariable comonotone_rearrangement(const RandomVariable& x, const RandomVariable& y) {
    require_same_space(x, y);
    int n = x.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
    std::vector<double> ys(y.values());
    std::sort(ys.begin(), ys.end());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[order[i]] = ys[i];
    return RandomVariable(x.space(), std::move(out));
}

}  // namespace lawvar
