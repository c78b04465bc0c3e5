#pragma once

#include "lawvar/space.hpp"

namespace lawvar {

/// Endpoints of the set { E[X'Y] : X' equal in law to X }.
///
/// On a uniform n-atom space the set is a finite union of points whose
/// minimum pairs the order statistics of X and Y in opposite order and
/// whose maximum pairs them in the same order:
///   lo = (1/n) sum_i x_(i) y_(n+1-i),   hi = (1/n) sum_i x_(i) y_(i).
struct RearrangementBounds {
    double lo;
    double hi;
};

/// The quantile function of a variable on uniform atoms: its ascending
/// order statistics, each carrying probability weight 1/n.  Evaluation
/// uses the lower (left-continuous) convention, fixed everywhere so
/// integral formulas reproduce bit-for-bit across runs.
class QuantileFunction {
  public:
    explicit QuantileFunction(const RandomVariable& x);

    /// sorted[ceil(alpha * n)] (1-indexed) = inf{ m : P(X <= m) >= alpha }.
    double operator()(double alpha) const;
    const std::vector<double>& sorted() const { return sorted_; }
    double step_weight() const { return 1.0 / static_cast<double>(sorted_.size()); }

  private:
    std::vector<double> sorted_;
};

/// Lower quantile of X at level alpha in (0,1).
double quantile(const RandomVariable& x, double alpha);

/// Both endpoint sums accumulate their product multisets in sorted order,
/// so rearrangement_bounds(x, y) == rearrangement_bounds(y, x) bitwise.
RearrangementBounds rearrangement_bounds(const RandomVariable& x, const RandomVariable& y);

/// True iff hi - lo <= tol; with tol = 0 on exact inputs this holds iff
/// X or Y is constant.
bool interval_is_singleton(const RandomVariable& x, const RandomVariable& y, double tol = 0.0);

/// The rearrangement Y' of Y similarly ordered to X, attaining
/// E[XY'] = hi.  Ties in X are broken by atom index (stable order).
RandomVariable comonotone_rearrangement(const RandomVariable& x, const RandomVariable& y);

}  // namespace lawvar
