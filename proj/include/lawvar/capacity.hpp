#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lawvar/rng.hpp"
#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"
#include "lawvar/verdict.hpp"

namespace lawvar {

/// Piecewise-linear distortion g: [0,1] -> [0,1] through knots (u, g(u)),
/// with g(0) = 0, g(1) = 1 and g nondecreasing.  Composing with the atom
/// probability yields a capacity c = g(P(.)) that depends on subsets only
/// through their cardinality.  Concave knots (nonincreasing slopes) certify
/// submodularity of that capacity for any atom count.
class DistortionFunction {
  public:
    explicit DistortionFunction(std::vector<std::pair<double, double>> knots);

    static DistortionFunction identity();

    double operator()(double u) const;
    bool is_concave(double tol = 1e-12) const;
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  private:
    std::vector<std::pair<double, double>> knots_;
};

void to_json(nlohmann::json& j, const DistortionFunction& g);
DistortionFunction distortion_from_json(const nlohmann::json& j);

/// A normalized monotone set function on the subsets of n atoms, stored as
/// an explicit table of 2^n values indexed by bitmask.  Construction
/// validates c(empty) = 0, c(full) = 1 and monotonicity under inclusion;
/// continuity along decreasing sequences is vacuous on finite spaces and
/// not represented.  The table is shared, so copies are cheap and
/// capacities are immutable.
class Capacity {
  public:
    Capacity(int n, std::vector<double> table);

    int n() const { return n_; }
    std::uint32_t full_mask() const { return (std::uint32_t{1} << n_) - 1; }
    double operator()(std::uint32_t mask) const { return (*table_)[mask]; }

    /// True iff the table depends on subsets only through cardinality,
    /// which is exactly law invariance of the induced Choquet integral.
    bool is_cardinality_based(double tol = 0.0) const;

  private:
    int n_;
    std::shared_ptr<const std::vector<double>> table_;
};

void to_json(nlohmann::json& j, const Capacity& c);
Capacity capacity_from_json(const nlohmann::json& j);

/// Tabulates c(E) = g(|E|/n).  Limited to n <= 20; larger spaces should
/// evaluate the Choquet integral through the distortion form, which never
/// materializes the table.
Capacity capacity_from_distortion(const DistortionFunction& g, const SampleSpace& space);

/// Exhaustive check of c(E u F) + c(E n F) <= c(E) + c(F) over all subset
/// pairs (O(4^n), limited to n <= 14).  Fails with the violating pair as
/// witness.
Verdict is_submodular(const Capacity& c, const Tolerances& tol = Tolerances{});

/// Choquet integral by the telescoping sum over descending order statistics
///   sum_k (x_[k] - x_[k+1]) c(top-k atoms),  x_[n+1] := 0,
/// which reproduces the two-integral level-set definition for signed X and
/// is insensitive to tie order.
double choquet_integral(const Capacity& c, const RandomVariable& x);

/// Same integral for a distortion capacity, using c(top-k) = g(k/n);
/// works for any atom count.
double choquet_integral(const DistortionFunction& g, const RandomVariable& x);

/// Samples comonotone pairs (u(T), v(T)) with random T and random
/// nondecreasing piecewise-linear u, v, and checks additivity of the
/// integral on every pair.
Verdict comonotonic_additivity_check(const Capacity& c, int trials, std::uint64_t seed,
                                     const Tolerances& tol = Tolerances{});
Verdict comonotonic_additivity_check(const DistortionFunction& g, const SampleSpace& space,
                                     int trials, std::uint64_t seed,
                                     const Tolerances& tol = Tolerances{});

}  // namespace lawvar
