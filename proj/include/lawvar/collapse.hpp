#pragma once

#include <vector>

#include "lawvar/capacity.hpp"
#include "lawvar/duality.hpp"
#include "lawvar/functional.hpp"
#include "lawvar/rng.hpp"
#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"
#include "lawvar/verdict.hpp"

namespace lawvar {

/// One mixed-law test point (small integers, uniform, normal, scaled
/// indicator), deterministic from the generator state.
RandomVariable sample_test_point(CounterRng& rng, const SampleSpace& space);

std::vector<int> random_permutation(CounterRng& rng, int n);

/// Nonconstant scan directions: indicators and two-point differences.
/// All of them when the counts stay below `cap`; otherwise one
/// representative per cardinality resp. per offset, which exhausts the
/// possible laws and therefore loses nothing against law-invariant
/// functionals.
std::vector<RandomVariable> structured_directions(const SampleSpace& space,
                                                  std::size_t cap = 4096);

/// phi(X) == phi(sigma X) on structured indicator/transposition pairs and
/// random (X, sigma) draws.
Verdict check_law_invariance(const Functional& phi, const SampleSpace& space, int trials,
                             std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// phi(l X + (1-l) Y) <= l phi(X) + (1-l) phi(Y) over random pairs and a
/// lambda grid; mirrored pairs (X, -X) are probed first.
Verdict check_convexity(const Functional& phi, const SampleSpace& space, int trials,
                        std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// Fits the slope a along Z, then checks phi(X + mZ) = phi(X) + a m over
/// the functional's domain probes and random X.  Refused when phi is not
/// even affine along Z.
Verdict check_translation_invariance_along(const Functional& phi, const RandomVariable& z,
                                           int trials, std::uint64_t seed,
                                           const Tolerances& tol = Tolerances{});

/// For sublinear phi that is affine along every element of S, translation
/// invariance along span(S) must follow; a violation is reported as
/// Inconsistent, not Fail.  Positive homogeneity and subadditivity are
/// spot-checked first and refusal is raised if they fail.
Verdict check_sublinear_upgrade(const Functional& phi, const std::vector<RandomVariable>& s,
                                int trials, std::uint64_t seed,
                                const Tolerances& tol = Tolerances{});

/// The main classification.  For claimed convex law-invariant phi and
/// nonconstant Z:
///   - not affine along Z                 -> NoAffineDirection
///   - affine, E[Z] != 0                  -> verify phi = a E[.] + phi(0):
///                                            CollapseToMean(a) or Inconsistent
///   - affine, E[Z] == 0                  -> verify phi = phi(E[.]):
///                                            CollapseThroughMean (upgraded to
///                                            CollapseToMean when additionally
///                                            translation invariant along 1)
/// With `require_ti_along_one`, translation invariance along constants is
/// made a precondition and its absence refuses the check.
Verdict collapse_verdict(const Functional& phi, const RandomVariable& z, int trials,
                         std::uint64_t seed, const Tolerances& tol = Tolerances{},
                         bool require_ti_along_one = false);

/// Searches nonconstant directions for a zero bid-ask spread of the Choquet
/// integral.  A witness forces c = P (checked subset by subset, or knot by
/// knot for distortions): Pass if so, Inconsistent otherwise.  No witness
/// over the whole scan reports NoAffineDirection with the minimum spread.
Verdict choquet_collapse_scan(const Capacity& c, int trials, std::uint64_t seed,
                              const Tolerances& tol = Tolerances{});
Verdict choquet_collapse_scan(const DistortionFunction& g, const SampleSpace& space, int trials,
                              std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// If the risky payoff Z is frictionless under the claimed convex
/// law-invariant pricing rule, prices must collapse to a multiple of the
/// expectation and every payoff becomes frictionless.
Verdict pricing_collapse(const Functional& pi, const RandomVariable& z, int trials,
                         std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// For a claimed convex law-invariant functional that is S-additive in a
/// risky eligible asset, verifies rho(X) = (S0/E[S1]) E[-X] + rho(0); a
/// claimed cash-additive rho additionally forces E[S1] = S0.
Verdict risk_collapse(const Functional& rho, const EligibleAsset& asset, int trials,
                      std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// Either rho coincides with E[-.] (alternative 1) or it must be strongly
/// relevant (alternative 2, checked by falsification).  Requires claimed
/// sublinear, law-invariant, cash-additive rho; spot-check failures refuse
/// with the evaluation at -1 attached as a note.
Verdict relevance_dichotomy(const Functional& rho, const SampleSpace& space, int trials,
                            std::uint64_t seed, const Tolerances& tol = Tolerances{});

}  // namespace lawvar
