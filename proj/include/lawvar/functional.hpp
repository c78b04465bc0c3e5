#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lawvar/capacity.hpp"
#include "lawvar/rng.hpp"
#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"
#include "lawvar/verdict.hpp"

namespace lawvar {

/// The one admissible infinite value.  Evaluators may return +infinity but
/// never -infinity or NaN; addition absorbs it and positive scaling keeps it.
inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

/// Sign convention for translation along constants, recorded explicitly:
/// risk measures satisfy rho(X + m) = rho(X) - m, pricing rules satisfy
/// pi(X + m) = pi(X) + m.
enum class TranslationConvention { None, Risk, Pricing };

/// Structural claims attached to a functional.  Claims are assertions to be
/// verified by the check engine, never trusted facts.
struct Claims {
    bool convex = false;
    bool law_invariant = false;
    bool cash_additive = false;
    bool sublinear = false;
    bool decreasing = false;
    bool increasing = false;
    TranslationConvention convention = TranslationConvention::None;
};

struct MeanAffineForm {
    double a, b;
};
struct ShortfallForm {
    double alpha;
};
struct EntropicForm {
    double theta;
};
struct ChoquetTableForm {
    Capacity capacity;
    bool submodular;
};
struct ChoquetDistortionForm {
    DistortionFunction distortion;
    int n;
    bool concave;
};

/// Closed-form payload used by the conjugation module; monostate for
/// functionals whose conjugate is only available numerically.
using ClosedForm = std::variant<std::monostate, MeanAffineForm, ShortfallForm, EntropicForm,
                                ChoquetTableForm, ChoquetDistortionForm>;

/// An extended-real-valued map on random variables together with its
/// declared structural claims.  Immutable closure over immutable data;
/// evaluation is pure and reentrant.
class Functional {
  public:
    using Evaluator = std::function<double(const RandomVariable&)>;

    Functional(std::string label, Evaluator evaluator, Claims claims,
               ClosedForm form = std::monostate{});

    /// Evaluates and guards the extended-real contract (finite or +inf).
    double operator()(const RandomVariable& x) const;

    const std::string& label() const { return label_; }
    const Claims& claims() const { return claims_; }
    const ClosedForm& closed_form() const { return form_; }

    /// Points known to lie in the (possibly small) effective domain, used to
    /// seed randomized checks that would otherwise never sample it.
    const std::vector<RandomVariable>& domain_probes() const { return probes_; }
    void add_domain_probe(RandomVariable probe) { probes_.push_back(std::move(probe)); }

    /// Nonempty when construction noticed a degenerate configuration.
    const std::string& warning() const { return warning_; }
    void set_warning(std::string warning) { warning_ = std::move(warning); }

    Functional with_claims(Claims claims) const;
    Functional with_label(std::string label) const;

  private:
    std::string label_;
    Evaluator eval_;
    Claims claims_;
    ClosedForm form_;
    std::vector<RandomVariable> probes_;
    std::string warning_;
};

/// The traded instrument in which capital is raised: strictly positive
/// price S0 and nonzero nonnegative payoff S1.  Risky when S1 is nonconstant.
struct EligibleAsset {
    EligibleAsset(double price, RandomVariable payoff);

    double price;
    RandomVariable payoff;

    bool risky() const { return !is_constant(payoff, 0.0); }
};

/// X |-> a E[X] + b.
Functional make_mean_affine(double a, double b);

/// Negated average of the worst alpha-tail: the average of the ceil(alpha n)
/// smallest values with fractional weight on the top one, negated.
/// alpha = 1 gives -E[X].
Functional make_expected_shortfall(double alpha);

/// rho(X) = (1/theta) log E[exp(-theta X)], evaluated in log-sum-exp form.
Functional make_entropic(double theta);

/// Choquet integral as a functional: increasing, translation along
/// constants in the pricing convention, law invariant when the capacity
/// depends on cardinality only, sublinear when submodular.
Functional make_choquet(Capacity c);
Functional make_choquet(DistortionFunction g, SampleSpace space);

/// Convex functional finite exactly on the half-plane { aW + bZ : a <= 1 }
/// of span{W, Z}: zero below the level a = 1, b^2 on it, +inf elsewhere.
/// Affine along Z with slope zero yet not translation invariant along Z.
/// Requires linearly independent W, Z; warns when n = 2 leaves the
/// infinite branch empty.
Functional make_span_parabola(RandomVariable w, RandomVariable z,
                              const Tolerances& tol = Tolerances{});

/// Capital requirement rho(X) = inf{ m : E[min(X + m, 0)] >= -1 }: the
/// least cash making the expected shortfall below zero at most one unit.
/// Computed exactly by inverting the concave piecewise-linear map
/// m |-> E[min(X + m, 0)].
Functional make_shortfall_budget();

/// Capital requirement in a general eligible asset: the acceptance boundary
/// inf{ m : base(X + (m/S0) S1) <= 0 }, located by bisection with an
/// auto-expanding bracket.  Satisfies rho(X + m S1) = rho(X) - m S0 by
/// construction.
Functional make_s_additive(Functional base, EligibleAsset asset,
                           std::pair<double, double> bracket = {-1e6, 1e6},
                           const Tolerances& tol = Tolerances{});

inline constexpr double kDefaultLambdaGrid[] = {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0};

/// Zero bid-ask spread and volume-independent unit price along X:
/// pi(lambda X) = lambda pi(X) on a grid that must include negative
/// lambdas.  Requires pi(0) = 0.
Verdict is_frictionless(const Functional& pi, const RandomVariable& x,
                        std::span<const double> lambda_grid = kDefaultLambdaGrid,
                        double tol = 1e-10);

/// Randomized falsifiers for the relevance properties.  A Pass records
/// "no counterexample found in N trials", never a proof.
Verdict is_relevant(const Functional& rho, const SampleSpace& space, int trials,
                    std::uint64_t seed, const Tolerances& tol = Tolerances{});
Verdict is_strongly_relevant(const Functional& rho, const SampleSpace& space, int trials,
                             std::uint64_t seed, const Tolerances& tol = Tolerances{});

/// Builds a functional from its JSON description, e.g.
///   {"kind": "expected_shortfall", "alpha": 0.1}
///   {"kind": "entropic", "theta": 1.0}
///   {"kind": "choquet", "distortion": {"knots": [[0,0],[1,1]]}}
///   {"kind": "mean_affine", "a": -1, "b": 0}
///   {"kind": "final_remark_rho"}
///   {"kind": "example_3_3", "W": [...], "Z": [...]}
///   {"kind": "s_additive", "base": {...}, "S0": 2, "S1": [...]}
Functional functional_from_spec(const nlohmann::json& spec, const SampleSpace& space,
                                const Tolerances& tol = Tolerances{});

}  // namespace lawvar
