#pragma once

namespace lawvar {

/// Central tolerance configuration for the whole toolkit.
///
/// Every numeric check takes a `Tolerances` record (defaulted) instead of
/// scattering magic constants.  Fields ending in `_rel` are multiplied by a
/// problem-dependent scale, typically `1 + max|values|`.
struct Tolerances {
    double law = 0.0;                  // same-law comparison (exact by default)
    double constant = 0.0;             // is_constant default
    double rank_rel = 1e-9;            // pivot threshold, relative to largest pivot
    double zero_mean_rel = 1e-12;      // orbit zero-mean detection
    double collapse_mean_rel = 1e-10;  // collapse branch selection on E[Z]
    double affine_rel = 1e-8;          // affinity residual on the m-grid
    double membership_rel = 1e-9;      // span / dual-set membership
    double check = 1e-10;              // generic randomized property checks
    double exact = 1e-12;              // identities expected at fp accuracy
    double comonotone = 1e-10;         // comonotonic additivity
    double subadditive = 1e-10;        // subadditivity of Choquet integrals
    double s_additive = 1e-8;          // asset-additivity identity
    double weak_duality = 1e-12;       // conjugate inequality slack
    double bisection = 1e-10;          // capital-requirement root accuracy
    double divergence_threshold = 1e8; // objective level certifying +inf
    int ray_doublings = 60;            // max doublings along a divergence ray
};

}  // namespace lawvar
