#pragma once

#include <vector>

#include "dcm/measure.hpp"
#include "dcm/variation.hpp"

namespace dcm {

// Pushforward of omega_q(x) f(x) dx under the gradient map: one atom per
// quadrature node at y = grad phi(x).  Total mass matches moment(f, w).
EuclideanMeasure euclidean_dcm(const LogConcaveFunction& f, const Weight& w,
                               const QuadratureSpec& spec);

// Weighted boundary measure omega_q f dH^{n-1} on the support boundary,
// pushed to the sphere by the normal map; empty for unbounded supports.
SphericalMeasure spherical_dcm(const LogConcaveFunction& f, const Weight& w,
                               const QuadratureSpec& spec = QuadratureSpec{});

struct HypothesisFlags {
    bool max_at_origin = false;
    double shell_ratio_early = 0.0;  // dyadic shells near the origin,
    double shell_ratio_late = 0.0;   // |f - f(o)| / |x|^{1+alpha}, alpha = 1/2
    bool shell_ok = false;
    double level_rr_max = 0.0;  // max R/r over sampled near-max level sets
    bool level_rr_ok = false;
    bool ok() const { return max_at_origin && (shell_ok || level_rr_ok); }
};

HypothesisFlags check_variational_hypotheses(const LogConcaveFunction& f);

struct VariationalQuotients {
    std::vector<double> ts;
    std::vector<double> quotients;
    double extrapolated = 0.0;
    HypothesisFlags flags;
};

// One-sided difference quotients of t -> moment(f (+) t.g) with first-order
// Richardson extrapolation toward t = 0+.
VariationalQuotients variational_lhs(const LogConcaveFunction& f,
                                     const LogConcaveFunction& g, const Weight& w,
                                     const std::vector<double>& ts,
                                     const QuadratureSpec& spec);

// Two-term right side: integral of psi* against the Euclidean measure plus
// the support-function term against the spherical measure.
double variational_rhs(const LogConcaveFunction& f, const LogConcaveFunction& g,
                       const Weight& w, const QuadratureSpec& spec);

// Third route: integral over s of V1q([f >= s], L).
double layer_cake_delta(const LogConcaveFunction& f, const ConvexBody& L,
                        const Weight& w, const QuadratureSpec& spec);

// lhs = first moment of the Euclidean measure, rhs = integral of
// |grad f| omega_q.
PairResult first_moment_identity(const LogConcaveFunction& f, const Weight& w,
                                 const QuadratureSpec& spec);

} // namespace dcm
