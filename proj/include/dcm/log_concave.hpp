#pragma once

#include <memory>
#include <optional>

#include "dcm/body.hpp"
#include "dcm/convex_fn.hpp"

namespace dcm {

// f = e^{-phi} with an explicit support descriptor (the closure of
// {phi < inf}, up to one grid spacing for grid reps).
class LogConcaveFunction {
public:
    ConvexFunctionRep phi;
    std::optional<ConvexBody> support;  // nullopt marks unbounded support
    Vec max_location;

    static LogConcaveFunction from_phi(ConvexFunctionRep phi);
    static LogConcaveFunction from_phi(ConvexFunctionRep phi,
                                       std::optional<ConvexBody> support);

    double value(const Vec& x) const { return exp_neg(phi.evaluate(x)); }
    double max_value() const { return exp_neg(phi.evaluate(max_location)); }
    int dim() const { return phi.dim; }
    bool even() const { return phi.even; }
};

// Grid container used when a sup-convolution falls back to the sweep route.
struct SupConvolveGrids {
    GridSpec primal;
    GridSpec dual;
};

// f (+) t.g = e^{-(phi* + t psi*)*}.  Catalog pairs (indicator/indicator with
// summable bodies, quadratic/quadratic) stay closed-form; everything else
// routes through conjugates on work grids.
LogConcaveFunction sup_convolve(const LogConcaveFunction& f,
                                const LogConcaveFunction& g, double t,
                                const SupConvolveGrids* work = nullptr);

// Weighted two-term combination (1-lambda).f (+) lambda.g used by the
// Prekopa-Leindler check.
LogConcaveFunction sup_combination(const LogConcaveFunction& f,
                                   const LogConcaveFunction& g, double lambda,
                                   const SupConvolveGrids* work = nullptr);

// True when sup_convolve(f, g, .) stays on a closed-form catalog path.
bool sup_convolve_is_closed_form(const LogConcaveFunction& f,
                                 const LogConcaveFunction& g);

// Grid-route sup-convolution on pinned work grids, valid for t >= 0 when g
// is compactly supported (psi* finite).  Difference quotients in t must use
// one pipeline for every t so that discretization bias cancels.
LogConcaveFunction sup_convolve_on_grids(const LogConcaveFunction& f,
                                         const LogConcaveFunction& g, double t,
                                         const SupConvolveGrids& work);

// Superlevel set [f >= s] for 0 < s < max f; exact for catalog shapes,
// marching-front crossings + hull for grids.
ConvexBody level_set(const LogConcaveFunction& f, double s);

// Default work grids for the grid route of sup_convolve.
SupConvolveGrids default_work_grids(const LogConcaveFunction& f,
                                    const LogConcaveFunction& g, double t);

} // namespace dcm
