#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcm/dual_curvature.hpp"
#include "dcm/measure.hpp"

namespace dcm {

// Prescribed even measure for the functional dual Minkowski problem.
struct PrescribedMeasure {
    EuclideanMeasure mu;
    double total = 0.0;
    double first_moment = 0.0;

    static PrescribedMeasure from_measure(EuclideanMeasure m);
    PrescribedMeasure scaled(double c) const;
};

struct AdmissibilityReport {
    bool nonzero = false;
    bool even = false;
    bool not_concentrated = false;
    double min_eigenvalue = 0.0;
    double eigen_threshold = 0.0;
    double first_moment = 0.0;
    std::vector<std::string> rejections;

    bool ok() const { return nonzero && even && not_concentrated; }
};

AdmissibilityReport check_admissible(const PrescribedMeasure& mu);

struct SolverConfig {
    GridSpec primal{2, 8.0, 65};   // grid for the unknown chi
    GridSpec dual{2, 8.0, 129};    // grid for chi*
    double A = -1.0;               // <= 0 selects choose_A
    int max_iters = 500;
    double step0 = 4.0;
    double backtrack = 0.5;
    double armijo = 1e-4;
    int max_backtracks = 30;
    double tol_rel = 0.05;  // residual tolerance as a fraction of |mu|
    std::uint64_t seed = 0;
    int dict_bumps = 8;
    QuadratureSpec quad;  // box/cells are overridden from `dual`
};

struct ObjectiveValue {
    double J = 0.0;
    double constraint = 0.0;  // V_q(e^{-chi*})
    std::vector<double> gradient;
    std::vector<double> mass;  // nodal scatter of mu + pushforward
    EuclideanMeasure pushforward;  // C^e_q(e^{-chi*}; .)
};

// J(chi) = int chi dmu - |mu| log V_q(e^{-chi*}) with its nodal gradient.
ObjectiveValue objective(const GridFn& chi, const PrescribedMeasure& mu,
                         const Weight& w, const SolverConfig& config);

struct SolverReport {
    bool converged = false;
    int iterations = 0;
    double A = 0.0;
    double scale = 0.0;  // |mu| / A
    double residual = std::numeric_limits<double>::infinity();
    double gradient_norm = 0.0;
    std::vector<double> J_trace;
    std::vector<double> constraint_trace;
    std::vector<double> residual_trace;
    GridFn chi0;
    GridFn phi0_star;
    AdmissibilityReport admissibility;
    HypothesisFlags solution_flags;  // checked on the produced f0
    std::string chose_A_note;
};

SolverReport solve(const PrescribedMeasure& mu, const Weight& w,
                   const SolverConfig& config);

// Geometric search over A in {2^k}: smallest A whose short trial run keeps
// chi(o) >= 0.1.  Heuristic; the constants behind "sufficiently large A" are
// not constructive.
double choose_A(const PrescribedMeasure& mu, const Weight& w,
                const SolverConfig& config, std::string* note = nullptr);

} // namespace dcm
