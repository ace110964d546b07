#pragma once

#include <functional>

#include "dcm/body.hpp"
#include "dcm/log_concave.hpp"

namespace dcm {

// omega_q(x) = |x|^{q-n}, plus a Gaussian weight behind the same interface.
struct Weight {
    enum class Kind { Power, Gaussian };
    Kind kind = Kind::Power;
    double q = 1.0;

    static Weight power(double q_);
    static Weight gaussian();

    double omega(const Vec& x, int dim) const;
    bool singular_at_origin(int dim) const {
        return kind == Kind::Power && q < dim;
    }
};

struct QuadratureSpec {
    int cells_per_axis = 128;
    double rho0 = -1.0;  // polar-patch radius; < 0 means 2 * cell spacing
    int patch_radial = 16;
    int patch_angular = 128;  // n = 2
    int patch_polar = 16;     // n = 3
    int patch_azimuth = 32;
    double box_radius = -1.0;  // < 0 means derive from f
    SphereQuadSpec sphere;
    int coarea_levels = 200;
};

// One node of the weighted volume quadrature; `w` integrates omega(x) dx, so
// that sum of w * g(x) approximates the weighted integral of g.
struct QuadNode {
    Vec x;
    double w;
};

// Deterministic node set for the box [-R, R]^n: midpoint cells away from the
// origin, a polar patch (radial rule exact for r^{q-1}) over B(rho0), and a
// recursive split for cells straddling the patch boundary.
std::vector<QuadNode> weighted_nodes(int dim, double box_radius, const Weight& w,
                                     const QuadratureSpec& spec);

// integral over [-R, R]^n of g(x) * omega(x) dx over the node set above.
double weighted_integral(int dim, double box_radius,
                         const std::function<double(const Vec&)>& g,
                         const Weight& w, const QuadratureSpec& spec);

// Box radius used by moment() for a given f (explicit spec override or the
// support/decay-derived default).
double moment_box_radius(const LogConcaveFunction& f, const QuadratureSpec& spec);

double moment(const LogConcaveFunction& f, const Weight& w, const QuadratureSpec& spec);
double moment_of_conjugate(const ConvexFunctionRep& phi, const Weight& w,
                           const QuadratureSpec& spec);

struct TvResult {
    double bulk;
    double boundary;
    double total;
};

// TV_{L,omega}(f) via the structure decomposition: bulk gradient term plus
// the weighted boundary term over the support.
TvResult weighted_tv(const LogConcaveFunction& f, const ConvexBody& L,
                     const Weight& w, const QuadratureSpec& spec);

// Independent coarea route: integral over s of V1q([f >= s], L).
double coarea_tv(const LogConcaveFunction& f, const ConvexBody& L, const Weight& w,
                 const QuadratureSpec& spec);

// liminf phi(x)/|x| > 0 proxy on the boundary ring; gate for moment
// finiteness.
bool growth_check(const ConvexFunctionRep& phi, double threshold = 1e-6);

struct PairResult {
    double lhs;
    double rhs;
};

PairResult prekopa_leindler_check(const LogConcaveFunction& f,
                                  const LogConcaveFunction& g, double lambda,
                                  const QuadratureSpec& spec);

PairResult derivative_control_check(const LogConcaveFunction& f, double t0,
                                    const QuadratureSpec& spec);

} // namespace dcm
