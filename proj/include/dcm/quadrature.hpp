#pragma once

#include <functional>
#include <vector>

#include "dcm/geometry.hpp"

namespace dcm {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence).
QuadRule gauss_legendre(int n);
// Same rule mapped to [a, b].
QuadRule gauss_legendre_ab(int n, double a, double b);

struct SphereNode {
    Vec u;
    double weight;  // surface weight on S^{n-1}
};

// Product quadrature nodes covering S^{n-1}: two points (n=1), uniform
// midpoint angles (n=2), Gauss-Legendre in cos(theta) x uniform azimuth (n=3).
// Weights are positive and sum to |S^{n-1}| up to rounding.
std::vector<SphereNode> sphere_nodes(int dim, int n2_angles, int n3_polar,
                                     int n3_azimuth);

// Deterministic chunked sum of fn over the nodes.
double sphere_sum(const std::vector<SphereNode>& nodes,
                  const std::function<double(const Vec&)>& fn);

// Radial rule on [0, rho0] exact for g(r) = r^{q-1} * smooth(r^q): the
// substitution u = (r/rho0)^q maps the weight away, then Gauss-Legendre in u.
// Returned weights integrate g against r^{q-1} dr and sum to rho0^q / q.
QuadRule radial_power_rule(int n, double q, double rho0);

// Adaptive 1-d integral on [a, b] (Simpson pairs, recursive bisection).
double adaptive_line_integral(const std::function<double(double)>& f, double a,
                              double b, double tol, int max_depth = 48);

} // namespace dcm
