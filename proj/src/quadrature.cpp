#include "dcm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "dcm/parallel.hpp"

namespace dcm {

QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");

    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }

    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }

    std::lock_guard<std::mutex> lock(mtx);
    cache[n] = r;
    return r;
}

QuadRule gauss_legendre_ab(int n, double a, double b) {
    QuadRule r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

std::vector<SphereNode> sphere_nodes(int dim, int n2_angles, int n3_polar,
                                     int n3_azimuth) {
    std::vector<SphereNode> out;
    if (dim == 1) {
        out.push_back({Vec(1.0, 1), 1.0});
        out.push_back({Vec(-1.0, 1), 1.0});
        return out;
    }
    if (dim == 2) {
        out.reserve(n2_angles);
        const double dth = 2.0 * M_PI / n2_angles;
        for (int j = 0; j < n2_angles; ++j) {
            double th = (j + 0.5) * dth;  // midpoints dodge axis-aligned kinks
            out.push_back({Vec(std::cos(th), std::sin(th)), dth});
        }
        return out;
    }
    // n = 3: integral over S^2 = int dphi int d(cos theta).
    QuadRule gl = gauss_legendre(n3_polar);
    const double dph = 2.0 * M_PI / n3_azimuth;
    out.reserve(static_cast<std::size_t>(n3_polar) * n3_azimuth);
    for (int i = 0; i < n3_polar; ++i) {
        double ct = gl.nodes[i];
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < n3_azimuth; ++j) {
            double ph = (j + 0.5) * dph;
            out.push_back({Vec(st * std::cos(ph), st * std::sin(ph), ct),
                           gl.weights[i] * dph});
        }
    }
    return out;
}

double sphere_sum(const std::vector<SphereNode>& nodes,
                  const std::function<double(const Vec&)>& fn) {
    return reduce_sum(nodes.size(),
                      [&](std::size_t i) { return nodes[i].weight * fn(nodes[i].u); });
}

QuadRule radial_power_rule(int n, double q, double rho0) {
    if (!(q > 0) || !(rho0 > 0))
        throw std::invalid_argument("radial_power_rule: q, rho0 must be positive");
    QuadRule gl = gauss_legendre_ab(n, 0.0, 1.0);
    QuadRule out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double mass = std::pow(rho0, q) / q;
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = rho0 * std::pow(gl.nodes[i], 1.0 / q);
        out.weights[i] = mass * gl.weights[i];
    }
    return out;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double& fm) {
    double m = 0.5 * (a + b);
    fm = f(m);
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double fm, double whole, double tol,
                    int depth) {
    double m = 0.5 * (a + b);
    double flm, frm;
    double left = simpson(f, a, fa, m, fm, flm);
    double right = simpson(f, m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_line_integral(const std::function<double(double)>& f, double a,
                              double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm;
    double whole = simpson(f, a, fa, b, fb, fm);
    return adaptive_rec(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

} // namespace dcm
