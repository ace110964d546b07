#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dcm/body.hpp"
#include "dcm/log_concave.hpp"
#include "dcm/variation.hpp"

namespace dcmtest {

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * (std::abs(a) + std::abs(b)) * 0.5 + 1e-14;
}

inline double rel_err(double a, double b) {
    double denom = std::max(std::abs(a), std::abs(b));
    return denom > 0 ? std::abs(a - b) / denom : 0.0;
}

// Gaussian f = e^{-|x|^2/2}
inline dcm::LogConcaveFunction gaussian(int dim) {
    return dcm::LogConcaveFunction::from_phi(dcm::ConvexFunctionRep::quadratic(dim, 1.0));
}

// f = e^{-|x|}
inline dcm::LogConcaveFunction exp_norm(int dim) {
    return dcm::LogConcaveFunction::from_phi(dcm::ConvexFunctionRep::scaled_norm(dim, 1.0));
}

inline dcm::LogConcaveFunction ball_indicator(int dim, double r) {
    return dcm::LogConcaveFunction::from_phi(
        dcm::ConvexFunctionRep::body_indicator(dcm::ConvexBody::ball(r, dim)));
}

inline dcm::ConvexBody unit_square() {
    return dcm::ConvexBody::box(2, dcm::Vec(1.0, 1.0));
}

// Random origin-symmetric hexagon, reproducible from seed.
inline dcm::ConvexBody symmetric_hexagon(unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.05, 0.95);
    std::uniform_real_distribution<double> rad(0.8, 2.0);
    std::vector<dcm::Vec> pts;
    for (int k = 0; k < 3; ++k) {
        double th = M_PI * (k + ang(rng)) / 3.0;
        double r = rad(rng);
        dcm::Vec v(r * std::cos(th), r * std::sin(th));
        pts.push_back(v);
        pts.push_back(-v);
    }
    return dcm::ConvexBody::from_vertices(2, pts);
}

// Seeded even integrable max-affine sample (slopes span the space).
inline dcm::ConvexFunctionRep random_max_affine(int dim, unsigned seed, int extra = 4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> s(-2.0, 2.0);
    std::uniform_real_distribution<double> o(-1.0, 0.5);
    std::vector<dcm::AffinePiece> pieces;
    for (int d = 0; d < dim; ++d) {
        double c = 0.7 + 0.1 * d;
        pieces.push_back({dcm::Vec::axis(d, dim, c), o(rng)});
        pieces.push_back({dcm::Vec::axis(d, dim, -c), o(rng)});
    }
    for (int k = 0; k < extra; ++k) {
        dcm::Vec sl = dcm::Vec::zero(dim);
        for (int d = 0; d < dim; ++d) sl[d] = s(rng);
        pieces.push_back({sl, o(rng)});
    }
    return dcm::ConvexFunctionRep::max_affine(dim, pieces);
}

// 1-d brute-force adaptive integral (test-side oracle, independent of the
// library quadrature).
inline double oracle_integral(const std::function<double(double)>& f, double a,
                              double b, int depth = 18) {
    std::function<double(double, double, double, double, double, int)> rec =
        [&](double x0, double x1, double f0, double f1, double fm, int d) -> double {
        double m = 0.5 * (x0 + x1);
        double lm = f(0.5 * (x0 + m)), rm = f(0.5 * (m + x1));
        double coarse = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        double fine = (x1 - x0) / 12.0 * (f0 + 4.0 * lm + 2.0 * fm + 4.0 * rm + f1);
        if (d <= 0 || std::abs(fine - coarse) < 1e-12 * (1.0 + std::abs(fine)))
            return fine;
        return rec(x0, m, f0, fm, lm, d - 1) + rec(m, x1, fm, f1, rm, d - 1);
    };
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fb, fm, depth);
}

} // namespace dcmtest
