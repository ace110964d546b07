#include "dcm/measure.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dcm/parallel.hpp"

namespace dcm {

void EuclideanMeasure::add(const Vec& y, double w) {
    points.push_back(y);
    weights.push_back(w);
}

double EuclideanMeasure::total_mass() const {
    return reduce_sum(weights.size(), [&](std::size_t i) { return weights[i]; });
}

double EuclideanMeasure::first_moment() const {
    return reduce_sum(weights.size(),
                      [&](std::size_t i) { return weights[i] * norm(points[i]); });
}

void EuclideanMeasure::validate() const {
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("EuclideanMeasure: weights must be finite and >= 0");
}

void SphericalMeasure::add(const Vec& v, double w) {
    directions.push_back(normalized(v));
    weights.push_back(w);
}

double SphericalMeasure::total_mass() const {
    return reduce_sum(weights.size(), [&](std::size_t i) { return weights[i]; });
}

void SphericalMeasure::validate() const {
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("SphericalMeasure: weights must be finite and >= 0");
    for (const auto& v : directions)
        if (std::abs(norm(v) - 1.0) > 1e-12)
            throw std::invalid_argument("SphericalMeasure: directions must be unit");
}

double integrate(const EuclideanMeasure& m, const TestFn& zeta) {
    return reduce_sum(m.weights.size(),
                      [&](std::size_t i) { return m.weights[i] * zeta(m.points[i]); });
}

double integrate(const SphericalMeasure& m, const TestFn& zeta) {
    return reduce_sum(m.weights.size(),
                      [&](std::size_t i) { return m.weights[i] * zeta(m.directions[i]); });
}

TestFunctionDictionary TestFunctionDictionary::make(int dim, double scale, int bumps,
                                                    std::uint64_t seed) {
    TestFunctionDictionary dict;
    dict.entries.push_back({"one", [](const Vec&) { return 1.0; }, 0.0, false});
    for (int d = 0; d < dim; ++d)
        dict.entries.push_back({"x" + std::to_string(d),
                                [d](const Vec& x) { return x[d]; }, 1.0, true});
    dict.entries.push_back({"abs", [](const Vec& x) { return norm(x); }, 1.0, false});
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            dict.entries.push_back({"x" + std::to_string(i) + "x" + std::to_string(j),
                                    [i, j](const Vec& x) { return x[i] * x[j]; },
                                    2.0 * scale, false});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> rad(0.3, 1.0);
    for (int b = 0; b < bumps; ++b) {
        Vec c = Vec::zero(dim);
        for (int d = 0; d < dim; ++d) c[d] = unif(rng) * scale;
        double r = rad(rng) * scale;
        double h = rad(rng);
        dict.entries.push_back(
            {"bump" + std::to_string(b),
             [c, r, h](const Vec& x) {
                 double t = 1.0 - norm(x - c) / r;
                 return t > 0 ? h * t : 0.0;
             },
             h / r, false});
    }
    return dict;
}

double discrepancy(const EuclideanMeasure& mu, const EuclideanMeasure& nu,
                   const TestFunctionDictionary& dict) {
    double rad = 0.0;
    for (const auto& p : mu.points) rad = std::max(rad, norm(p));
    for (const auto& p : nu.points) rad = std::max(rad, norm(p));
    const double diam = 2.0 * rad;

    double worst = 0.0;
    for (const auto& t : dict.entries) {
        double d = std::abs(integrate(mu, t.fn) - integrate(nu, t.fn));
        worst = std::max(worst, d / (1.0 + t.lipschitz * diam));
    }
    return worst;
}

} // namespace dcm
