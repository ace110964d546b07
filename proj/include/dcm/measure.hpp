#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dcm/geometry.hpp"

namespace dcm {

// Finite weighted atom set on R^n.
struct EuclideanMeasure {
    int dim = 1;
    std::vector<Vec> points;
    std::vector<double> weights;
    std::string provenance;  // "analytic" or "pushforward <cells>"

    double total_mass() const;
    double first_moment() const;  // integral of |y|
    void add(const Vec& y, double w);
    void validate() const;  // weights finite, nonnegative
};

// Finite weighted atom set on S^{n-1}; unit vectors normalized to 1e-12.
struct SphericalMeasure {
    int dim = 1;
    std::vector<Vec> directions;
    std::vector<double> weights;

    double total_mass() const;
    void add(const Vec& v, double w);
    void validate() const;
};

using TestFn = std::function<double(const Vec&)>;

struct TestFunction {
    std::string name;
    TestFn fn;
    double lipschitz = 0.0;
    bool odd = false;
};

// Evaluable test family: constants, coordinates, |x|, quadratic monomials
// x_i x_j, and seeded random Lipschitz cone bumps.  Reproducible from seed.
struct TestFunctionDictionary {
    std::vector<TestFunction> entries;

    static TestFunctionDictionary make(int dim, double scale, int bumps,
                                       std::uint64_t seed);
};

double integrate(const EuclideanMeasure& m, const TestFn& zeta);
double integrate(const SphericalMeasure& m, const TestFn& zeta);

// max over the dictionary of |int zeta dmu - int zeta dnu| / (1 + Lip * diam),
// diam over the combined atom supports.
double discrepancy(const EuclideanMeasure& mu, const EuclideanMeasure& nu,
                   const TestFunctionDictionary& dict);

} // namespace dcm
