#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcm/variation.hpp"
#include "test_helpers.hpp"

using namespace dcm;
using namespace dcmtest;

namespace {

double gaussian_moment_exact(int n, double q) {
    // |S^{n-1}| 2^{q/2-1} Gamma(q/2)
    return sphere_area(n) * std::pow(2.0, 0.5 * q - 1.0) * std::tgamma(0.5 * q);
}

} // namespace

TEST_CASE("moment oracles") {
    QuadratureSpec spec;
    SUBCASE("gaussian, n=2, q=2 -> 2 pi") {
        CHECK(moment(gaussian(2), Weight::power(2.0), spec) ==
              doctest::Approx(2.0 * M_PI).epsilon(1e-3));
    }
    SUBCASE("gaussian, n=2, q=1 -> 2 pi sqrt(pi/2)") {
        double want = 2.0 * M_PI * std::sqrt(M_PI / 2.0);
        CHECK(want == doctest::Approx(7.8748).epsilon(1e-4));
        CHECK(moment(gaussian(2), Weight::power(1.0), spec) ==
              doctest::Approx(want).epsilon(1e-2));
    }
    SUBCASE("gaussian radial formula across n and q") {
        for (int n : {1, 2})
            for (double q : {0.5, 1.0, 2.0, 3.0}) {
                double got = moment(gaussian(n), Weight::power(q), spec);
                CHECK(rel_err(got, gaussian_moment_exact(n, q)) <= 1e-2);
            }
    }
    SUBCASE("indicator: V_q(1_K) = V_q(K) across the two routes") {
        CHECK(moment(ball_indicator(2, 2.0), Weight::power(1.0), spec) ==
              doctest::Approx(4.0 * M_PI).epsilon(1e-6));
        // midpoint-cell route vs the spherical route
        QuadratureSpec fine = spec;
        fine.rho0 = 0.15;  // wider patch for the strongly singular q = 1/2
        fine.cells_per_axis = 256;
        for (const auto& K : {unit_square(), ConvexBody::ball(2.0, 2)})
            for (double q : {0.5, 1.0, 2.0}) {
                double box = 2.0 * (1.0 + 1e-12);  // covers both test bodies
                double mid = weighted_integral(
                    2, box, [&](const Vec& x) { return K.contains(x) ? 1.0 : 0.0; },
                    Weight::power(q), fine);
                CHECK(rel_err(mid, dual_quermass(K, q)) <= 1e-2);
            }
    }
    SUBCASE("divergence guard") {
        GridSpec gs(2, 3.0, 33);
        GridFn flat(gs);  // phi == 0 everywhere: not integrable
        auto f = LogConcaveFunction::from_phi(
            ConvexFunctionRep::grid_sampled(std::move(flat), true), std::nullopt);
        CHECK_THROWS_WITH_AS((void)moment(f, Weight::power(1.0), spec),
                             "moment may be infinite", std::domain_error);
    }
}

TEST_CASE("moment of the conjugate") {
    QuadratureSpec spec;
    SUBCASE("Gamma witness: V_q(e^{-Gamma*}) = A") {
        const double q = 1.5;
        const int n = 2;
        const double cn = std::pow(q / sphere_area(n), 1.0 / q);
        for (double A : {1.0, 4.0}) {
            auto gamma = ConvexFunctionRep::scaled_norm(n, cn, std::log(A));
            CHECK(moment_of_conjugate(gamma, Weight::power(q), spec) ==
                  doctest::Approx(A).epsilon(1e-2));
        }
    }
    SUBCASE("self-dual gaussian") {
        auto phi = ConvexFunctionRep::quadratic(2, 1.0);
        CHECK(moment_of_conjugate(phi, Weight::power(2.0), spec) ==
              doctest::Approx(2.0 * M_PI).epsilon(1e-3));
    }
    SUBCASE("ball indicator conjugates to e^{-|y|}: 2 pi Gamma(q)") {
        auto phi = ConvexFunctionRep::body_indicator(ConvexBody::ball(1.0, 2));
        for (double q : {1.0, 2.0, 3.0})
            CHECK(rel_err(moment_of_conjugate(phi, Weight::power(q), spec),
                          2.0 * M_PI * std::tgamma(q)) <= 1e-2);
    }
}

TEST_CASE("weighted tv by the decomposition") {
    QuadratureSpec spec;
    SUBCASE("indicator ball: pure boundary term") {
        auto f = ball_indicator(2, 1.0);
        TvResult tv = weighted_tv(f, ConvexBody::ball(1.0, 2), Weight::power(2.0), spec);
        CHECK(tv.bulk == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(tv.boundary == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
        CHECK(tv.total == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    }
    SUBCASE("1-d gaussian: total variation 2 max") {
        auto f = gaussian(1);
        ConvexBody L = ConvexBody::from_vertices(1, {Vec(-1.0, 1), Vec(1.0, 1)});
        TvResult tv = weighted_tv(f, L, Weight::power(1.0), spec);
        CHECK(tv.boundary == doctest::Approx(0.0));
        CHECK(tv.total == doctest::Approx(2.0).epsilon(1e-3));
    }
    SUBCASE("e^{-|x|}: h_B(grad) = 1 a.e.") {
        auto f = exp_norm(2);
        for (double q : {1.0, 2.0}) {
            TvResult tv = weighted_tv(f, ConvexBody::ball(1.0, 2), Weight::power(q), spec);
            CHECK(rel_err(tv.total, 2.0 * M_PI * std::tgamma(q)) <= 1e-2);
        }
    }
}

TEST_CASE("coarea route equals the decomposition route") {
    QuadratureSpec spec;
    SUBCASE("indicator ball, q=1: single level") {
        auto f = ball_indicator(2, 2.0);
        double got = coarea_tv(f, ConvexBody::ball(1.0, 2), Weight::power(1.0), spec);
        CHECK(got == doctest::Approx(2.0 * M_PI).epsilon(1e-7));
    }
    SUBCASE("catalog route equivalence at 2%") {
        ConvexBody ball1 = ConvexBody::ball(1.0, 2);
        ConvexBody square = unit_square();
        struct Case {
            LogConcaveFunction f;
            const ConvexBody* L;
        };
        std::vector<Case> cases = {{gaussian(2), &ball1},
                                   {gaussian(2), &square},
                                   {exp_norm(2), &ball1},
                                   {ball_indicator(2, 2.0), &square}};
        for (auto& c : cases)
            for (double q : {0.5, 1.0, 2.0, 3.0}) {
                double a = weighted_tv(c.f, *c.L, Weight::power(q), spec).total;
                double b = coarea_tv(c.f, *c.L, Weight::power(q), spec);
                CAPTURE(q);
                CHECK(rel_err(a, b) <= 2e-2);
            }
    }
}

TEST_CASE("growth check") {
    CHECK(growth_check(ConvexFunctionRep::quadratic(2, 1.0)));
    CHECK(growth_check(ConvexFunctionRep::scaled_norm(2, 0.1)));
    GridSpec gs(2, 6.0, 65);
    GridFn flat(gs);
    CHECK_FALSE(growth_check(ConvexFunctionRep::grid_sampled(std::move(flat), true)));
    GridFn quad(gs);
    for (std::size_t i = 0; i < quad.values.size(); ++i)
        quad.values[i] = 0.5 * norm2(gs.point(gs.unflat(i)));
    CHECK(growth_check(ConvexFunctionRep::grid_sampled(std::move(quad), true)));
}

TEST_CASE("Prekopa-Leindler") {
    QuadratureSpec spec;
    SUBCASE("identical gaussians: equality at 2 pi") {
        auto pr = prekopa_leindler_check(gaussian(2), gaussian(2), 0.5, spec);
        CHECK(pr.lhs == doctest::Approx(2.0 * M_PI).epsilon(1e-3));
        CHECK(pr.rhs == doctest::Approx(2.0 * M_PI).epsilon(1e-3));
    }
    SUBCASE("balls: 4 pi vs 3 pi") {
        auto pr = prekopa_leindler_check(ball_indicator(2, 1.0), ball_indicator(2, 3.0),
                                         0.5, spec);
        CHECK(pr.lhs == doctest::Approx(4.0 * M_PI).epsilon(1e-2));
        CHECK(pr.rhs == doctest::Approx(3.0 * M_PI).epsilon(1e-2));
        CHECK(pr.lhs >= pr.rhs - 1e-3 * pr.rhs);
    }
    SUBCASE("20 seeded max-affine pairs") {
        for (unsigned seed = 0; seed < 20; ++seed) {
            auto f = LogConcaveFunction::from_phi(random_max_affine(2, 2 * seed + 1));
            auto g = LogConcaveFunction::from_phi(random_max_affine(2, 2 * seed + 2));
            double lambda = 0.3 + 0.02 * seed;
            auto pr = prekopa_leindler_check(f, g, lambda, spec);
            CAPTURE(seed);
            CHECK(pr.lhs >= pr.rhs - 1e-3 * pr.rhs);
        }
    }
}

TEST_CASE("derivative control") {
    QuadratureSpec spec;
    SUBCASE("e^{-t^2}") {
        auto f = LogConcaveFunction::from_phi(ConvexFunctionRep::quadratic(1, 2.0));
        auto pr = derivative_control_check(f, 0.0, spec);
        CHECK(pr.lhs == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(pr.rhs == doctest::Approx(4.0));
        CHECK(pr.lhs <= pr.rhs + 1e-6);
    }
    SUBCASE("e^{-|t|}, t0=1: one-sided tails") {
        auto f = exp_norm(1);
        auto pr = derivative_control_check(f, 1.0, spec);
        CHECK(pr.lhs == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-6));
        CHECK(pr.rhs == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("indicator, empty tail") {
        auto f = ball_indicator(1, 1.0);
        auto pr = derivative_control_check(f, 2.0, spec);
        CHECK(pr.lhs == doctest::Approx(0.0));
        CHECK(pr.rhs == doctest::Approx(0.0));
    }
}

TEST_CASE("refinement convergence with a pinned patch") {
    // Fixed rho0 across resolutions so the midpoint error dominates.
    struct Case {
        LogConcaveFunction f;
        double q;
        double want;
        double box;
        double rho0;
    };
    std::vector<Case> cases = {
        {gaussian(2), 1.0, gaussian_moment_exact(2, 1.0), 8.0, 0.75},
        {gaussian(2), 2.0, gaussian_moment_exact(2, 2.0), 8.0, 0.75},
        {exp_norm(2), 2.0, 2.0 * M_PI * std::tgamma(2.0), 24.0, 1.6},
    };
    for (auto& c : cases) {
        double prev = -1.0;
        for (int cells : {32, 64, 128}) {
            QuadratureSpec spec;
            spec.cells_per_axis = cells;
            spec.rho0 = c.rho0;
            spec.box_radius = c.box;
            spec.patch_radial = 24;
            spec.patch_angular = 256;
            double err = std::abs(moment(c.f, Weight::power(c.q), spec) - c.want);
            CAPTURE(c.q);
            if (prev > 0) CHECK(prev / std::max(err, 1e-16) >= 1.5);
            prev = err;
        }
    }
}

TEST_CASE("patch weights are nonnegative and total the exact ball mass") {
    for (double q : {0.5, 1.0, 2.5}) {
        QuadratureSpec spec;
        spec.rho0 = 0.5;
        auto nodes = weighted_nodes(2, 4.0, Weight::power(q), spec);
        double patch_total = 0.0;
        for (const auto& nd : nodes) {
            CHECK(nd.w >= 0.0);
            if (norm(nd.x) <= spec.rho0) patch_total += nd.w;
        }
        double want = sphere_area(2) * std::pow(spec.rho0, q) / q;
        CHECK(patch_total == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("gaussian weight behind the same interface") {
    QuadratureSpec spec;
    // integral of e^{-|x|^2/2} * e^{-|x|^2/2} over R^2 = pi
    double got = moment(gaussian(2), Weight::gaussian(), spec);
    CHECK(got == doctest::Approx(M_PI).epsilon(1e-3));
}
