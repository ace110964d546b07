#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dcm/convex_fn.hpp"
#include "dcm/log_concave.hpp"
#include "test_helpers.hpp"

using namespace dcm;
using namespace dcmtest;

namespace {

GridFn sample(const GridSpec& spec, const std::function<double(const Vec&)>& f) {
    GridFn g(spec);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = f(spec.point(spec.unflat(i)));
    return g;
}

} // namespace

TEST_CASE("quadratic conjugate is self-dual") {
    auto q = ConvexFunctionRep::quadratic(2, 1.0);
    auto qs = conjugate(q, GridSpec(2, 4.0, 65));
    CHECK(qs.kind == ConvexFunctionRep::Kind::Quadratic);
    CHECK(qs.quad_a == doctest::Approx(1.0));
    CHECK(qs.offset == doctest::Approx(0.0));
}

TEST_CASE("Gamma conjugate is a shifted ball indicator") {
    const double A = 3.0, c = 0.7;
    auto gamma = ConvexFunctionRep::scaled_norm(2, c, std::log(A));
    auto gs = conjugate(gamma, GridSpec(2, 4.0, 65));
    REQUIRE(gs.kind == ConvexFunctionRep::Kind::BodyIndicator);
    CHECK(gs.body->radius == doctest::Approx(c));
    CHECK(gs.offset == doctest::Approx(-std::log(A)));
    CHECK(gs.evaluate(Vec(0.2, 0.1)).value() == doctest::Approx(-std::log(A)));
    CHECK(gs.evaluate(Vec(1.0, 0.0)).is_infinite());
}

TEST_CASE("interval indicator conjugates to |y| in 1-d") {
    auto ind = ConvexFunctionRep::body_indicator(
        ConvexBody::from_vertices(1, {Vec(-1.0, 1), Vec(1.0, 1)}));
    auto s = conjugate(ind, GridSpec(1, 4.0, 65));
    REQUIRE(s.kind == ConvexFunctionRep::Kind::SupportFn);
    CHECK(s.evaluate(Vec(2.0, 1)).value() == doctest::Approx(2.0));
    CHECK(s.evaluate(Vec(-3.0, 1)).value() == doctest::Approx(3.0));
}

TEST_CASE("grid sweep matches closed forms at sweep accuracy") {
    // Acceptance-style setup: N=257, R=4, error <= 2 h Lip.
    GridSpec spec(2, 4.0, 257);
    const double h = spec.spacing();

    SUBCASE("half |x|^2") {
        GridFn g = sample(spec, [](const Vec& x) { return 0.5 * norm2(x); });
        auto rep = ConvexFunctionRep::grid_sampled(std::move(g), true);
        auto st = conjugate(rep, spec);
        REQUIRE(st.kind == ConvexFunctionRep::Kind::Grid);
        double lip = 4.0;  // |grad| <= R on the box
        double worst = 0.0;
        for (std::size_t i = 0; i < st.grid.values.size(); ++i) {
            Vec y = spec.point(spec.unflat(i));
            if (norm(y) > 3.0) continue;  // boundary truncation region
            worst = std::max(worst,
                             std::abs(st.grid.values[i] - 0.5 * norm2(y)));
        }
        CHECK(worst <= 2.0 * h * lip);
    }

    SUBCASE("norm section conjugates to interval indicator") {
        GridFn g = sample(spec, [](const Vec& x) { return norm(x); });
        auto rep = ConvexFunctionRep::grid_sampled(std::move(g), true);
        GridSpec dual(2, 2.0, 257);
        auto st = conjugate(rep, dual);
        // inside |y| <= 1 the conjugate is ~0 (exactly R(|y|-1) truncation
        // outside), kink at |y| = 1
        CHECK(std::abs(st.grid.interpolate(Vec(0.3, 0.4))) <= 2.0 * h);
        CHECK(st.grid.interpolate(Vec(1.5, 0.0)) >= 0.4 * spec.R);
    }
}

TEST_CASE("order reversal is exact for the sweep") {
    GridSpec spec(1, 3.0, 129);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.4);
    GridFn g1 = sample(spec, [](const Vec& x) { return 0.7 * norm2(x); });
    GridFn g2 = g1;
    for (auto& v : g2.values) v += u(rng);
    GridSpec dual(1, 5.0, 101);
    GridFn s1 = conjugate_grid(g1, dual, false);
    GridFn s2 = conjugate_grid(g2, dual, false);
    for (std::size_t i = 0; i < s1.values.size(); ++i)
        CHECK(s1.values[i] >= s2.values[i]);  // phi1 <= phi2 => phi1* >= phi2*
}

TEST_CASE("conjugate of an even grid function is exactly even") {
    GridSpec spec(2, 3.0, 65);
    GridFn g = sample(spec, [](const Vec& x) {
        return 0.5 * norm2(x) + 0.25 * std::abs(x[0] * x[1]);
    });
    auto rep = ConvexFunctionRep::grid_sampled(std::move(g), true, false);
    auto st = conjugate(rep, GridSpec(2, 4.0, 65));
    CHECK(st.grid.is_even_exact());
}

TEST_CASE("convexify: brute-force envelope oracle on |x^2 - 1|") {
    GridSpec spec(1, 3.0, 257);
    const double h = spec.spacing();
    GridFn g = sample(spec, [](const Vec& x) { return std::abs(x[0] * x[0] - 1.0); });

    // oracle: lower convex envelope over all node pairs
    std::vector<double> env(g.values.size());
    for (int i = 0; i < spec.N; ++i) {
        double xi = spec.coord(i), best = g.values[i];
        for (int a = 0; a <= i; ++a)
            for (int b = i; b < spec.N; ++b) {
                if (a == b) continue;
                double xa = spec.coord(a), xb = spec.coord(b);
                double t = (xi - xa) / (xb - xa);
                best = std::min(best, (1 - t) * g.values[a] + t * g.values[b]);
            }
        env[i] = best;
    }

    auto raw = ConvexFunctionRep::grid_sampled(g, true, false);
    auto out = convexify(raw);
    REQUIRE(out.kind == ConvexFunctionRep::Kind::Grid);
    for (std::size_t i = 0; i < env.size(); ++i)
        CHECK(std::abs(out.grid.values[i] - env[i]) <= 2.0 * h + 1e-9);
    // envelope is 0 on [-1,1], x^2-1 outside
    CHECK(std::abs(out.grid.interpolate(Vec(0.0, 1))) <= 2.0 * h);
    CHECK(out.grid.interpolate(Vec(2.0, 1)) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("convexify leaves convex input nearly fixed and keeps sign") {
    GridSpec spec(2, 3.0, 129);
    const double h = spec.spacing();

    // involution sweep over the convex catalog sampled to the grid
    struct Entry {
        std::function<double(const Vec&)> phi;
        double lip;
    };
    ConvexBody sq = unit_square();
    std::vector<Entry> catalog = {
        {[](const Vec& x) { return 0.5 * norm2(x); }, 3.0 * std::sqrt(2.0)},
        {[](const Vec& x) { return 1.5 * norm(x) + 0.2; }, 1.5},
        {[&](const Vec& x) { return sq.support(x); }, std::sqrt(2.0)},
    };
    for (const auto& entry : catalog) {
        GridFn g = sample(spec, entry.phi);
        auto out = convexify(ConvexFunctionRep::grid_sampled(g, true));
        double worst = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i)
            worst = std::max(worst, std::abs(out.grid.values[i] - g.values[i]));
        CHECK(worst <= 2.0 * h * entry.lip);
    }

    GridFn g = sample(spec, [](const Vec& x) { return 0.5 * norm2(x); });
    auto out = convexify(ConvexFunctionRep::grid_sampled(g, true));
    double lip = 3.0 * std::sqrt(2.0);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        CHECK(std::abs(out.grid.values[i] - g.values[i]) <= 2.0 * h * lip);

    SUBCASE("nonnegative random input stays nonnegative") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        GridFn r = sample(spec, [&](const Vec&) { return u(rng); });
        auto env = convexify(ConvexFunctionRep::grid_sampled(std::move(r), false, false));
        for (double v : env.grid.values) CHECK(v >= -1e-9);
        CHECK(env.grid.is_discretely_convex());
    }
}

TEST_CASE("evaluate and gradient") {
    CHECK(ConvexFunctionRep::quadratic(2, 1.0).gradient(Vec(1.0, 2.0))[0] ==
          doctest::Approx(1.0));
    CHECK(ConvexFunctionRep::quadratic(2, 1.0).gradient(Vec(1.0, 2.0))[1] ==
          doctest::Approx(2.0));

    auto sn = ConvexFunctionRep::scaled_norm(2, 1.0);
    Vec gz = sn.gradient(Vec::zero(2));
    CHECK(norm(gz) == doctest::Approx(0.0));  // minimal-norm subgradient
    Vec g1 = sn.gradient(Vec(3.0, 4.0));
    CHECK(g1[0] == doctest::Approx(0.6));
    CHECK(g1[1] == doctest::Approx(0.8));

    SUBCASE("grid gradient approximates the closed form") {
        GridSpec spec(2, 4.0, 129);
        GridFn g = sample(spec, [](const Vec& x) { return 0.5 * norm2(x); });
        auto rep = ConvexFunctionRep::grid_sampled(std::move(g), true);
        Vec gr = rep.gradient(Vec(0.5, 0.5));
        CHECK(std::abs(gr[0] - 0.5) <= 1e-2);
        CHECK(std::abs(gr[1] - 0.5) <= 1e-2);
    }

    SUBCASE("out of domain") {
        GridSpec spec(1, 2.0, 65);
        GridFn g = sample(spec, [](const Vec& x) { return norm2(x); });
        auto rep = ConvexFunctionRep::grid_sampled(std::move(g), true);
        CHECK_THROWS_AS((void)rep.evaluate(Vec(5.0, 1)), std::domain_error);
    }
}

TEST_CASE("empty effective domain is rejected") {
    GridSpec spec(1, 1.0, 5);
    GridFn g(spec);
    for (auto& v : g.values) v = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(conjugate_grid(g, spec, false), "empty effective domain",
                         std::domain_error);
}

TEST_CASE("sup-convolution") {
    SUBCASE("indicator balls add their radii") {
        auto f = ball_indicator(2, 1.0);
        auto g = ball_indicator(2, 1.0);
        auto ft = sup_convolve(f, g, 0.5);
        REQUIRE(ft.phi.kind == ConvexFunctionRep::Kind::BodyIndicator);
        CHECK(ft.phi.body->radius == doctest::Approx(1.5));
        REQUIRE(ft.support.has_value());
        CHECK(ft.support->radius == doctest::Approx(1.5));
    }
    SUBCASE("gaussian widens") {
        auto f = gaussian(1), g = gaussian(1);
        auto ft = sup_convolve(f, g, 0.8);
        REQUIRE(ft.phi.kind == ConvexFunctionRep::Kind::Quadratic);
        CHECK(ft.phi.quad_a == doctest::Approx(1.0 / 1.8));
        CHECK(ft.value(Vec(1.0, 1)) == doctest::Approx(std::exp(-1.0 / 3.6)));
    }
    SUBCASE("t=0 returns f unchanged") {
        auto f = exp_norm(2);
        auto ft = sup_convolve(f, ball_indicator(2, 1.0), 0.0);
        CHECK(ft.value(Vec(0.5, 0.5)) == doctest::Approx(f.value(Vec(0.5, 0.5))));
    }
    SUBCASE("grid route: e^{-|x|} with a ball") {
        auto f = exp_norm(2);
        auto g = ball_indicator(2, 1.0);
        const double t = 0.25;
        auto ft = sup_convolve(f, g, t);
        // closed form: e^{-(|x| - t)_+}
        for (double r : {0.1, 0.5, 1.0, 2.0}) {
            double want = std::exp(-std::max(r - t, 0.0));
            CHECK(ft.value(Vec(r, 0.0)) == doctest::Approx(want).epsilon(0.02));
        }
    }
    SUBCASE("support vertices of the sum are covered") {
        auto f = LogConcaveFunction::from_phi(
            ConvexFunctionRep::body_indicator(unit_square()));
        auto g = LogConcaveFunction::from_phi(
            ConvexFunctionRep::body_indicator(unit_square()));
        auto ft = sup_convolve(f, g, 1.0);
        REQUIRE(ft.support.has_value());
        ConvexBody sum = minkowski_sum(unit_square(), 1.0, unit_square());
        for (const auto& v : sum.vertices) CHECK(ft.support->contains(v, 1e-9));
    }
}

TEST_CASE("level sets") {
    SUBCASE("gaussian level is an exact ball") {
        auto f = gaussian(2);
        ConvexBody K = level_set(f, std::exp(-0.5));
        REQUIRE(K.kind == ConvexBody::Kind::Ball);
        CHECK(K.radius == doctest::Approx(1.0));
    }
    SUBCASE("indicator level set is the body") {
        auto f = ball_indicator(2, 2.0);
        ConvexBody K = level_set(f, 0.3);
        CHECK(K.radius == doctest::Approx(2.0));
    }
    SUBCASE("grid level set of e^{-|x|} is close to a ball") {
        GridSpec spec(2, 3.0, 129);
        const double h = spec.spacing();
        GridFn g = sample(spec, [](const Vec& x) { return norm(x); });
        auto f = LogConcaveFunction::from_phi(
            ConvexFunctionRep::grid_sampled(std::move(g), true), std::nullopt);
        ConvexBody K = level_set(f, std::exp(-1.0));
        REQUIRE(K.kind == ConvexBody::Kind::Polytope);
        // Hausdorff distance to B(1) within 2h
        for (const auto& v : K.vertices) CHECK(std::abs(norm(v) - 1.0) <= 2.0 * h);
    }
    SUBCASE("s outside (0, max f) is rejected") {
        auto f = gaussian(2);
        CHECK_THROWS_AS((void)level_set(f, 1.5), std::invalid_argument);
        CHECK_THROWS_AS((void)level_set(f, 0.0), std::invalid_argument);
    }
}

TEST_CASE("generalized Cauchy-Schwarz for gauges") {
    // <x,y> <= ||x||_K ||y||_{K*} with ||x||_K = 1/rho_K(x) and
    // ||y||_{K*} = h_K(y).
    auto bodies = {unit_square(), symmetric_hexagon(3)};
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& K : bodies) {
        for (int it = 0; it < 100; ++it) {
            Vec x(u(rng), u(rng)), y(u(rng), u(rng));
            if (norm(x) < 1e-6 || norm(y) < 1e-6) continue;
            double nx = norm(x) / K.radial(normalized(x));
            double ny = K.support(y);
            CHECK(dot(x, y) <= nx * ny + 1e-9 * (1.0 + nx * ny));
        }
    }
}

TEST_CASE("max-affine conjugate matches the barycentric oracle") {
    // phi*(y) = min { sum lambda_i (-o_i) : lambda in simplex,
    // sum lambda_i s_i = y }; enumerate supports of size <= 3.
    auto ma = random_max_affine(2, 5);
    const auto& ps = ma.pieces;
    auto oracle = [&](const Vec& y) {
        double best = std::numeric_limits<double>::infinity();
        const std::size_t m = ps.size();
        for (std::size_t i = 0; i < m; ++i)
            if (norm(ps[i].slope - y) < 1e-12) best = std::min(best, -ps[i].offset);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                Vec d = ps[j].slope - ps[i].slope;
                double dd = norm2(d);
                if (dd < 1e-20) continue;
                double t = dot(y - ps[i].slope, d) / dd;
                if (t < -1e-12 || t > 1.0 + 1e-12) continue;
                if (norm(ps[i].slope + d * t - y) > 1e-10) continue;
                best = std::min(best, -(1.0 - t) * ps[i].offset - t * ps[j].offset);
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t k = j + 1; k < m; ++k) {
                    Vec e1 = ps[j].slope - ps[i].slope, e2 = ps[k].slope - ps[i].slope;
                    double det = e1[0] * e2[1] - e1[1] * e2[0];
                    if (std::abs(det) < 1e-14) continue;
                    Vec r = y - ps[i].slope;
                    double a = (r[0] * e2[1] - r[1] * e2[0]) / det;
                    double b = (e1[0] * r[1] - e1[1] * r[0]) / det;
                    if (a < -1e-12 || b < -1e-12 || a + b > 1.0 + 1e-12) continue;
                    best = std::min(best, -(1.0 - a - b) * ps[i].offset -
                                              a * ps[j].offset - b * ps[k].offset);
                }
        return best;
    };

    GridSpec dual(2, 2.5, 65);
    auto st = conjugate(ma, dual);
    REQUIRE(st.kind == ConvexFunctionRep::Kind::Grid);
    int checked = 0;
    for (std::size_t f = 0; f < st.grid.values.size(); f += 7) {
        Vec y = dual.point(dual.unflat(f));
        double got = st.grid.values[f];
        double want = oracle(y);
        if (!std::isfinite(got) || !std::isfinite(want)) continue;
        CHECK(got == doctest::Approx(want).epsilon(1e-9).scale(1.0));
        ++checked;
    }
    CHECK(checked > 100);
}
