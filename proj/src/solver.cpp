#include "dcm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <stdexcept>

#include "dcm/convex_fn.hpp"
#include "dcm/parallel.hpp"

namespace dcm {

PrescribedMeasure PrescribedMeasure::from_measure(EuclideanMeasure m) {
    m.validate();
    EuclideanMeasure kept;
    kept.dim = m.dim;
    kept.provenance = m.provenance;
    for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] > 0.0) kept.add(m.points[i], m.weights[i]);
    PrescribedMeasure p;
    p.total = kept.total_mass();
    p.first_moment = kept.first_moment();
    p.mu = std::move(kept);
    return p;
}

PrescribedMeasure PrescribedMeasure::scaled(double c) const {
    if (!(c > 0)) throw std::invalid_argument("PrescribedMeasure: scale must be positive");
    EuclideanMeasure m = mu;
    for (auto& w : m.weights) w *= c;
    return from_measure(std::move(m));
}

namespace {

// Smallest eigenvalue of the symmetric moment matrix (closed form n<=2,
// Jacobi sweeps n=3).
double smallest_eigenvalue(const std::array<std::array<double, 3>, 3>& S, int n) {
    if (n == 1) return S[0][0];
    if (n == 2) {
        double tr = S[0][0] + S[1][1];
        double det = S[0][0] * S[1][1] - S[0][1] * S[0][1];
        double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        return 0.5 * tr - disc;
    }
    std::array<std::array<double, 3>, 3> a = S;
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off < 1e-14 * (1.0 + std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2])))
            break;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
                double c = std::cos(theta), s = std::sin(theta);
                std::array<std::array<double, 3>, 3> r = a;
                for (int k = 0; k < 3; ++k) {
                    r[p][k] = c * a[p][k] - s * a[q][k];
                    r[q][k] = s * a[p][k] + c * a[q][k];
                }
                a = r;
                for (int k = 0; k < 3; ++k) {
                    r[k][p] = c * a[k][p] - s * a[k][q];
                    r[k][q] = s * a[k][p] + c * a[k][q];
                }
                a = r;
            }
    }
    return std::min({a[0][0], a[1][1], a[2][2]});
}

} // namespace

AdmissibilityReport check_admissible(const PrescribedMeasure& p) {
    AdmissibilityReport rep;
    rep.first_moment = p.first_moment;
    rep.nonzero = p.total > 0.0;
    if (!rep.nonzero) rep.rejections.push_back("measure is zero");

    const auto& mu = p.mu;
    const int n = mu.dim;
    double radius = 0.0;
    for (const auto& y : mu.points) radius = std::max(radius, norm(y));

    // Evenness: pair every atom with an unused mirror atom of equal mass
    // (coordinates within 1e-12 scale, masses within 1e-12 of the total).
    // Bucket hashing with neighbor probing keeps the matching robust against
    // rounding-level jitter.
    const double ctol = 1e-12 * (1.0 + radius);
    const double wtol = 1e-12 * (p.total + 1.0);
    const std::size_t m = mu.points.size();
    auto bucket_key = [&](const Vec& y) {
        std::uint64_t h = 1469598103934665603ull;
        for (int d = 0; d < n; ++d) {
            auto q64 = static_cast<std::int64_t>(std::llround(y[d] / (4.0 * ctol)));
            h ^= static_cast<std::uint64_t>(q64) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < m; ++i) buckets[bucket_key(mu.points[i])].push_back(i);

    std::vector<char> used(m, 0);
    rep.even = true;
    for (std::size_t i = 0; i < m && rep.even; ++i) {
        if (used[i]) continue;
        const Vec target = -mu.points[i];
        bool found = false;
        std::array<int, 3> off{0, 0, 0};
        const int span = 1;
        for (off[0] = -span; off[0] <= span && !found; ++off[0])
            for (off[1] = -span; off[1] <= span && !found; ++off[1])
                for (off[2] = -span; off[2] <= span && !found; ++off[2]) {
                    Vec probe = target;
                    for (int d = 0; d < n; ++d) probe[d] += off[d] * 4.0 * ctol;
                    auto it = buckets.find(bucket_key(probe));
                    if (it == buckets.end()) continue;
                    for (std::size_t j : it->second) {
                        if (used[j] && j != i) continue;
                        if (j == i && norm(mu.points[i]) > 0.5 * ctol) continue;
                        if (norm(mu.points[j] - target) > ctol) continue;
                        if (std::abs(mu.weights[j] - mu.weights[i]) > wtol) continue;
                        used[i] = used[j] = 1;
                        found = true;
                        break;
                    }
                }
        if (!found) rep.even = false;
    }
    if (!rep.even) rep.rejections.push_back("measure is not even");

    // Non-concentration via the second-moment matrix.
    std::array<std::array<double, 3>, 3> S{};
    for (std::size_t i = 0; i < mu.points.size(); ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                S[a][b] += mu.weights[i] * mu.points[i][a] * mu.points[i][b];
    const double diam = 2.0 * radius;
    rep.eigen_threshold = 1e-10 * p.total * diam * diam;
    rep.min_eigenvalue = smallest_eigenvalue(S, n);
    rep.not_concentrated = rep.min_eigenvalue > rep.eigen_threshold;
    if (!rep.not_concentrated)
        rep.rejections.push_back("measure concentrated in a proper subspace");
    return rep;
}

namespace {

// Scatter a measure onto the multilinear nodal basis of `spec`.
std::vector<double> scatter_to_basis(const EuclideanMeasure& m, const GridSpec& spec) {
    std::vector<double> nodal(spec.node_count(), 0.0);
    const double h = spec.spacing();
    const int n = spec.dim;
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        const Vec& y = m.points[i];
        double wgt = m.weights[i];
        if (wgt == 0.0) continue;
        std::array<int, 3> base{0, 0, 0};
        std::array<double, 3> frac{0, 0, 0};
        bool inside = true;
        for (int d = 0; d < n; ++d) {
            double t = (y[d] + spec.R) / h;
            if (t < -1e-9 || t > spec.N - 1 + 1e-9) inside = false;
            int c = static_cast<int>(std::floor(t));
            c = std::clamp(c, 0, spec.N - 2);
            base[d] = c;
            frac[d] = std::clamp(t - c, 0.0, 1.0);
        }
        if (!inside) throw std::invalid_argument("measure atom outside the chi grid box");
        const int corners = 1 << n;
        for (int c = 0; c < corners; ++c) {
            std::array<int, 3> idx = base;
            double bw = 1.0;
            for (int d = 0; d < n; ++d) {
                if (c & (1 << d)) {
                    idx[d] += 1;
                    bw *= frac[d];
                } else {
                    bw *= 1.0 - frac[d];
                }
            }
            nodal[spec.flat(idx)] += wgt * bw;
        }
    }
    return nodal;
}

QuadratureSpec solver_quad(const SolverConfig& config) {
    QuadratureSpec q = config.quad;
    q.box_radius = config.dual.R;
    q.cells_per_axis = config.dual.N - 1;
    return q;
}

LogConcaveFunction iterate_function(const GridFn& chi_star) {
    auto rep = ConvexFunctionRep::grid_sampled(chi_star, true, false);
    LogConcaveFunction f;
    f.phi = std::move(rep);
    f.support = std::nullopt;  // chi* is finite on the dual box
    f.max_location = f.phi.argmin();
    return f;
}

} // namespace

ObjectiveValue objective(const GridFn& chi, const PrescribedMeasure& mu,
                         const Weight& w, const SolverConfig& config) {
    ObjectiveValue out;
    const QuadratureSpec quad = solver_quad(config);

    GridFn chi_star = conjugate_grid(chi, config.dual, true);
    LogConcaveFunction f = iterate_function(chi_star);
    out.constraint = moment(f, w, quad);
    if (!(out.constraint > 0.0) || !std::isfinite(out.constraint))
        throw std::runtime_error("degenerate iterate");

    // int chi dmu via the nodal basis
    std::vector<double> mu_nodal = scatter_to_basis(mu.mu, chi.spec);
    double lin = reduce_sum(mu_nodal.size(),
                            [&](std::size_t j) { return mu_nodal[j] * chi.values[j]; });
    out.J = lin - mu.total * std::log(out.constraint);

    out.pushforward = euclidean_dcm(f, w, quad);
    std::vector<double> push_nodal = scatter_to_basis(out.pushforward, chi.spec);
    const double scale = mu.total / out.constraint;
    out.gradient.resize(mu_nodal.size());
    out.mass.resize(mu_nodal.size());
    for (std::size_t j = 0; j < mu_nodal.size(); ++j) {
        out.gradient[j] = mu_nodal[j] - scale * push_nodal[j];
        out.mass[j] = mu_nodal[j] + scale * push_nodal[j];
    }
    return out;
}

namespace {

GridFn project_iterate(const GridFn& raw, const Weight& w, double A,
                       const SolverConfig& config) {
    // convexify -> symmetrize -> clip at 0 -> renormalize to V_q = A
    GridFn star = conjugate_grid(raw, config.dual, true);
    GridFn env = conjugate_grid(star, config.primal, true);
    env.symmetrize_even();
    for (auto& v : env.values) v = std::max(v, 0.0);

    GridFn env_star = conjugate_grid(env, config.dual, true);
    double lambda = moment(iterate_function(env_star), w, solver_quad(config));
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::runtime_error("degenerate iterate");
    const double shift = std::log(A) - std::log(lambda);
    for (auto& v : env.values) v += shift;
    return env;
}

} // namespace

double choose_A(const PrescribedMeasure& mu, const Weight& w,
                const SolverConfig& config, std::string* note) {
    SolverConfig trial = config;
    trial.A = 1.0;
    trial.max_iters = 120;
    trial.tol_rel = std::min(config.tol_rel, 5e-3);
    for (int k = 0; k <= 24; ++k) {
        trial.A = std::pow(2.0, k);
        SolverReport rep = solve(mu, w, trial);
        std::array<int, 3> origin{trial.primal.mid(), trial.primal.mid(),
                                  trial.primal.mid()};
        double chi_o = rep.chi0.at(origin);
        if (chi_o >= 0.1) {
            if (note)
                *note = "choose_A: A=2^" + std::to_string(k) +
                        " accepted (trial chi(o) margin met)";
            return trial.A;
        }
    }
    if (note) *note = "choose_A: search exhausted, falling back to A=2^24";
    return std::pow(2.0, 24);
}

SolverReport solve(const PrescribedMeasure& mu, const Weight& w,
                   const SolverConfig& config) {
    SolverReport rep;
    rep.admissibility = check_admissible(mu);
    if (!rep.admissibility.ok()) return rep;

    double A = config.A;
    if (!(A > 0)) A = choose_A(mu, w, config, &rep.chose_A_note);
    rep.A = A;
    rep.scale = mu.total / A;

    const int n = config.primal.dim;
    const double q = w.q;
    const double cn = std::pow(q / sphere_area(n), 1.0 / q);

    // Gamma witness start: chi = ln A + c_n |x| (feasible by construction).
    GridFn chi(config.primal);
    for (std::size_t f = 0; f < chi.values.size(); ++f) {
        Vec x = config.primal.point(config.primal.unflat(f));
        chi.values[f] = std::log(A) + cn * norm(x);
    }
    chi.symmetrize_even();
    chi = project_iterate(chi, w, A, config);

    double atom_radius = 0.0;
    for (const auto& y : mu.mu.points) atom_radius = std::max(atom_radius, norm(y));
    TestFunctionDictionary dict = TestFunctionDictionary::make(
        n, std::max(atom_radius, 1.0), config.dict_bumps, config.seed);

    const double tol_abs = config.tol_rel * mu.total;
    double step = config.step0;
    int stagnant = 0;

    ObjectiveValue cur = objective(chi, mu, w, config);
    for (int it = 0; it < config.max_iters; ++it) {
        rep.iterations = it + 1;
        rep.J_trace.push_back(cur.J);
        rep.constraint_trace.push_back(cur.constraint);

        EuclideanMeasure approx = cur.pushforward;
        const double scale = mu.total / cur.constraint;
        for (auto& wt : approx.weights) wt *= scale;
        double resid = discrepancy(mu.mu, approx, dict);
        rep.residual_trace.push_back(resid);
        rep.residual = resid;
        rep.gradient_norm = resid;
        if (resid <= tol_abs) {
            rep.converged = true;
            break;
        }

        // Mass-preconditioned direction (the measure equation in nodal form
        // is mu_j = push_j, so g_j / mass_j is the natural relative misfit),
        // normalized so that the trajectory for c.mu is the trajectory for mu.
        std::vector<double> dir(cur.gradient.size());
        double mass_floor = 1e-6 * mu.total;
        for (std::size_t j = 0; j < dir.size(); ++j)
            dir[j] = cur.gradient[j] / (cur.mass[j] + mass_floor);
        double dirmax = 0.0, gdot = 0.0;
        for (std::size_t j = 0; j < dir.size(); ++j) {
            dirmax = std::max(dirmax, std::abs(dir[j]));
            gdot += dir[j] * cur.gradient[j];
        }
        if (!(dirmax > 0) || !(gdot > 0)) break;
        const double gnorm = gdot / dirmax;  // descent rate per unit sup-step

        bool accepted = false;
        double s = step;
        for (int bt = 0; bt < config.max_backtracks; ++bt) {
            GridFn trial(config.primal);
            trial.values = chi.values;
            for (std::size_t j = 0; j < trial.values.size(); ++j)
                trial.values[j] -= s * dir[j] / dirmax;
            GridFn proj = project_iterate(trial, w, A, config);
            ObjectiveValue cand;
            try {
                cand = objective(proj, mu, w, config);
            } catch (const std::runtime_error&) {
                s *= config.backtrack;
                continue;
            }
            if (cand.J <= cur.J - config.armijo * s * gnorm + 1e-12) {
                double drop = cur.J - cand.J;
                chi = std::move(proj);
                cur = std::move(cand);
                step = s * 2.0;
                accepted = true;
                stagnant = (drop <= 1e-12 * (1.0 + std::abs(cur.J))) ? stagnant + 1 : 0;
                break;
            }
            s *= config.backtrack;
        }
        if (!accepted || stagnant >= 5) break;  // stationary within resolution
    }

    rep.chi0 = chi;
    rep.phi0_star = conjugate_grid(chi, config.dual, true);
    rep.solution_flags = check_variational_hypotheses(iterate_function(rep.phi0_star));
    return rep;
}

} // namespace dcm
