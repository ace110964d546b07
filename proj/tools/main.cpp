// dcmkit: dual curvature measures of log-concave functions and convex
// bodies, variational-formula checks, and the even functional dual Minkowski
// solver.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcm/acceptance.hpp"
#include "dcm/dual_curvature.hpp"
#include "dcm/io.hpp"
#include "dcm/parallel.hpp"
#include "dcm/solver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kNumericalError = 3;

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::fputs(content.c_str(), stdout);
    else
        dcm::write_file(path, content);
}

dcm::QuadratureSpec quad_from(int cells, double box, double rho0) {
    dcm::QuadratureSpec spec;
    if (cells > 0) spec.cells_per_axis = cells;
    if (box > 0) spec.box_radius = box;
    if (rho0 > 0) spec.rho0 = rho0;
    return spec;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

dcm::JVal flags_json(const dcm::HypothesisFlags& h) {
    dcm::JVal o = dcm::JVal::obj();
    o.set("max_at_origin", dcm::JVal::boolean(h.max_at_origin));
    o.set("shell_ok", dcm::JVal::boolean(h.shell_ok));
    o.set("shell_ratio_early", dcm::JVal::num(h.shell_ratio_early));
    o.set("shell_ratio_late", dcm::JVal::num(h.shell_ratio_late));
    o.set("level_rr_ok", dcm::JVal::boolean(h.level_rr_ok));
    o.set("level_rr_max", dcm::JVal::num(h.level_rr_max));
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual curvature measure toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // parent options (e.g. --threads) after the subcommand
    app.set_config("--config", "", "config file; flags take precedence");

    int threads = 1;
    if (const char* env = std::getenv("DCMKIT_THREADS")) threads = std::atoi(env);
    app.add_option("--threads", threads, "worker thread hint");

    // shared option storage
    std::string fn_path, f_path, g_path, body_path, mu_path, out_path, out_csv;
    double q = 2.0, t = 0.5, A = -1.0, tol = 0.05, box = -1.0, rho0 = -1.0;
    double target_R = 4.0;
    int target_N = 129, cells = -1, grid_res = 64, max_iter = 500, s_levels = 200;
    std::uint64_t seed = 0;
    std::string t_list = "0.1,0.05,0.025";

    auto* conj = app.add_subcommand("conjugate", "Legendre-Fenchel conjugate");
    conj->add_option("--fn", fn_path, "function descriptor JSON")->required();
    conj->add_option("--R", target_R, "dual box radius");
    conj->add_option("--N", target_N, "dual nodes per axis (odd)");
    conj->add_option("-o,--out", out_path, "output path (stdout when empty)");

    auto* supconv = app.add_subcommand("supconv", "sup-convolution f (+) t.g");
    supconv->add_option("--f", f_path)->required();
    supconv->add_option("--g", g_path)->required();
    supconv->add_option("--t", t)->required();
    supconv->add_option("-o,--out", out_path);

    auto* mom = app.add_subcommand("moment", "(q-n)-th moment of f");
    mom->add_option("--fn", fn_path)->required();
    mom->add_option("--q", q)->required();
    mom->add_option("--cells", cells);
    mom->add_option("--box", box);
    mom->add_option("--rho0", rho0);
    mom->add_option("-o,--out", out_path);

    auto* tv = app.add_subcommand("tv", "anisotropic weighted total variation");
    tv->add_option("--f", f_path)->required();
    tv->add_option("--L", body_path)->required();
    tv->add_option("--q", q)->required();
    tv->add_option("--cells", cells);
    tv->add_option("-o,--out", out_path);

    auto* co = app.add_subcommand("coarea", "coarea route for the weighted TV");
    co->add_option("--f", f_path)->required();
    co->add_option("--L", body_path)->required();
    co->add_option("--q", q)->required();
    co->add_option("--s-levels", s_levels);
    co->add_option("-o,--out", out_path);

    auto* body = app.add_subcommand("body", "convex-body report (Vq, radii, polar)");
    body->add_option("--body", body_path)->required();
    body->add_option("--q", q);
    body->add_option("--polar-out", out_csv, "write the polar body JSON here");
    body->add_option("-o,--out", out_path);

    auto* dc = app.add_subcommand("dualcurv", "dual curvature measures of f");
    dc->add_option("--f", f_path)->required();
    dc->add_option("--q", q)->required();
    dc->add_option("--cells", cells);
    std::string eucl_csv, sph_csv;
    dc->add_option("--euclidean-csv", eucl_csv);
    dc->add_option("--spherical-csv", sph_csv);
    dc->add_option("-o,--out", out_path);

    auto* vc = app.add_subcommand("varcheck", "variational-formula verification");
    vc->add_option("--f", f_path)->required();
    vc->add_option("--g", g_path)->required();
    vc->add_option("--q", q)->required();
    vc->add_option("--t-list", t_list);
    vc->add_option("-o,--out", out_path);

    auto* mk = app.add_subcommand("minkowski", "even functional dual Minkowski solver");
    mk->add_option("--mu", mu_path)->required();
    mk->add_option("--q", q)->required();
    mk->add_option("--A", A, "constraint level (<= 0 selects choose_A)");
    mk->add_option("--grid-res", grid_res, "cells per axis for the unknown");
    mk->add_option("--max-iter", max_iter);
    mk->add_option("--tol", tol, "residual tolerance as a fraction of |mu|");
    mk->add_option("--seed", seed);
    std::string chi_out;
    mk->add_option("--chi-out", chi_out, "write the final iterate grid JSON");
    mk->add_option("-o,--out", out_path);

    auto* st = app.add_subcommand("selftest", "run the acceptance suite");
    std::string st_out;
    st->add_option("--out", st_out, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        dcm::set_thread_count(threads);

        if (conj->parsed()) {
            auto rep = dcm::parse_function_json(dcm::read_file(fn_path));
            dcm::GridSpec tgt(rep.dim, target_R, target_N);
            auto st_rep = dcm::conjugate(rep, tgt);
            emit(out_path, dcm::function_to_json(st_rep).dump() + "\n");
            return kOk;
        }
        if (supconv->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(f_path));
            auto g = dcm::parse_log_concave_json(dcm::read_file(g_path));
            auto ft = dcm::sup_convolve(f, g, t);
            emit(out_path, dcm::log_concave_to_json(ft).dump() + "\n");
            return kOk;
        }
        if (mom->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(fn_path));
            double v = dcm::moment(f, dcm::Weight::power(q), quad_from(cells, box, rho0));
            dcm::JVal o = dcm::JVal::obj();
            o.set("q", dcm::JVal::num(q));
            o.set("value", dcm::JVal::num(v));
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (tv->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(f_path));
            auto L = dcm::parse_body_json(dcm::read_file(body_path));
            auto res = dcm::weighted_tv(f, L, dcm::Weight::power(q),
                                        quad_from(cells, box, rho0));
            dcm::JVal o = dcm::JVal::obj();
            o.set("bulk", dcm::JVal::num(res.bulk));
            o.set("boundary", dcm::JVal::num(res.boundary));
            o.set("total", dcm::JVal::num(res.total));
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (co->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(f_path));
            auto L = dcm::parse_body_json(dcm::read_file(body_path));
            dcm::QuadratureSpec spec = quad_from(cells, box, rho0);
            spec.coarea_levels = s_levels;
            double v = dcm::coarea_tv(f, L, dcm::Weight::power(q), spec);
            dcm::JVal o = dcm::JVal::obj();
            o.set("q", dcm::JVal::num(q));
            o.set("value", dcm::JVal::num(v));
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (body->parsed()) {
            auto K = dcm::parse_body_json(dcm::read_file(body_path));
            dcm::JVal o = dcm::JVal::obj();
            o.set("dim", dcm::JVal::num(K.dim));
            o.set("q", dcm::JVal::num(q));
            o.set("dual_quermass", dcm::JVal::num(dcm::dual_quermass(K, q)));
            o.set("normalized_dual_quermass",
                  dcm::JVal::num(dcm::normalized_dual_quermass(K, q)));
            auto [rin, rout] = dcm::inradius_circumradius(K);
            o.set("inradius", dcm::JVal::num(rin));
            o.set("circumradius", dcm::JVal::num(rout));
            o.set("origin_interior", dcm::JVal::boolean(K.origin_interior));
            o.set("origin_symmetric", dcm::JVal::boolean(K.origin_symmetric));
            if (!out_csv.empty())
                dcm::write_file(out_csv, dcm::body_to_json(K.polar()).dump() + "\n");
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (dc->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(f_path));
            dcm::QuadratureSpec spec = quad_from(cells, box, rho0);
            auto em = dcm::euclidean_dcm(f, dcm::Weight::power(q), spec);
            auto sm = dcm::spherical_dcm(f, dcm::Weight::power(q), spec);
            if (!eucl_csv.empty()) dcm::write_file(eucl_csv, dcm::measure_to_csv(em));
            if (!sph_csv.empty()) dcm::write_file(sph_csv, dcm::spherical_to_csv(sm));
            dcm::JVal o = dcm::JVal::obj();
            o.set("euclidean_total", dcm::JVal::num(em.total_mass()));
            o.set("euclidean_first_moment", dcm::JVal::num(em.first_moment()));
            o.set("spherical_total", dcm::JVal::num(sm.total_mass()));
            o.set("spherical_atoms", dcm::JVal::num(
                                         static_cast<double>(sm.weights.size())));
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (vc->parsed()) {
            auto f = dcm::parse_log_concave_json(dcm::read_file(f_path));
            auto g = dcm::parse_log_concave_json(dcm::read_file(g_path));
            dcm::QuadratureSpec spec = quad_from(cells, box, rho0);
            dcm::Weight w = dcm::Weight::power(q);
            auto lhs = dcm::variational_lhs(f, g, w, parse_list(t_list), spec);
            double rhs = dcm::variational_rhs(f, g, w, spec);
            dcm::JVal o = dcm::JVal::obj();
            o.set("q", dcm::JVal::num(q));
            o.set("lhs", dcm::JVal::num(lhs.extrapolated));
            dcm::JVal qs = dcm::JVal::arr(), tsj = dcm::JVal::arr();
            for (double v : lhs.quotients) qs.push(dcm::JVal::num(v));
            for (double v : lhs.ts) tsj.push(dcm::JVal::num(v));
            o.set("lhs_quotients", std::move(qs));
            o.set("lhs_ts", std::move(tsj));
            o.set("rhs", dcm::JVal::num(rhs));
            dcm::JVal rel = dcm::JVal::obj();
            auto re = [](double a, double b) {
                double d = std::max(std::abs(a), std::abs(b));
                return d > 0 ? std::abs(a - b) / d : 0.0;
            };
            rel.set("lhs_vs_rhs", dcm::JVal::num(re(lhs.extrapolated, rhs)));
            bool plain_ind = g.phi.kind == dcm::ConvexFunctionRep::Kind::BodyIndicator &&
                             g.phi.offset == 0.0;
            if (plain_ind) {
                double lc = dcm::layer_cake_delta(f, *g.support, w, spec);
                o.set("layer_cake", dcm::JVal::num(lc));
                rel.set("lhs_vs_layer_cake", dcm::JVal::num(re(lhs.extrapolated, lc)));
                rel.set("rhs_vs_layer_cake", dcm::JVal::num(re(rhs, lc)));
            } else {
                o.set("layer_cake", dcm::JVal());
            }
            o.set("rel_errors", std::move(rel));
            o.set("hypothesis_flags", flags_json(lhs.flags));
            emit(out_path, o.dump() + "\n");
            return kOk;
        }
        if (mk->parsed()) {
            auto mu = dcm::PrescribedMeasure::from_measure(
                dcm::parse_measure_json(dcm::read_file(mu_path)));
            dcm::SolverConfig cfg;
            double R = 8.0;
            for (const auto& p : mu.mu.points) R = std::max(R, dcm::norm(p) * 1.1);
            int nodes = grid_res + 1 + (grid_res % 2);  // odd node count
            cfg.primal = dcm::GridSpec(mu.mu.dim, R, nodes);
            cfg.dual = dcm::GridSpec(mu.mu.dim, R, 2 * nodes - 1);
            cfg.A = A;
            cfg.max_iters = max_iter;
            cfg.tol_rel = tol;
            cfg.seed = seed;
            dcm::SolverReport rep = dcm::solve(mu, dcm::Weight::power(q), cfg);

            dcm::JVal o = dcm::JVal::obj();
            o.set("q", dcm::JVal::num(q));
            o.set("converged", dcm::JVal::boolean(rep.converged));
            o.set("iterations", dcm::JVal::num(rep.iterations));
            o.set("A", dcm::JVal::num(rep.A));
            o.set("scale", dcm::JVal::num(rep.scale));
            o.set("residual", dcm::JVal::num(rep.residual));
            o.set("mu_total", dcm::JVal::num(mu.total));
            o.set("mu_first_moment", dcm::JVal::num(mu.first_moment));
            dcm::JVal adm = dcm::JVal::obj();
            adm.set("ok", dcm::JVal::boolean(rep.admissibility.ok()));
            adm.set("even", dcm::JVal::boolean(rep.admissibility.even));
            adm.set("not_concentrated",
                    dcm::JVal::boolean(rep.admissibility.not_concentrated));
            dcm::JVal rejs = dcm::JVal::arr();
            for (const auto& s : rep.admissibility.rejections)
                rejs.push(dcm::JVal::str(s));
            adm.set("rejections", std::move(rejs));
            o.set("admissibility", std::move(adm));
            dcm::JVal jt = dcm::JVal::arr(), rt = dcm::JVal::arr();
            for (double v : rep.J_trace) jt.push(dcm::JVal::num(v));
            for (double v : rep.residual_trace) rt.push(dcm::JVal::num(v));
            o.set("J_trace", std::move(jt));
            o.set("residual_trace", std::move(rt));
            o.set("chose_A_note", dcm::JVal::str(rep.chose_A_note));
            o.set("hypothesis_flags", flags_json(rep.solution_flags));
            if (!chi_out.empty() && !rep.chi0.values.empty()) {
                auto fphi = dcm::ConvexFunctionRep::grid_sampled(rep.chi0, true, false);
                dcm::write_file(chi_out, dcm::function_to_json(fphi).dump() + "\n");
            }
            emit(out_path, o.dump() + "\n");
            if (!rep.admissibility.ok()) return kValidationError;
            if (!rep.converged) return kNumericalError;
            return kOk;
        }
        if (st->parsed()) {
            dcm::AcceptanceOptions opts;
            opts.threads = threads;
            opts.out_dir = st_out;
            auto results = dcm::run_acceptance(opts);
            std::fputs(dcm::format_acceptance_table(results).c_str(), stdout);
            bool all = true;
            for (const auto& c : results) all = all && c.pass;
            std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
            return all ? kOk : kNumericalError;
        }
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kValidationError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericalError;
    }
    return kValidationError;
}
