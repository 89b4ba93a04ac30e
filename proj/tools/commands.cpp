#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>

#include "ptint/greens.hpp"
#include "ptint/shooting.hpp"
#include "ptint/variational.hpp"
#include "ptint/verify.hpp"

namespace ptint::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

void write_common(const io::RunConfig& cfg)
{
    const fs::path out(cfg.output);
    io::write_text_atomic(out / "config.ini", cfg.to_text().str());
    io::write_text_atomic(out / "versions.txt", io::versions_stamp());
}

json header(const char* command, const io::RunConfig& cfg)
{
    json j;
    j["command"] = command;
    j["params"] = io::to_json(cfg.params);
    return j;
}

int reject(const char* command, const io::RunConfig& cfg, const std::string& what)
{
    json j = header(command, cfg);
    j["rejected"] = what;
    io::write_json(fs::path(cfg.output) / (std::string(command) + ".json"), j);
    std::cerr << command << ": rejected: " << what << '\n';
    return 2;
}

// Largest |a| among the zero_count = k separators (the family reaching q = 0).
const BranchPoint* pick_family(const std::vector<BranchPoint>& pts, int k)
{
    const BranchPoint* best = nullptr;
    for (const auto& p : pts)
        if (p.zero_count == k && p.certified && (!best || std::abs(p.a) > std::abs(best->a))) best = &p;
    return best;
}

}  // namespace

int cmd_spectrum(const io::RunConfig& cfg)
{
    write_common(cfg);
    const Params& p = cfg.params;
    json j = header("spectrum", cfg);
    const double la = lambda_alpha(p);
    j["lambda_alpha"] = la;
    int status = 0;
    try {
        j["beta"] = beta(p, p.lambda);
    } catch (const std::domain_error& e) {
        j["beta"] = nullptr;
        j["beta_error"] = e.what();
        std::cerr << "spectrum: " << e.what() << '\n';
        status = 2;
    }
    if (la > 0) {
        j["eigenvalue"] = -la;
        j["eigenfunction"] = {{"l2_norm", green_norm(p.d, la, 2.0)},
                              {"l2_norm_closed_form", p.d == 2 ? 1.0 / std::sqrt(4 * kPi * la)
                                                               : 1.0 / std::sqrt(8 * kPi * std::sqrt(la))},
                              {"beta_at_lambda_alpha", beta(p, la)}};
    } else {
        j["eigenvalue"] = nullptr;
    }
    j["lambda_above_threshold"] = p.lambda > la;
    io::write_json(fs::path(cfg.output) / "spectrum.json", j);
    std::cout << "lambda_alpha = " << format_double(la);
    if (j["beta"].is_number()) std::cout << "  beta = " << format_double(j["beta"].get<double>());
    std::cout << '\n';
    return status;
}

int cmd_solve(const io::RunConfig& cfg)
{
    write_common(cfg);
    const Params& p = cfg.params;
    BranchPoint pt;
    try {
        if (cfg.mode == "ground") {
            pt = ground_state_shoot(p, cfg.shoot);
        } else if (cfg.mode == "nodal") {
            const FixedAlphaResult res = solve_fixed_alpha(p, cfg.k, cfg.shoot);
            if (!res.found) {
                std::cerr << "solve: " << res.message << '\n';
                json j = header("solve", cfg);
                j["found"] = false;
                j["message"] = res.message;
                io::write_json(fs::path(cfg.output) / "solve.json", j);
                return 1;
            }
            pt = res.point;
        } else {
            const auto pts = match_decay(p, cfg.q, cfg.shoot);
            const BranchPoint* best = pick_family(pts, cfg.k);
            if (!best) {
                std::cerr << "solve: no certified zero_count = " << cfg.k << " separator at q = " << cfg.q << '\n';
                json j = header("solve", cfg);
                j["found"] = false;
                j["candidates"] = pts.size();
                io::write_json(fs::path(cfg.output) / "solve.json", j);
                return 1;
            }
            pt = *best;
        }
    } catch (const ShootingRejected& e) {
        return reject("solve", cfg, e.what());
    } catch (const std::domain_error& e) {
        return reject("solve", cfg, e.what());
    }
    const VerificationReport rep = equivalence_report(pt, p, cfg.mode, cfg.verify);
    json j = header("solve", cfg);
    j["mode"] = cfg.mode;
    j["k"] = cfg.k;
    j["found"] = true;
    j["point"] = io::to_json(pt);
    j["verification"] = io::to_json(rep);
    io::write_json(fs::path(cfg.output) / "solve.json", j);
    io::write_profile_csv(fs::path(cfg.output) / "profile.csv", pt.profile);
    std::cout << rep.summary_line() << '\n';
    return pt.certified && rep.pass ? 0 : 1;
}

int cmd_branch_scan(const io::RunConfig& cfg, int workers)
{
    write_common(cfg);
    const Params& p = cfg.params;
    const auto qs = geometric_q_grid(cfg.q_lo, cfg.q_hi, cfg.q_points);
    std::vector<BranchRow> rows(qs.size());
    std::vector<VerificationReport> reps(qs.size());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(qs.size())));
    // rows are independent; results land in their slot so output order is fixed
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < qs.size(); i += static_cast<std::size_t>(workers)) {
            rows[i] = branch_scan(p, {qs[i]}, cfg.k, cfg.shoot).front();
            if (rows[i].ok) reps[i] = equivalence_report(rows[i].point, p, "q=" + format_double(qs[i]), cfg.verify);
        }
    };
    try {
        std::vector<std::future<void>> jobs;
        for (int w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work, std::size_t(w)));
        for (auto& f : jobs) f.get();
    } catch (const ShootingRejected& e) {
        return reject("branch_scan", cfg, e.what());
    }
    json j = header("branch_scan", cfg);
    j["k"] = cfg.k;
    json arr = json::array();
    bool all = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        json r;
        r["q"] = qs[i];
        r["ok"] = rows[i].ok;
        r["candidates"] = rows[i].candidates;
        if (rows[i].ok) {
            r["point"] = io::to_json(rows[i].point);
            r["verification"] = io::to_json(reps[i]);
            std::cout << reps[i].summary_line() << '\n';
            all = all && reps[i].pass;
        } else {
            r["error"] = rows[i].error;
            std::cout << "FAIL q=" << format_double(qs[i]) << ": " << rows[i].error << '\n';
            all = false;
        }
        arr.push_back(r);
    }
    j["rows"] = arr;
    io::write_json(fs::path(cfg.output) / "branch_scan.json", j);
    return all ? 0 : 1;
}

int cmd_crosscheck(const io::RunConfig& cfg)
{
    write_common(cfg);
    const Params& p = cfg.params;
    BranchPoint gs;
    MinimizeResult var;
    std::shared_ptr<const VarGrid> grid;
    try {
        gs = ground_state_shoot(p, cfg.shoot);
        grid = VarGrid::make(p.d, p.lambda, p.p, cfg.var_grid);
        var = minimize_ground_state(p, bump_seed(p, grid), cfg.minimize);
    } catch (const ShootingRejected& e) {
        return reject("crosscheck", cfg, e.what());
    } catch (const std::domain_error& e) {
        return reject("crosscheck", cfg, e.what());
    } catch (const std::invalid_argument& e) {
        return reject("crosscheck", cfg, e.what());
    }
    const DiscreteState shot = state_from_profile(gs.profile, grid);
    const auto uv = var.state.u_nodes();
    const auto us = shot.u_nodes();
    double sup = 0.0, scale = 0.0;
    for (std::size_t i = 1; i < uv.size(); ++i) {
        sup = std::max(sup, std::abs(uv[i] - us[i]));
        scale = std::max(scale, std::abs(us[i]));
    }
    const double sup_rel = sup / scale;
    const double act_rel = std::abs(var.report.action - gs.action) / std::abs(gs.action);
    const bool ok = var.converged && sup_rel <= cfg.crosscheck_sup_tol && act_rel <= cfg.crosscheck_action_tol;

    json j = header("crosscheck", cfg);
    j["shooting"] = io::to_json(gs);
    j["variational"] = io::to_json(var);
    j["variational"]["nodes"] = grid->nodes();
    j["sup_discrepancy"] = {{"absolute", sup}, {"relative", sup_rel}, {"tolerance", cfg.crosscheck_sup_tol}};
    j["action_discrepancy"] = {{"relative", act_rel}, {"tolerance", cfg.crosscheck_action_tol}};
    j["pass"] = ok;
    io::write_json(fs::path(cfg.output) / "crosscheck.json", j);
    io::write_profile_csv(fs::path(cfg.output) / "profile.csv", gs.profile);
    std::cout << (ok ? "PASS" : "FAIL") << " crosscheck: sup_rel=" << format_double(sup_rel)
              << " action_rel=" << format_double(act_rel) << " S_shoot=" << format_double(gs.action)
              << " S_var=" << format_double(var.report.action) << '\n';
    return ok ? 0 : 1;
}

int cmd_probe_geometry(const io::RunConfig& cfg)
{
    write_common(cfg);
    const Params& p = cfg.params;
    GeometryReport rep;
    try {
        const auto grid = VarGrid::make(p.d, p.lambda, p.p, cfg.var_grid);
        const auto dirs = random_directions(grid, cfg.directions, cfg.seed);
        std::vector<double> radii;
        for (int i = 0; i <= 24; ++i) radii.push_back(1e-3 * std::pow(10.0, i / 6.0));
        rep = mountain_pass_probe(p, dirs, radii);
    } catch (const std::domain_error& e) {
        return reject("probe_geometry", cfg, e.what());
    } catch (const std::invalid_argument& e) {
        return reject("probe_geometry", cfg, e.what());
    }
    json j = header("probe_geometry", cfg);
    j["seed"] = cfg.seed;
    j["geometry"] = io::to_json(rep);
    const bool ok = rep.small_sphere_positive && rep.all_rays_negative;
    j["pass"] = ok;
    io::write_json(fs::path(cfg.output) / "probe_geometry.json", j);
    std::cout << (ok ? "PASS" : "FAIL") << " probe-geometry: rho*=" << format_double(rep.rho_star)
              << " non_normalizable=" << rep.non_normalizable
              << " all_rays_negative=" << (rep.all_rays_negative ? "true" : "false") << '\n';
    return ok ? 0 : 1;
}

int cmd_verify(const io::RunConfig& cfg, const std::string& profile_path)
{
    write_common(cfg);
    Params p = cfg.params;
    BranchPoint pt;
    try {
        if (profile_path.empty()) {
            p.nonlinear = false;
            const auto pts = match_decay(p, 1.0, cfg.shoot);
            if (pts.empty()) return reject("verify", cfg, "no decaying linear solution at q = 1");
            pt = pts.front();
        } else {
            pt.profile = io::read_profile_csv(profile_path);
            const double r0 = pt.profile.grid.radii.front();
            pt.q = (pt.profile.u.front() - pt.profile.f.front()) / green(p.d, p.lambda, r0);
            const double f_r0 = pt.profile.f.front();
            if (effective_regime(p) == Regime::Strong) {
                pt.a = f_r0;
                for (int i = 0; i < 3; ++i) pt.a = f_r0 - regular_term(p, pt.q, pt.a, r0).value;
            } else {
                const LocalExpansion ex = local_expansion(p, pt.q, 0.0);
                pt.a = f_r0 - ex.A * ex.s(r0);
            }
            pt.outcome.kind = OutcomeKind::Decay;
            finalize_point(pt, p);
            // the relation is checked against the configured extension
            if (pt.alpha_kind == AlphaKind::Finite && p.alpha.is_finite()) pt.alpha = p.alpha.value();
        }
    } catch (const std::exception& e) {
        return reject("verify", cfg, e.what());
    }
    const VerificationReport rep = equivalence_report(pt, p, profile_path.empty() ? "green" : profile_path, cfg.verify);
    json j = header("verify", cfg);
    j["point"] = io::to_json(pt);
    j["verification"] = io::to_json(rep);
    io::write_json(fs::path(cfg.output) / "verify.json", j);
    if (profile_path.empty()) io::write_profile_csv(fs::path(cfg.output) / "profile.csv", pt.profile);
    std::cout << rep.summary_line() << '\n';
    return rep.pass ? 0 : 1;
}

}  // namespace ptint::cli
