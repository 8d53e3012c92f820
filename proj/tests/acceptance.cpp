// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Tolerances are pinned in code; runtimes are reported where bounded.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "nshs/harness.hpp"
#include "nshs/io.hpp"
#include "nshs/kernels.hpp"
#include "nshs/norms.hpp"
#include "nshs/solvers.hpp"
#include "nshs/verify.hpp"
#include "oracles.hpp"

using namespace nshs;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Shared acceptance instance: nu=0.05, K=8, ny=129, bump datum.
RunConfig acceptance_config() {
    RunConfig cfg;
    cfg.nu = 0.05;
    cfg.mu0 = 0.1;
    cfg.gamma = 0.4;
    cfg.kmax = 8;
    cfg.ny = 129;
    cfg.ymax = 8.0;
    cfg.dt = 2e-3;
    cfg.tfinal = 0.1;
    cfg.amplitude = 1.0;
    cfg.family = DatumFamily::Bump;
    return cfg;
}

void criterion_1_solver_cross_validation() {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = acceptance_config();
    auto grid = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, grid);

    Trajectory tm = run(cfg, datum, SolverKind::Mild);
    Trajectory td = run(cfg, datum, SolverKind::Direct);
    const double secs = seconds_since(t0);

    bool ok = tm.failure.empty() && td.failure.empty();
    double rel = 0.0;
    if (ok) {
        rel = VorticityState::l2_distance(tm.back(), td.back()) / td.back().l2_norm();
        ok = rel <= 1e-3 && secs <= 60.0;
    }
    report(1, ok, "mild vs direct solver cross-validation",
           "rel_L2=" + fmt(rel) + " tol=1e-3, runtime=" + fmt(secs) + "s <= 60s" +
               (tm.failure.empty() ? "" : " mild:" + tm.failure) +
               (td.failure.empty() ? "" : " direct:" + td.failure));
}

void criterion_2_linear_exactness() {
    RunConfig cfg = acceptance_config();
    cfg.kmax = 4;
    auto grid = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, grid);

    // (a) zero-forcing mild windows equal iterated kernel application.
    MildStepper mild(cfg, grid);
    VorticityState a = datum, b = datum;
    double diff = 0.0;
    for (int s = 0; s < 10; ++s) {
        a = mild.advance(a, cfg.dt, nullptr, /*force_linear=*/true);
        VorticityState next(b.K(), grid, b.time() + cfg.dt);
        for (int xi = -b.K(); xi <= b.K(); ++xi) {
            auto k = cached_green(xi, cfg.dt, cfg.nu, grid, cfg.kernel_substeps);
            next.mode(xi) = apply_kernel(*k, b.mode_field(xi)).values;
        }
        next.symmetrize();
        b = std::move(next);
        for (int xi = -b.K(); xi <= b.K(); ++xi)
            diff = std::max(diff, (a.mode(xi) - b.mode(xi)).cwiseAbs().maxCoeff());
    }
    const double scale = std::max(1e-300, a.max_abs());
    const bool ok_a = diff / scale <= 1e-6;

    // (b) xi=0 Neumann-limit heat against the closed form.
    RunConfig hc = cfg;
    hc.kmax = 0;
    hc.dt = 5e-4;
    const double T = 0.02;
    auto hgrid = make_solver_grid(hc);
    VorticityState heat(0, hgrid, 0.0);
    for (int i = 0; i < hgrid->size(); ++i) {
        const double y = hgrid->nodes()[i];
        heat.mode(0)[i] = std::exp(-(y - 2.0) * (y - 2.0) / 0.25);
    }
    DirectStepper stepper(hc, hgrid);
    VorticityState cur = heat;
    for (int s = 0; s < static_cast<int>(T / hc.dt); ++s) cur = stepper.advance(cur, hc.dt);
    const double widened = 0.25 + 4.0 * hc.nu * T;
    const double amp = std::sqrt(0.25 / widened);
    double herr = 0.0, hscale = 0.0;
    for (int i = 0; i < hgrid->size(); ++i) {
        const double y = hgrid->nodes()[i];
        const double exact = amp * (std::exp(-(y - 2.0) * (y - 2.0) / widened) +
                                    std::exp(-(y + 2.0) * (y + 2.0) / widened));
        hscale = std::max(hscale, std::abs(exact));
        herr = std::max(herr, std::abs(cur.mode(0)[i].real() - exact));
    }
    const bool ok_b = herr / hscale <= 1e-6;

    report(2, ok_a && ok_b, "linear exactness of the mild representation",
           "mild-vs-kernel=" + fmt(diff / scale) + " tol=1e-6, heat-vs-closed-form=" +
               fmt(herr / hscale) + " tol=1e-6");
}

void criterion_3_kernel_structure() {
    InequalityReport rep = check_kernel_bounds(true);
    report(3, rep.pass, "residual kernel structure and envelope", rep.note);
}

void criterion_4_appendix_identities() {
    InequalityReport rep = check_int_t();
    report(4, rep.pass, "time-integral identities and fitted constants", rep.note);
}

void criterion_5_analyticity_recovery() {
    RunConfig cfg = acceptance_config();
    InequalityReport rep = check_recovery(cfg);
    report(5, rep.pass, "analyticity recovery constants", rep.note);
}

void criterion_6_weight_battery() {
    InequalityReport rep = check_weight_properties();
    report(6, rep.pass, "boundary-layer weight battery", rep.note);
}

ConvergenceTable sweep_table;
double sweep_seconds = 0.0;

void criterion_7_dissipation_scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = acceptance_config();
    cfg.kmax = 8;
    cfg.ny = 161;
    cfg.dt = 1e-3;
    cfg.tfinal = 0.1;
    cfg.amplitude = 1.0;
    cfg.compatible = true;
    sweep_table = run_convergence(cfg, {4e-3, 2e-3, 1e-3, 5e-4});
    sweep_seconds = seconds_since(t0);

    bool ok = sweep_table.failures.empty() && sweep_table.rows.size() == 4;
    std::string detail;
    if (ok) {
        for (size_t i = 1; i < sweep_table.rows.size(); ++i) {
            const double ratio = sweep_table.rows[i].dissipation / sweep_table.rows[i - 1].dissipation;
            detail += (i > 1 ? "," : "ratios=") + fmt(ratio);
            const double target = 1.0 / std::sqrt(2.0);
            if (std::abs(ratio - target) > 0.2 * target) ok = false;
        }
        detail += " target=0.707+-20%, runtime=" + fmt(sweep_seconds) + "s <= 900s";
        if (sweep_seconds > 900.0) ok = false;
    } else {
        for (const auto& f : sweep_table.failures) detail += f + "; ";
    }
    report(7, ok, "dissipation scales as sqrt(nu) across the sweep", detail);
}

void criterion_8_inviscid_limit() {
    bool ok = sweep_table.failures.empty() && sweep_table.rows.size() == 4;
    std::string detail;
    if (ok) {
        for (size_t i = 1; i < sweep_table.rows.size(); ++i)
            if (sweep_table.rows[i].sup_dist >= sweep_table.rows[i - 1].sup_dist) ok = false;
        detail = "monotone=" + std::string(ok ? "yes" : "no") +
                 " slope=" + fmt(sweep_table.slope) + " window=[0.4,0.6]";
        if (!(sweep_table.slope >= 0.4 && sweep_table.slope <= 0.6)) ok = false;
    }
    report(8, ok, "inviscid-limit distances shrink with empirical slope", detail);
}

void criterion_9_norm_boundedness() {
    RunConfig cfg = acceptance_config();
    cfg.kmax = 6;
    cfg.ny = 129;
    cfg.dt = 2e-3;
    cfg.amplitude = 0.5;
    cfg.compatible = true;

    GammaSearchResult res = gamma_search(cfg, {0.5, 1.0, 2.0, 4.0, 8.0});
    bool ok = res.found && res.sup_ratio <= 3.0;
    std::string detail = res.found
                             ? "gamma=" + fmt(res.gamma) + " T=" + fmt(res.horizon) +
                                   " sup/initial=" + fmt(res.sup_ratio)
                             : "no gamma passed";
    if (ok) {
        RunConfig big = cfg;
        big.amplitude = 2.0 * cfg.amplitude;
        GammaSearchResult res2 = gamma_search(big, {0.5, 1.0, 2.0, 4.0, 8.0});
        const bool mono = !res2.found || res2.gamma >= res.gamma;
        detail += ", doubled-amplitude gamma=" + (res2.found ? fmt(res2.gamma) : "none");
        ok = ok && mono;
    }
    report(9, ok, "triple-norm boundedness with searched gamma", detail);
}

void criterion_10_structural_invariants() {
    RunConfig cfg = acceptance_config();
    cfg.kmax = 6;
    cfg.ny = 129;
    cfg.dt = 1e-3;
    cfg.tfinal = 0.05;
    cfg.amplitude = 0.5;
    cfg.compatible = true;
    auto grid = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, grid);

    bool ok = true;
    std::string detail;

    // divergence, curl, wall condition on the evolved state
    Trajectory traj = run(cfg, datum, SolverKind::Direct);
    ok = ok && traj.failure.empty();
    VelocityState v = velocity(traj.back());
    const double div = divergence_residual(v);
    const double curl = curl_residual(v, traj.back());
    double u2wall = 0.0;
    for (int xi = -cfg.kmax; xi <= cfg.kmax; ++xi)
        u2wall = std::max(u2wall, std::abs(v.u2_mode(xi)[0]));
    ok = ok && div <= 1e-8 && curl <= 1e-6 && u2wall == 0.0;
    detail += "div=" + fmt(div) + " curl=" + fmt(curl) + " u2(0)=" + fmt(u2wall);

    // compatibility conservation relative to the triple norm
    Norms norms(cfg, grid);
    const double scale = norms.triple_norm(traj.back()).triple;
    double compat = 0.0;
    for (const auto& d : traj.diagnostics) compat = std::max(compat, d.compat_max);
    ok = ok && compat <= 1e-6 * scale;
    detail += " compat=" + fmt(compat) + "<=1e-6*" + fmt(scale);

    // Euler conservation over [0, 0.5]
    RunConfig ecfg = cfg;
    ecfg.gamma = 0.09;
    ecfg.tfinal = 0.5;
    ecfg.dt = 2e-3;
    Trajectory etraj = run(ecfg, make_datum(ecfg, grid), SolverKind::Euler);
    ok = ok && etraj.failure.empty();
    if (etraj.failure.empty()) {
        const double e0 = etraj.diagnostics.front().energy;
        const double z0 = etraj.diagnostics.front().enstrophy;
        double ed = 0.0, zd = 0.0;
        for (const auto& d : etraj.diagnostics) {
            ed = std::max(ed, std::abs(d.energy - e0) / e0);
            zd = std::max(zd, std::abs(d.enstrophy - z0) / z0);
        }
        ok = ok && ed <= 1e-5 && zd <= 1e-4;
        detail += " euler_dE=" + fmt(ed) + " dZ=" + fmt(zd);
    } else {
        detail += " euler:" + etraj.failure;
    }

    // bitwise reproducibility through checkpoint hashes
    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "nshs_acceptance";
    fs::create_directories(tmp);
    Trajectory r1 = run(cfg, datum, SolverKind::Direct);
    Trajectory r2 = run(cfg, datum, SolverKind::Direct);
    write_checkpoint(tmp / "a.nshs", r1);
    write_checkpoint(tmp / "b.nshs", r2);
    const bool bitwise = file_sha256(tmp / "a.nshs") == file_sha256(tmp / "b.nshs");
    fs::remove_all(tmp);
    ok = ok && bitwise;
    detail += std::string(" bitwise=") + (bitwise ? "yes" : "no");

    report(10, ok, "structural invariants suite", detail);
}

}  // namespace

int main() {
    std::printf("nshs acceptance suite\n");
    criterion_1_solver_cross_validation();
    criterion_2_linear_exactness();
    criterion_3_kernel_structure();
    criterion_4_appendix_identities();
    criterion_5_analyticity_recovery();
    criterion_6_weight_battery();
    criterion_7_dissipation_scaling();
    criterion_8_inviscid_limit();
    criterion_9_norm_boundedness();
    criterion_10_structural_invariants();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 2;
    }
    std::printf("all criteria passed\n");
    return 0;
}
