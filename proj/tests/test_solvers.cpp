#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nshs/kernels.hpp"
#include "nshs/norms.hpp"
#include "nshs/solvers.hpp"
#include "oracles.hpp"

using namespace nshs;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.nu = 0.05;
    cfg.mu0 = 0.1;
    cfg.gamma = 1.0;
    cfg.kmax = 4;
    cfg.ny = 97;
    cfg.ymax = 8.0;
    cfg.dt = 1e-3;
    cfg.tfinal = 0.02;
    cfg.amplitude = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("direct solver: zero datum stays zero; Neumann heat matches closed form") {
    RunConfig cfg = small_config();
    cfg.ny = 129;
    auto g = make_solver_grid(cfg);

    DirectStepper direct(cfg, g);
    VorticityState zero(cfg.kmax, g, 0.0);
    VorticityState z1 = direct.advance(zero, cfg.dt);
    CHECK(z1.max_abs() == 0.0);

    // xi=0 Gaussian: shear flow, so N=0 and the Robin row degenerates to
    // Neumann; compare against the half-line image closed form.
    VorticityState heat(0, g, 0.0);
    for (int i = 0; i < g->size(); ++i) {
        const double y = g->nodes()[i];
        heat.mode(0)[i] = std::exp(-(y - 2.0) * (y - 2.0) / 0.25);
    }
    DirectStepper stepper(cfg, g);
    VorticityState cur = heat;
    const double dt = 5e-4, T = 0.02;
    const int steps = static_cast<int>(T / dt);
    for (int s = 0; s < steps; ++s) cur = stepper.advance(cur, dt);

    // closed form: Gaussian convolved with the image kernel; the datum tail
    // below y=0 is e^{-16}, under the comparison tolerance.
    const double a = 0.25, widened = a + 4.0 * cfg.nu * T;
    const double amp = std::sqrt(a / widened);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < g->size(); ++i) {
        const double y = g->nodes()[i];
        const double exact = amp * (std::exp(-(y - 2.0) * (y - 2.0) / widened) +
                                    std::exp(-(y + 2.0) * (y + 2.0) / widened));
        scale = std::max(scale, std::abs(exact));
        err = std::max(err, std::abs(cur.mode(0)[i].real() - exact));
    }
    CHECK(err < 1e-6 * scale);
}

TEST_CASE("direct solver discrete energy balance") {
    RunConfig cfg = small_config();
    cfg.amplitude = 0.3;
    cfg.ny = 129;
    cfg.dt = 5e-4;
    // the dissipation identity carries no boundary work only for no-slip
    // compatible data
    cfg.compatible = true;
    auto g = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, g);

    Trajectory traj = run(cfg, datum, SolverKind::Direct);
    REQUIRE(traj.failure.empty());
    const auto& d = traj.diagnostics;
    REQUIRE(d.size() >= 3);
    // d/dt ||u||^2 = -2 nu ||omega||^2, integrated over the run.
    double dissipated = 0.0;
    for (size_t i = 1; i < d.size(); ++i)
        dissipated += 0.5 * (d[i].enstrophy + d[i - 1].enstrophy) * (d[i].time - d[i - 1].time);
    const double lhs = d.front().energy - d.back().energy;
    const double rhs = 2.0 * cfg.nu * dissipated;
    CHECK(std::abs(lhs - rhs) <= 1e-4 * d.front().energy * (d.back().time - d.front().time) +
                                     1e-12);
}

TEST_CASE("euler solver: shear flows are steady, invariants conserved") {
    RunConfig cfg = small_config();
    cfg.nu = 1.0;  // unused by the inviscid stepper; keeps the grid mild
    cfg.gamma = 0.05;
    cfg.tfinal = 0.1;
    cfg.dt = 2e-3;
    auto g = YGrid::make(129, cfg.ymax, 0.5);

    VorticityState shear(2, g, 0.0);
    for (int i = 0; i < g->size(); ++i)
        shear.mode(0)[i] = g->nodes()[i] * std::exp(-g->nodes()[i]);
    EulerStepper euler(cfg);
    VorticityState after = euler.advance(shear, cfg.dt);
    double change = 0.0;
    for (int xi = -2; xi <= 2; ++xi)
        change = std::max(change, (after.mode(xi) - shear.mode(xi)).cwiseAbs().maxCoeff());
    CHECK(change < 1e-14);

    cfg.kmax = 4;
    cfg.amplitude = 0.5;
    cfg.family = DatumFamily::Bump;
    VorticityState datum = make_datum(cfg, g);
    Trajectory traj = run(cfg, datum, SolverKind::Euler);
    REQUIRE(traj.failure.empty());
    const double e0 = traj.diagnostics.front().energy;
    const double z0 = traj.diagnostics.front().enstrophy;
    double ed = 0.0, zd = 0.0;
    for (const auto& d : traj.diagnostics) {
        ed = std::max(ed, std::abs(d.energy - e0) / e0);
        zd = std::max(zd, std::abs(d.enstrophy - z0) / z0);
    }
    CHECK(ed < 1e-6);
    CHECK(zd < 1e-5);

    // CFL violation raises.
    cfg.dt = 5.0;
    EulerStepper fast(cfg);
    VorticityState big = make_datum(cfg, g);
    CHECK_THROWS_AS(fast.advance(big, 5.0), NumericalError);
}

TEST_CASE("mild solver: linear window equals the kernel application") {
    RunConfig cfg = small_config();
    cfg.kmax = 3;
    auto g = YGrid::make(97, cfg.ymax, cfg.nu);
    VorticityState datum = make_datum(cfg, g);

    MildStepper mild(cfg, g);
    VorticityState lin = mild.advance(datum, cfg.dt, nullptr, /*force_linear=*/true);
    for (int xi = -cfg.kmax; xi <= cfg.kmax; ++xi) {
        auto k = cached_green(xi, cfg.dt, cfg.nu, g, cfg.kernel_substeps);
        Eigen::VectorXcd expect = apply_kernel(*k, datum.mode_field(xi)).values;
        CHECK((lin.mode(xi) - expect).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("mild and direct solvers agree on linear single-mode evolution") {
    RunConfig cfg = small_config();
    cfg.nu = 0.1;
    cfg.dt = 1e-3;
    cfg.kmax = 8;
    auto g = YGrid::make(129, cfg.ymax, cfg.nu);

    for (int xi : {0, 1, 4, 8}) {
        VorticityState s(cfg.kmax, g, 0.0);
        // Robin-compatible profile: value and slope vanish at the wall.
        for (int i = 0; i < g->size(); ++i) {
            const double y = g->nodes()[i];
            s.mode(xi)[i] = complexd(1.0, xi ? 0.5 : 0.0) * y * y * std::exp(-y * y / 2.0);
        }
        if (xi) s.mode(-xi) = s.mode(xi).conjugate();

        MildStepper mild(cfg, g);
        DirectStepper direct(cfg, g);
        VorticityState a = s, b = s;
        const int steps = 20;
        for (int st = 0; st < steps; ++st) {
            a = mild.advance(a, cfg.dt, nullptr, true);
            b = direct.advance(b, cfg.dt, true);
        }
        double scale = std::max(a.max_abs(), 1e-300);
        double diff = 0.0;
        for (int m = -cfg.kmax; m <= cfg.kmax; ++m)
            diff = std::max(diff, (a.mode(m) - b.mode(m)).cwiseAbs().maxCoeff());
        CAPTURE(xi);
        CHECK(diff < 1e-6 * scale);
    }
}

TEST_CASE("mild versus direct on a small nonlinear instance") {
    RunConfig cfg = small_config();
    cfg.kmax = 4;
    cfg.ny = 97;
    cfg.dt = 1e-3;
    cfg.tfinal = 0.02;
    cfg.amplitude = 1.0;
    auto g = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, g);

    Trajectory tm = run(cfg, datum, SolverKind::Mild);
    Trajectory td = run(cfg, datum, SolverKind::Direct);
    REQUIRE(tm.failure.empty());
    REQUIRE(td.failure.empty());
    const double rel = VorticityState::l2_distance(tm.back(), td.back()) / td.back().l2_norm();
    CHECK(rel < 1e-3);

    // Picard iteration counts stay within the configured budget.
    for (const auto& d : tm.diagnostics)
        CHECK(d.picard_iters <= cfg.picard_max);
}

TEST_CASE("trajectory driver: T=0, determinism, failure capture") {
    RunConfig cfg = small_config();
    cfg.tfinal = 0.0;
    auto g = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, g);
    Trajectory t0 = run(cfg, datum, SolverKind::Direct);
    CHECK(t0.snapshots.size() == 1);
    CHECK(t0.failure.empty());

    cfg.tfinal = 0.01;
    Trajectory a = run(cfg, datum, SolverKind::Direct);
    Trajectory b = run(cfg, datum, SolverKind::Direct);
    CHECK(VorticityState::l2_distance(a.back(), b.back()) == 0.0);

    // Picard divergence is reported, not thrown, and keeps the prefix.
    RunConfig bad = small_config();
    bad.amplitude = 50.0;
    bad.picard_max = 2;
    bad.dt = 5e-3;
    bad.tfinal = 0.045;
    VorticityState hot = make_datum(bad, g);
    Trajectory tf = run(bad, hot, SolverKind::Mild);
    CHECK(!tf.failure.empty());
    CHECK(!tf.snapshots.empty());
}

TEST_CASE("compatibility conservation and no-slip emergence for projected data") {
    RunConfig cfg = small_config();
    cfg.compatible = true;
    cfg.tfinal = 0.02;
    cfg.ny = 129;
    auto g = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, g);

    // projection makes every wall compatibility integral vanish
    for (int xi = -cfg.kmax; xi <= cfg.kmax; ++xi)
        CHECK(std::abs(compatibility(datum.mode_field(xi))) < 1e-13);

    Trajectory traj = run(cfg, datum, SolverKind::Direct);
    REQUIRE(traj.failure.empty());
    Norms norms(cfg, g);
    const double scale = norms.triple_norm(traj.back()).triple;
    for (const auto& d : traj.diagnostics) CHECK(d.compat_max <= 1e-6 * scale);

    // reconstructed slip components vanish at the wall
    VelocityState v = velocity(traj.back());
    for (int xi = -cfg.kmax; xi <= cfg.kmax; ++xi) {
        CHECK(std::abs(v.u1_mode(xi)[0]) <= 1e-6 * scale);
        CHECK(std::abs(v.u2_mode(xi)[0]) == 0.0);
    }
}

TEST_CASE("validate_initial_data: zero, bump stability, analytic family") {
    RunConfig cfg = small_config();
    auto g = YGrid::make(129, cfg.ymax, cfg.nu);

    VorticityState zero(cfg.kmax, g, 0.0);
    InitialDataReport zr = validate_initial_data(zero, cfg);
    CHECK(zr.m_est == 0.0);
    CHECK(zr.finite);

    VorticityState bump = make_datum(cfg, g);
    InitialDataReport br = validate_initial_data(bump, cfg);
    CHECK(br.finite);
    CHECK(br.m_est > 0.0);

    auto g2 = YGrid::make(193, cfg.ymax, cfg.nu);
    RunConfig cfg2 = cfg;
    cfg2.ny = 193;
    VorticityState bump2 = make_datum(cfg2, g2);
    InitialDataReport br2 = validate_initial_data(bump2, cfg2);
    CHECK(std::abs(br2.m_est - br.m_est) <= 0.02 * br.m_est);

    RunConfig acfg = cfg;
    acfg.family = DatumFamily::Analytic;
    acfg.kmax = 6;
    VorticityState analytic = make_datum(acfg, g);
    InitialDataReport ar = validate_initial_data(analytic, acfg);
    CHECK(ar.finite);
    CHECK(ar.m_est > 0.0);
}
