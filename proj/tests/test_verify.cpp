#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nshs/solvers.hpp"
#include "nshs/verify.hpp"

using namespace nshs;

TEST_CASE("adaptive quadrature reproduces the arctan identity") {
    // t'=0.5, mu'=1: integral = 2 arctan(1)/sqrt(0.5) = pi/sqrt(2).
    auto integrand = [](double sig) { return 2.0 / (0.5 + sig * sig); };
    const double quad = adaptive_simpson(integrand, 0.0, std::sqrt(0.5), 1e-12);
    CHECK(quad == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-10));

    // vanishing domain
    auto f2 = [](double sig) { return 2.0 / (1.0 + sig * sig); };
    CHECK(std::abs(adaptive_simpson(f2, 0.0, 1e-8, 1e-14)) < 1e-7);
}

TEST_CASE("check_int_t verifies the identity and fits stable constants") {
    InequalityReport rep = check_int_t();
    CHECK(rep.pass);
    CHECK(rep.worst_ratio <= 1e-8);
    CHECK(rep.fitted_constant > 0.0);
    CHECK(std::isfinite(rep.fitted_constant));
}

TEST_CASE("check_recovery bounds the one-mode optimum") {
    RunConfig cfg;
    cfg.nu = 0.01;
    InequalityReport rep = check_recovery(cfg);
    CHECK(rep.pass);
    const double optimum = 1.0 / (cfg.eps0 * std::exp(1.0));
    CHECK(rep.fitted_constant >= 0.5 * optimum);
    CHECK(rep.fitted_constant <= 2.0 * optimum);
}

TEST_CASE("check_weight_properties passes both weights") {
    InequalityReport rep = check_weight_properties();
    CHECK(rep.pass);
    CHECK(rep.fitted_constant < 16.0);
}

TEST_CASE("check_nonlinear_estimates on a band-limited state") {
    RunConfig cfg;
    cfg.nu = 0.05;
    cfg.kmax = 6;
    cfg.ny = 129;
    auto g = YGrid::make(cfg.ny, cfg.ymax, cfg.nu);
    VorticityState datum = make_datum(cfg, g);
    InequalityReport rep = check_nonlinear_estimates(datum, cfg);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.worst_ratio));
    CHECK(rep.worst_ratio > 0.0);
}

TEST_CASE("sobolev cutoff profile and the heat-only decay") {
    CHECK(phi_cutoff(0.2) == 0.0);
    CHECK(phi_cutoff(0.6) == doctest::Approx(0.6));
    CHECK(phi_cutoff(0.375) > 0.0);
    CHECK(phi_cutoff(0.375) < 0.375);

    // xi=0 heat flow (shear): the weighted H3 functional decays.
    RunConfig cfg;
    cfg.nu = 0.05;
    cfg.kmax = 0;
    cfg.ny = 129;
    cfg.dt = 5e-4;
    cfg.tfinal = 0.01;
    auto g = make_solver_grid(cfg);
    VorticityState heat(0, g, 0.0);
    for (int i = 0; i < g->size(); ++i) {
        const double y = g->nodes()[i];
        heat.mode(0)[i] = std::exp(-(y - 2.0) * (y - 2.0));
    }
    Trajectory traj = run(cfg, heat, SolverKind::Direct);
    REQUIRE(traj.failure.empty());
    double prev = weighted_h3(traj.snapshots.front());
    for (size_t i = 1; i < traj.snapshots.size(); ++i) {
        const double cur = weighted_h3(traj.snapshots[i]);
        CHECK(cur <= prev * (1.0 + 1e-10));
        prev = cur;
    }

    InequalityReport rep = check_sobolev_gronwall(traj);
    CHECK(rep.pass);
    CHECK(rep.fitted_constant <= 100.0);
}

TEST_CASE("reports serialize to CSV and JSON") {
    InequalityReport a{"alpha", 10, 0.5, 1.5, true, "note"};
    InequalityReport b{"beta", 20, 2.0, 2.0, false, ""};
    std::string csv = reports_to_csv({a, b});
    CHECK(csv.find("name,samples,worst_ratio,fitted_constant,pass") != std::string::npos);
    CHECK(csv.find("alpha,10,0.5,1.5,true") != std::string::npos);
    CHECK(csv.find("beta,20,2,2,false") != std::string::npos);
    std::string json = reports_to_json({a, b});
    CHECK(json.find("\"alpha\"") != std::string::npos);
    CHECK(json.find("\"pass\": false") != std::string::npos);
}
