#pragma once

#include <optional>

#include "nshs/norms.hpp"
#include "nshs/solvers.hpp"

namespace nshs {

struct ConvergenceRow {
    double nu = 0.0;
    double sup_dist = 0.0;      // sup_t ||u^nu - u_euler||_{L2}
    double dissipation = 0.0;   // nu int_0^T int |omega|^2
    double katowall = 0.0;      // nu int_0^T int_{y<=c nu} |grad u|^2
    double T = 0.0;
    double slope_running = 0.0; // log-log slope of sup_dist over rows so far
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;             // final fitted slope of sup_dist vs nu
    double dissipation_slope = 0.0; // same for total dissipation
    std::vector<std::string> failures;
    std::string to_csv() const;
};

struct KatoDissipation {
    double total = 0.0;
    double near_wall = 0.0;
};

/// Time-integrated dissipation along a trajectory; near-wall part restricted
/// to {y <= c nu} and evaluated on snapshots.
KatoDissipation kato_monitor(const Trajectory& traj, double c_factor);

/// Runs the viscous solver once per nu against a shared Euler reference at
/// doubled mode count; tabulates distances, dissipations and slopes.
ConvergenceTable run_convergence(const RunConfig& base, const std::vector<double>& nu_list);

/// Triple norm per snapshot.
std::vector<NormReport> norm_history(const Trajectory& traj);

struct GammaSearchResult {
    bool found = false;
    double gamma = 0.0;
    double horizon = 0.0;  // induced T = 0.45 mu0 / gamma
    double sup_ratio = 0.0;
    std::vector<std::pair<double, double>> tried;  // (gamma, sup ratio)
};

/// Smallest gamma in the grid keeping sup_t |||omega|||_t <= 3 x initial
/// over [0, 0.45 mu0/gamma]; mirrors the barrier choice of gamma.
GammaSearchResult gamma_search(const RunConfig& cfg, const std::vector<double>& gamma_grid,
                               SolverKind kind = SolverKind::Direct);

}  // namespace nshs
