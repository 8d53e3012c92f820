#pragma once

#include <string>
#include <vector>

#include "nshs/config.hpp"
#include "nshs/field.hpp"
#include "nshs/solvers.hpp"

namespace nshs {

/// Outcome of one numerical inequality check. The paper's implicit constants
/// are fitted, never asserted: worst_ratio is the max of LHS/RHS with the
/// constant set to 1, fitted_constant the C making LHS <= C RHS everywhere.
struct InequalityReport {
    std::string name;
    long samples = 0;
    double worst_ratio = 0.0;
    double fitted_constant = 0.0;
    bool pass = false;
    std::string note;
};

std::string reports_to_csv(const std::vector<InequalityReport>& reports);
std::string reports_to_json(const std::vector<InequalityReport>& reports);

/// Time-integral bounds (arctan identity plus the two inequality fits across
/// gamma in {1,4,16,64} and alpha in {0.1,0.25,0.4}).
InequalityReport check_int_t();

/// Analyticity recovery for the X and Y norms: fitted constants across
/// dyadic gaps 2^-3..2^-8 on an entire-field family, plus the one-mode
/// family realizing the 1/(eps0 e) optimum.
InequalityReport check_recovery(const RunConfig& cfg, std::uint64_t seed = 12345);

/// Weight battery for both the piecewise and the exponential weight.
InequalityReport check_weight_properties();

/// Residual-kernel envelopes (function-of-(y+z) diagnostic and the fitted
/// (C, theta) envelope for conormal orders k=0,1,2) over the (xi, t, nu)
/// test matrix; includes the 2x grid-refinement stability check.
InequalityReport check_kernel_bounds(bool with_refinement = true);

/// Nonlinearity estimates (X/Y/S_mu products) and the velocity sup bounds
/// on the given state plus a seeded random band-limited family.
InequalityReport check_nonlinear_estimates(const VorticityState& state, const RunConfig& cfg,
                                           std::uint64_t seed = 777);

/// Weighted-Sobolev Gronwall bound along a trajectory with the cutoff
/// phi(y) = y psi(y), psi smooth, 0 on [0,1/4], 1 on [1/2,inf).
InequalityReport check_sobolev_gronwall(const Trajectory& traj);

/// Cutoff profile used by the Sobolev estimate.
double phi_cutoff(double y);

/// sum_{i+j<=3} || phi d_x^i d_y^j omega ||^2_{L2(H)}.
double weighted_h3(const VorticityState& s);

/// Adaptive Simpson quadrature (desingularized integrands).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

}  // namespace nshs
