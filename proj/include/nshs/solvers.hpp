#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nshs/biot_savart.hpp"
#include "nshs/config.hpp"
#include "nshs/field.hpp"

namespace nshs {

struct StepDiagnostics {
    double time = 0.0;
    double energy = 0.0;
    double enstrophy = 0.0;
    double compat_max = 0.0;   // max_xi |int e^{-|xi| z} omega_xi dz - c_xi(0)|
    double cfl = 0.0;          // advective Courant number (direct/euler)
    int picard_iters = 0;      // mild solver only
};

/// Time-ordered snapshots plus per-step diagnostics. A failed run keeps the
/// prefix computed so far and records the reason instead of discarding it.
struct Trajectory {
    std::vector<VorticityState> snapshots;
    std::vector<StepDiagnostics> diagnostics;
    SolverKind kind = SolverKind::Direct;
    RunConfig config;
    std::string failure;  // empty on success

    const VorticityState& front() const { return snapshots.front(); }
    const VorticityState& back() const { return snapshots.back(); }
};

/// Duhamel (mild) stepper: one window advances
///   omega(t+dt) = G(dt) omega(t) + int_0^dt G(dt-s) N(t+s) ds + W_B(dt),
/// where W_B carries the inhomogeneous boundary datum B(t+s) (the trace
/// term of the representation formula). N and B at window collocation nodes
/// are resolved by Picard iteration; the window integrals are evaluated
/// exactly in time through the reduced-operator phi-functions, which also
/// absorbs the (t-s)^{-1/2} trace singularity analytically.
class MildStepper {
public:
    MildStepper(const RunConfig& cfg, std::shared_ptr<const YGrid> grid);

    VorticityState advance(const VorticityState& state, double dt, int* picard_iters = nullptr,
                           bool force_linear = false) const;

private:
    RunConfig cfg_;
    std::shared_ptr<const YGrid> grid_;

    std::vector<double> nodes_;   // window collocation offsets (0 = start)
    Eigen::MatrixXd mono_;        // node values -> monomial coefficients in s/dt
    double window_ = 0.0;

    void build_window(double dt);
};

/// Crank-Nicolson diffusion with the Robin-type boundary row
/// nu(d_y + |xi|) omega = B and Adams-Bashforth (order 2) forcing.
class DirectStepper {
public:
    DirectStepper(const RunConfig& cfg, std::shared_ptr<const YGrid> grid);

    /// Advances by dt. Maintains the AB2 history internally; the first step
    /// is a Picard-corrected Euler bootstrap. force_linear drops N and B
    /// (pure Stokes evolution).
    VorticityState advance(const VorticityState& state, double dt, bool force_linear = false);

    void reset_history() { have_prev_ = false; }
    double last_cfl() const { return last_cfl_; }

private:
    RunConfig cfg_;
    std::shared_ptr<const YGrid> grid_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;   // per |xi|
    std::vector<Eigen::MatrixXd> rhs_op_;                    // per |xi|
    double dt_built_ = -1.0;
    bool have_prev_ = false;
    NonlinearState prev_;
    double last_cfl_ = 0.0;

    void build(double dt, int kmax);
    VorticityState solve_step(const VorticityState& state, const VorticityState& n_expl,
                              const Eigen::VectorXcd& b_new, double dt) const;
};

/// SSP-RK3 integrator for the inviscid equation d_t omega = -(u . grad omega)
/// with the slip boundary condition built into the Biot-Savart kernels.
class EulerStepper {
public:
    explicit EulerStepper(const RunConfig& cfg) : cfg_(cfg) {}
    VorticityState advance(const VorticityState& state, double dt) const;
    double last_cfl() const { return last_cfl_; }

private:
    RunConfig cfg_;
    mutable double last_cfl_ = 0.0;
};

/// Wall-normal grid for time stepping: clusters to the finer of the physical
/// sqrt(nu) layer and the per-step Robin transient scale sqrt(nu dt).
inline std::shared_ptr<const YGrid> make_solver_grid(const RunConfig& cfg) {
    const double hint = cfg.nu * std::min(1.0, 16.0 * cfg.dt);
    return YGrid::make(cfg.ny, cfg.ymax, hint);
}

/// Runs a full trajectory with snapshots at the configured cadence.
Trajectory run(const RunConfig& cfg, const VorticityState& initial, SolverKind kind);

/// Shipped initial-data families (see RunConfig::family):
///  - bump:     A sin(x) y^2 e^{-y^2}, analytic near the boundary;
///  - maekawa:  vorticity supported at O(1) distance from the wall;
///  - analytic: fully analytic datum with e^{-0.3|xi|} mode decay.
/// With cfg.compatible the datum is projected mode-by-mode onto zero wall
/// compatibility c_xi = int e^{-|xi| z} omega_xi dz = 0.
VorticityState make_datum(const RunConfig& cfg, std::shared_ptr<const YGrid> grid);

/// Projects a state onto zero wall compatibility (subtracts c_xi times a
/// normalized analytic bump per mode).
VorticityState project_compatible(const VorticityState& s);

struct InitialDataReport {
    double x_sum = 0.0;   // sum_{i+j<=2} ||d_x^i (y d_y)^j omega0||_{X_mu0}
    double y_sum = 0.0;   // same in Y_mu0
    double s_sum = 0.0;   // sum_{i+j<=4} ||d_x^i (y d_y)^j omega0||_S
    double m_est = 0.0;
    bool finite = false;
};
InitialDataReport validate_initial_data(const VorticityState& initial, const RunConfig& cfg);

}  // namespace nshs
