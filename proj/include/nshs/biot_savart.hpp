#pragma once

#include <Eigen/Dense>

#include "nshs/field.hpp"

namespace nshs {

/// Velocity modes recovered from vorticity. u2 vanishes identically at the
/// wall; the pair is discretely divergence-free to spectral accuracy.
struct VelocityState {
    std::vector<Eigen::VectorXcd> u1, u2;  // xi = -K..K
    int K = 0;
    double time = 0.0;
    std::shared_ptr<const YGrid> grid;

    const Eigen::VectorXcd& u1_mode(int xi) const { return u1[xi + K]; }
    const Eigen::VectorXcd& u2_mode(int xi) const { return u2[xi + K]; }
};

/// Forcing modes N_xi = -(u . grad omega)_xi and boundary data
/// B_xi = (d_y Delta^{-1} (u . grad omega))_xi at y=0.
struct NonlinearState {
    VorticityState n;         // forcing as a mode state (shares omega's grid)
    Eigen::VectorXcd b;       // trace data per xi = -K..K
    const Eigen::VectorXcd& n_mode(int xi) const { return n.mode(xi); }
    complexd b_value(int xi) const { return b[xi + n.K()]; }
};

/// Tangential velocity mode from a vorticity mode (one-sided exponential
/// convolutions solved as collocation ODEs, LU cached per grid and |xi|).
ModeField velocity_u1(const ModeField& omega);

/// Wall-normal velocity mode; the xi=0 mode is identically zero.
ModeField velocity_u2(const ModeField& omega);

/// u2/y evaluated without cancellation (regular-singular collocation for the
/// near-field integral plus a guarded series for (1-e^{-2|xi|y})/y).
ModeField u2_over_y(const ModeField& omega);

/// Representation-formula trace (d_z Delta^{-1} n)|_{z=0} = -int e^{-|xi|z} n dz.
complexd trace_operator(const ModeField& n);

/// Wall compatibility functional c_xi = int_0^inf e^{-|xi|z} omega_xi dz,
/// i.e. the reconstructed slip u1_xi(0); conserved by the viscous evolution.
complexd compatibility(const ModeField& omega);

/// Full velocity recovery for a conjugate-symmetric state.
VelocityState velocity(const VorticityState& omega);

/// Assembles N = -(u1 dx omega + (u2/y)(y dy omega)) with 3/2-rule dealiased
/// products and B from the representation formula. With strict_checks the
/// per-mode differentiation noise is verified against the 1e-6-of-state
/// budget; steppers disable it for intermediate stage states, whose fresh
/// boundary transients are exact projections rather than errors.
NonlinearState nonlinearity(const VorticityState& omega, bool strict_checks = true);

/// Diagnostics: max-norm residuals of the discrete structure relations.
double divergence_residual(const VelocityState& v);
double curl_residual(const VelocityState& v, const VorticityState& omega);

/// Kinetic energy ||u||^2_{L2} via Parseval (integral over T x [0,ymax]).
double kinetic_energy(const VelocityState& v);

/// Enstrophy ||omega||^2_{L2}.
double enstrophy(const VorticityState& omega);

}  // namespace nshs
