#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "nshs/grid.hpp"
#include "nshs/util.hpp"

namespace nshs {

/// One tangential Fourier mode: a complex profile over the wall-normal grid.
struct ModeField {
    int xi = 0;
    Eigen::VectorXcd values;
    std::shared_ptr<const YGrid> grid;

    ModeField() = default;
    ModeField(int xi_, Eigen::VectorXcd v, std::shared_ptr<const YGrid> g)
        : xi(xi_), values(std::move(v)), grid(std::move(g)) {}

    bool finite() const { return values.allFinite(); }
};

/// d/dx^i in Fourier space: multiplication by (i
/// xi)^i.
ModeField ddx(const ModeField& f, int order);

/// Conormal derivative (y d/dy)^j, j in {0,1,2}; exact zero at y=0 for j>=1.
/// Throws NumericalError when the spectral tail suggests the differentiation
/// error exceeds ~1e-6 relative.
ModeField conormal_dy(const ModeField& f, int order);

/// Plain d/dy^j (used by the Sobolev norms).
ModeField ddy(const ModeField& f, int order);

/// Full Fourier-in-x state of the scalar vorticity (or any scalar field).
class VorticityState {
public:
    VorticityState() = default;
    VorticityState(int K, std::shared_ptr<const YGrid> grid, double time = 0.0);

    int K() const { return K_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }
    const std::shared_ptr<const YGrid>& grid() const { return grid_; }

    const Eigen::VectorXcd& mode(int xi) const { return modes_[xi + K_]; }
    Eigen::VectorXcd& mode(int xi) { return modes_[xi + K_]; }
    ModeField mode_field(int xi) const { return ModeField(xi, modes_[xi + K_], grid_); }

    /// Max deviation from conjugate symmetry omega_{-xi} = conj(omega_xi).
    double conjugate_symmetry_error() const;
    /// Forces exact conjugate symmetry (averages the two half-spectra).
    void symmetrize();

    bool finite() const;
    double max_abs() const;

    /// l2-type distance between states on the shared grid (quadrature in y,
    /// Parseval in x), used by solver cross-checks.
    static double l2_distance(const VorticityState& a, const VorticityState& b);
    double l2_norm() const;

private:
    int K_ = 0;
    double time_ = 0.0;
    std::shared_ptr<const YGrid> grid_;
    std::vector<Eigen::VectorXcd> modes_;
};

/// Inverse Fourier synthesis to nx physical x-samples; requires nx >= 2K+2
/// and a conjugate-symmetric state. Row m is x_m = -pi + 2 pi m / nx.
Eigen::MatrixXd to_physical(const VorticityState& s, int nx);

/// Mode analysis of physical samples (rows over x, columns over y).
VorticityState from_physical(const Eigen::MatrixXd& samples, int K,
                             const std::shared_ptr<const YGrid>& grid, double time);

}  // namespace nshs
