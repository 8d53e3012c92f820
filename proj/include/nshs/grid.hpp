#pragma once

#include <Eigen/Dense>
#include <memory>

#include "nshs/util.hpp"

namespace nshs {

/// Wall-normal collocation grid on [0, ymax]: Chebyshev-Gauss-Lobatto points
/// under a sinh map clustering nodes toward y=0 at the scale sqrt(nu_hint).
/// Carries Clenshaw-Curtis quadrature weights and a spectral differentiation
/// matrix. Immutable after construction; shared across fields by pointer.
class YGrid {
public:
    /// Builds a grid with at least 8 nodes inside [0, sqrt(nu_hint)] and
    /// first spacing <= sqrt(nu_hint)/8. Throws InvalidArgument when n_nodes
    /// cannot satisfy the boundary-layer resolution at this nu_hint.
    static std::shared_ptr<const YGrid> make(int n_nodes, double ymax, double nu_hint);

    int size() const { return static_cast<int>(nodes_.size()); }
    double ymax() const { return ymax_; }
    double nu_hint() const { return nu_hint_; }

    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& quad_weights() const { return wq_; }

    /// Dense first-derivative matrix d/dy at the nodes.
    const Eigen::MatrixXd& diff() const { return d1_; }

    /// Quadrature of nodal values over the full interval [0, ymax].
    double integrate(const Eigen::VectorXd& f) const { return wq_.dot(f); }
    complexd integrate(const Eigen::VectorXcd& f) const {
        return complexd(wq_.dot(f.real()), wq_.dot(f.imag()));
    }

    /// Barycentric interpolation matrix from grid nodes to arbitrary targets
    /// in [0, ymax]. Rows are interpolation weights; exact at grid nodes.
    Eigen::MatrixXd interpolation_matrix(const Eigen::VectorXd& targets) const;

    /// Interpolation of nodal values at a complex point (polynomial
    /// continuation through the mapped Chebyshev interpolant).
    complexd interpolate(const Eigen::VectorXcd& values, complexd y) const;

    /// m-point Clenshaw-Curtis rule on [a,b] together with the interpolation
    /// matrix picking up nodal values; used for restricted-interval norms.
    struct SubQuadrature {
        Eigen::VectorXd y;       // rule nodes, ascending in [a,b]
        Eigen::VectorXd w;       // rule weights
        Eigen::MatrixXd interp;  // m x n, values at rule nodes = interp * f
    };
    SubQuadrature sub_quadrature(double a, double b, int m) const;

    /// Chebyshev coefficients in the mapped variable of a nodal vector.
    Eigen::VectorXcd cheb_coeffs(const Eigen::VectorXcd& values) const;
    Eigen::VectorXcd cheb_synthesize(const Eigen::VectorXcd& coeffs) const;

    /// Relative error estimate for the conormal derivative: the contribution
    /// of the top spectral octave to (y d/dy) f, relative to the whole.
    double diff_noise_estimate(const Eigen::VectorXcd& values) const;

    /// Exponential modal filter on the top spectral octave; leaves resolved
    /// content untouched and suppresses neutral stiff-mode ringing.
    Eigen::VectorXcd filter_tail(const Eigen::VectorXcd& values) const;

private:
    YGrid() = default;

    double ymax_ = 0, nu_hint_ = 0, bmap_ = 0;  // bmap_=0 means linear map
    Eigen::VectorXd s_;      // CGL points in [0,1], ascending
    Eigen::VectorXd bary_;   // barycentric weights on s_
    Eigen::VectorXd nodes_, wq_, dyds_;
    Eigen::MatrixXd d1_;

    double map(double s) const;
    double imap(double y) const;
    complexd imap(complexd y) const;
};

/// CGL points (ascending) and Clenshaw-Curtis weights on [0,1].
void clenshaw_curtis(int n, Eigen::VectorXd& s, Eigen::VectorXd& w);

}  // namespace nshs
