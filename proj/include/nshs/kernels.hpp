#pragma once

#include <Eigen/Dense>
#include <memory>

#include "nshs/field.hpp"

namespace nshs {

/// Half-line mass of the unnormalized heat-kernel display (1/sqrt(nu t)) e^{-(y-z)^2/4 nu t}:
/// integrating over z in R gives 2 sqrt(pi). Kernel matrices divide by this
/// constant so that they act as unit-mass solution operators.
inline constexpr double kHalfLineHeatMass = 3.54490770181103205459633496668229;  // 2 sqrt(pi)

/// Classical displays (carry the 2 sqrt(pi) mass).
double heat_H(int xi, double t, double y, double z, double nu);
double heat_Htilde(int xi, double t, double y, double z, double nu);

enum class KernelKind { H, Htilde, GNumeric, Residual };

/// Discretized kernel at one (xi, t): quadrature-ready operator on the grid.
/// entries(i,j) approximate G(t, y_i, z_j) in the unit-mass normalization;
/// apply_kernel contracts with the grid quadrature weights over z.
struct KernelMatrix {
    KernelKind kind = KernelKind::GNumeric;
    int xi = 0;
    double t = 0.0;
    double nu = 0.0;
    std::shared_ptr<const YGrid> grid;
    Eigen::MatrixXd entries;

    /// Boundary remainder coefficient b = |xi| + 1/sqrt(nu).
    double b() const { return std::abs(xi) + 1.0 / std::sqrt(nu); }
};

/// Closed-form kernels sampled on the grid (unit-mass normalization).
KernelMatrix heat_matrix(int xi, double t, double nu, std::shared_ptr<const YGrid> grid);
KernelMatrix htilde_matrix(int xi, double t, double nu, std::shared_ptr<const YGrid> grid);

/// Solution operator of d_t g = nu (d_yy - xi^2) g with the homogeneous
/// vorticity boundary row nu(d_y + |xi|) g|_{y=0} = 0, built by an L-stable
/// implicit march (TR-BDF2, graded substeps) of quadrature-dual delta
/// columns. Throws NumericalError on non-convergence or when the xi=0
/// operator loses positivity on smooth nonnegative probes.
KernelMatrix green_numeric(int xi, double t, double nu,
                           std::shared_ptr<const YGrid> grid, int substeps = 96);

/// Pointwise residual kernel R = G - Htilde marched from its defining
/// boundary-value problem: zero initial data, forcing through the Robin row
/// nu(d_y+|xi|)R|_{y=0} = -nu |xi| Htilde(t,0,z), far field matched to the
/// e^{-|xi| y} decay. Richardson-extrapolated in the substep count.
KernelMatrix green_residual(int xi, double t, double nu,
                            std::shared_ptr<const YGrid> grid, int substeps = 96);

/// Entrywise difference g - htilde (matching xi, t, nu, grid), kind=Residual.
/// Runs the function-of-(y+z) invariance check and throws NumericalError
/// above tol (an under-resolved green_numeric).
KernelMatrix residual_R(const KernelMatrix& g, const KernelMatrix& htilde,
                        double tol = 1e-4);

/// Interior max of |(d_y - d_z) R| relative to max |R| (the function-of-(y+z)
/// diagnostic; rows/columns near either boundary are excluded).
double yz_invariance_residual(const KernelMatrix& R);

/// Quadrature contraction over z; linear in f.
ModeField apply_kernel(const KernelMatrix& k, const ModeField& f);

/// G(t, y, 0) * b as a mode field (z=0 trace column, via kernel symmetry).
ModeField boundary_column(const KernelMatrix& k, complexd b);

/// Process-wide cache of solution-operator kernels keyed by (|xi|, t, nu,
/// grid); construction cost is dominated by one eigendecomposition per
/// (|xi|, nu, grid), shared across all t.
std::shared_ptr<const KernelMatrix> cached_green(int xi, double t, double nu,
                                                 std::shared_ptr<const YGrid> grid,
                                                 int substeps = 96);

/// Exact Duhamel window integral
///   int_0^theta e^{(theta-s)A} N(s) ds  plus the inhomogeneous-Robin part
/// carrying B(s), where N and B are polynomials in x = s/window:
/// N(s) = sum_q x^q Nq, B(s) = sum_q x^q bq. Time integration is exact
/// (phi-functions of the reduced operator); only the polynomial data model
/// approximates.
Eigen::VectorXcd duhamel_window(int xi, double theta, double window, double nu,
                                const std::shared_ptr<const YGrid>& grid,
                                const std::vector<Eigen::VectorXcd>& Nq,
                                const std::vector<complexd>& bq);

}  // namespace nshs
