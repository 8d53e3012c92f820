#include "nshs/field.hpp"

#include "nshs/fourier.hpp"

namespace nshs {

ModeField ddx(const ModeField& f, int order) {
    require(order >= 0, "ddx: order must be nonnegative");
    complexd factor = 1.0;
    const complexd ixi(0.0, static_cast<double>(f.xi));
    for (int k = 0; k < order; ++k) factor *= ixi;
    return ModeField(f.xi, factor * f.values, f.grid);
}

ModeField conormal_dy(const ModeField& f, int order) {
    require(order >= 0 && order <= 2, "conormal_dy: order must be in {0,1,2}");
    if (order == 0) return f;
    // Fields below double-precision relevance are exempt from the noise
    // check: their spectral tail is all roundoff.
    if (f.values.cwiseAbs().maxCoeff() > 1e-13) {
        const double noise = f.grid->diff_noise_estimate(f.values);
        if (noise > 1e-6)
            throw NumericalError("conormal_dy: differentiation noise above 1e-6 relative (grid too coarse)");
    }
    Eigen::VectorXcd v = f.values;
    const auto& y = f.grid->nodes();
    for (int k = 0; k < order; ++k) {
        v = (f.grid->diff() * v).eval();
        v.array() *= y.array();
        v[0] = 0.0;  // y=0 node: exact zero by the y factor
    }
    return ModeField(f.xi, std::move(v), f.grid);
}

ModeField ddy(const ModeField& f, int order) {
    require(order >= 0, "ddy: order must be nonnegative");
    Eigen::VectorXcd v = f.values;
    for (int k = 0; k < order; ++k) v = (f.grid->diff() * v).eval();
    return ModeField(f.xi, std::move(v), f.grid);
}

VorticityState::VorticityState(int K, std::shared_ptr<const YGrid> grid, double time)
    : K_(K), time_(time), grid_(std::move(grid)) {
    require(K >= 0, "VorticityState: K must be nonnegative");
    modes_.assign(2 * K + 1, Eigen::VectorXcd::Zero(grid_->size()));
}

double VorticityState::conjugate_symmetry_error() const {
    double err = 0.0;
    for (int xi = 0; xi <= K_; ++xi) {
        const Eigen::VectorXcd diff = mode(-xi) - mode(xi).conjugate();
        err = std::max(err, diff.cwiseAbs().maxCoeff());
    }
    return err;
}

void VorticityState::symmetrize() {
    for (int xi = 1; xi <= K_; ++xi) {
        Eigen::VectorXcd avg = 0.5 * (mode(xi) + mode(-xi).conjugate());
        mode(xi) = avg;
        mode(-xi) = avg.conjugate();
    }
    mode(0) = 0.5 * (mode(0) + mode(0).conjugate());
}

bool VorticityState::finite() const {
    for (const auto& m : modes_)
        if (!m.allFinite()) return false;
    return true;
}

double VorticityState::max_abs() const {
    double v = 0.0;
    for (const auto& m : modes_) v = std::max(v, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    return v;
}

double VorticityState::l2_norm() const {
    // ||f||^2 = 2 pi sum_xi int |f_xi|^2 dy  (Parseval on [-pi,pi])
    double sum = 0.0;
    for (int xi = -K_; xi <= K_; ++xi)
        sum += grid_->quad_weights().dot(mode(xi).cwiseAbs2());
    return std::sqrt(2.0 * 3.14159265358979323846 * sum);
}

double VorticityState::l2_distance(const VorticityState& a, const VorticityState& b) {
    const int K = std::min(a.K(), b.K());
    require(a.grid() == b.grid(), "l2_distance: states must share a grid");
    double sum = 0.0;
    auto tail = [&](const VorticityState& s) {
        for (int xi = -s.K(); xi <= s.K(); ++xi)
            if (std::abs(xi) > K) sum += s.grid()->quad_weights().dot(s.mode(xi).cwiseAbs2());
    };
    for (int xi = -K; xi <= K; ++xi) {
        const Eigen::VectorXcd d = a.mode(xi) - b.mode(xi);
        sum += a.grid()->quad_weights().dot(d.cwiseAbs2());
    }
    tail(a);
    tail(b);
    return std::sqrt(2.0 * 3.14159265358979323846 * sum);
}

Eigen::MatrixXd to_physical(const VorticityState& s, int nx) {
    require(nx >= 2 * s.K() + 2, "to_physical: nx < 2K+2 would alias");
    const int ny = s.grid()->size();
    const int K = s.K();
    Eigen::MatrixXd out(nx, ny);
    Eigen::VectorXcd coeffs(2 * K + 1);
    for (int j = 0; j < ny; ++j) {
        for (int xi = -K; xi <= K; ++xi) coeffs[xi + K] = s.mode(xi)[j];
        Eigen::VectorXcd col = XTransform::synthesize(coeffs, nx);
        out.col(j) = col.real();
    }
    return out;
}

VorticityState from_physical(const Eigen::MatrixXd& samples, int K,
                             const std::shared_ptr<const YGrid>& grid, double time) {
    const int nx = static_cast<int>(samples.rows());
    const int ny = static_cast<int>(samples.cols());
    require(ny == grid->size(), "from_physical: column count must match grid");
    VorticityState s(K, grid, time);
    for (int j = 0; j < ny; ++j) {
        Eigen::VectorXcd col = samples.col(j).cast<complexd>();
        Eigen::VectorXcd coeffs = XTransform::analyze(col, K);
        for (int xi = -K; xi <= K; ++xi) s.mode(xi)[j] = coeffs[xi + K];
    }
    return s;
}

}  // namespace nshs
