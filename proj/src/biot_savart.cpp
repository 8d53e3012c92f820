#include "nshs/biot_savart.hpp"

#include <map>
#include <mutex>

#include "nshs/fourier.hpp"

namespace nshs {

namespace {

// Collocation solves for the one-sided exponential convolutions
//   I(y) = int_0^y e^{-|xi|(y-z)} f dz      (I' + |xi| I = f,  I(0)=0)
//   J(y) = int_y^ymax e^{-|xi|(z-y)} f dz   (J' - |xi| J = -f, J(ymax)=0)
//   L(y) = int_0^y e^{-|xi| z} f dz         (L' = e^{-|xi| y} f, L(0)=0)
//   g(y) = I_a(y)/y via (y D + 1 + |xi| y) g = (1 - e^{-2|xi|y}) f
// with LU factorizations cached per (grid, |xi|).
struct ConvOps {
    Eigen::PartialPivLU<Eigen::MatrixXd> lower, upper, ratio;
    Eigen::VectorXd expy;  // e^{-|xi| y_j}
};

const ConvOps& conv_ops(const std::shared_ptr<const YGrid>& grid, int absxi) {
    static std::map<std::pair<const YGrid*, int>, ConvOps> cache;
    static std::map<const YGrid*, std::shared_ptr<const YGrid>> keepalive;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(grid.get(), absxi);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    keepalive.emplace(grid.get(), grid);

    const int n = grid->size();
    const auto& D = grid->diff();
    const auto& y = grid->nodes();
    const double k = absxi;

    Eigen::MatrixXd A = D + k * Eigen::MatrixXd::Identity(n, n);
    A.row(0).setZero();
    A(0, 0) = 1.0;

    Eigen::MatrixXd B = D - k * Eigen::MatrixXd::Identity(n, n);
    B.row(n - 1).setZero();
    B(n - 1, n - 1) = 1.0;

    Eigen::MatrixXd M = y.asDiagonal() * D;
    M.diagonal().array() += 1.0 + k * y.array();

    ConvOps ops;
    ops.lower.compute(A);
    ops.upper.compute(B);
    ops.ratio.compute(M);
    ops.expy = (-k * y.array()).exp();
    auto [iter, ok] = cache.emplace(key, std::move(ops));
    return iter->second;
}

Eigen::VectorXcd solve_cols(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                            Eigen::VectorXcd rhs) {
    Eigen::VectorXd re = lu.solve(rhs.real());
    Eigen::VectorXd im = lu.solve(rhs.imag());
    Eigen::VectorXcd out(rhs.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

struct Convolutions {
    Eigen::VectorXcd ia;  // int_0^y e^{-|xi|(y-z)} (1-e^{-2|xi|z}) omega dz
    Eigen::VectorXcd j;   // int_y^ymax e^{-|xi|(z-y)} omega dz
};

Convolutions convolve(const ModeField& omega) {
    const auto& ops = conv_ops(omega.grid, std::abs(omega.xi));
    const int n = omega.grid->size();

    Eigen::VectorXcd fI = omega.values;
    fI[0] = 0.0;
    Eigen::VectorXcd I = solve_cols(ops.lower, fI);

    Eigen::VectorXcd fL = ops.expy.cast<complexd>().cwiseProduct(omega.values);
    fL[0] = 0.0;
    // L' = e^{-|xi| y} f with L(0)=0 shares the |xi|=0 lower factorization.
    Eigen::VectorXcd L = solve_cols(conv_ops(omega.grid, 0).lower, fL);

    Eigen::VectorXcd fJ = -omega.values;
    fJ[n - 1] = 0.0;
    Eigen::VectorXcd J = solve_cols(ops.upper, fJ);

    Convolutions c;
    c.ia = I - ops.expy.cast<complexd>().cwiseProduct(L);
    c.j = J;
    return c;
}

// (1 - e^{-x})/x with a series guard for small x.
double expm1_ratio(double x) {
    if (std::abs(x) < 1e-3) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return -std::expm1(-x) / x;
}

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

}  // namespace

ModeField velocity_u1(const ModeField& omega) {
    const auto& y = omega.grid->nodes();
    if (omega.xi == 0) {
        Eigen::VectorXcd f = -omega.values;
        f[omega.grid->size() - 1] = 0.0;
        Eigen::VectorXcd J = solve_cols(conv_ops(omega.grid, 0).upper, f);
        return ModeField(0, std::move(J), omega.grid);
    }
    const double k = std::abs(omega.xi);
    Convolutions c = convolve(omega);
    Eigen::ArrayXd img = (-2.0 * k * y.array()).exp();
    Eigen::VectorXcd u = 0.5 * (-c.ia.array() + (1.0 + img).cast<complexd>() * c.j.array()).matrix();
    return ModeField(omega.xi, std::move(u), omega.grid);
}

ModeField velocity_u2(const ModeField& omega) {
    const auto& y = omega.grid->nodes();
    if (omega.xi == 0) {
        // Forced by incompressibility with u2(0)=0: the xi=0 component vanishes.
        return ModeField(0, Eigen::VectorXcd::Zero(omega.grid->size()), omega.grid);
    }
    const double k = std::abs(omega.xi);
    const complexd coef = complexd(0.0, -double(omega.xi)) / (2.0 * k);
    Convolutions c = convolve(omega);
    Eigen::ArrayXd img = (-2.0 * k * y.array()).exp();
    Eigen::VectorXcd u = coef * (c.ia.array() + (1.0 - img).cast<complexd>() * c.j.array()).matrix();
    u[0] = 0.0;
    return ModeField(omega.xi, std::move(u), omega.grid);
}

namespace {

ModeField u2_over_y_impl(const ModeField& omega, bool strict) {
    const int n = omega.grid->size();
    if (omega.xi == 0) return ModeField(0, Eigen::VectorXcd::Zero(n), omega.grid);

    const auto& y = omega.grid->nodes();
    const double k = std::abs(omega.xi);
    const complexd coef = complexd(0.0, -double(omega.xi)) / (2.0 * k);
    const auto& ops = conv_ops(omega.grid, std::abs(omega.xi));

    Eigen::VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -std::expm1(-2.0 * k * y[i]) * omega.values[i];
    Eigen::VectorXcd g = solve_cols(ops.ratio, rhs);

    Convolutions c = convolve(omega);
    // Consistency of the regular-singular solve against the direct integral.
    // The denominator is floored by the mode magnitude, and modes below
    // double-precision relevance are exempt: the ratio on pure roundoff
    // fields is noise over noise.
    const double omax = omega.values.cwiseAbs().maxCoeff();
    const double scale = std::max(c.ia.cwiseAbs().maxCoeff(), 1e-3 * omax);
    if (strict && omax > 1e-13) {
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(y[i] * g[i] - c.ia[i]));
        if (err / scale > 1e-6)
            throw NumericalError("u2_over_y: cancellation error near y=0 above 1e-6 (grid too coarse)");
    }

    Eigen::VectorXcd out(n);
    for (int i = 0; i < n; ++i) {
        double phi = 2.0 * k * expm1_ratio(2.0 * k * y[i]);
        out[i] = coef * (g[i] + phi * c.j[i]);
    }
    return ModeField(omega.xi, std::move(out), omega.grid);
}

}  // namespace

ModeField u2_over_y(const ModeField& omega) { return u2_over_y_impl(omega, true); }

complexd trace_operator(const ModeField& f) {
    const auto& ops = conv_ops(f.grid, std::abs(f.xi));
    Eigen::VectorXcd integrand = ops.expy.cast<complexd>().cwiseProduct(f.values);
    return -f.grid->integrate(integrand);
}

complexd compatibility(const ModeField& omega) { return -trace_operator(omega); }

VelocityState velocity(const VorticityState& omega) {
    const int K = omega.K();
    VelocityState v;
    v.K = K;
    v.time = omega.time();
    v.grid = omega.grid();
    v.u1.resize(2 * K + 1);
    v.u2.resize(2 * K + 1);
    ParallelExceptions guard;
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= 2 * K; ++m) {
        guard.run([&, m] {
            const int xi = m - K;
            v.u1[m] = velocity_u1(omega.mode_field(xi)).values;
            v.u2[m] = velocity_u2(omega.mode_field(xi)).values;
        });
    }
    guard.rethrow();
    return v;
}

namespace {

// Dealiased pointwise product of two mode sets, mode by mode in y-rows.
VorticityState dealiased_product(const VorticityState& a, const VorticityState& b) {
    const int K = a.K();
    const int M = XTransform::dealias_size(K);
    const int ny = a.grid()->size();
    VorticityState prod(K, a.grid(), a.time());
    Eigen::VectorXcd ca(2 * K + 1), cb(2 * K + 1);
    for (int j = 0; j < ny; ++j) {
        for (int xi = -K; xi <= K; ++xi) {
            ca[xi + K] = a.mode(xi)[j];
            cb[xi + K] = b.mode(xi)[j];
        }
        Eigen::VectorXcd pa = XTransform::synthesize(ca, M);
        Eigen::VectorXcd pb = XTransform::synthesize(cb, M);
        Eigen::VectorXcd pc = pa.cwiseProduct(pb);
        Eigen::VectorXcd cc = XTransform::analyze(pc, K);
        for (int xi = -K; xi <= K; ++xi) prod.mode(xi)[j] = cc[xi + K];
    }
    return prod;
}

}  // namespace

NonlinearState nonlinearity(const VorticityState& omega, bool strict_checks) {
    const int K = omega.K();
    const auto grid = omega.grid();

    VorticityState u1s(K, grid, omega.time()), u2ys(K, grid, omega.time());
    VorticityState dx(K, grid, omega.time()), cdy(K, grid, omega.time());
    // Resolution diagnostics are state-relative: a mode is flagged when its
    // differentiation noise, weighted by its amplitude, could contaminate
    // the assembled nonlinearity at the 1e-6 level of the state.
    const double state_scale = omega.max_abs();
    ParallelExceptions guard;
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= 2 * K; ++m) {
        guard.run([&, m] {
            const int xi = m - K;
            ModeField om = omega.mode_field(xi);
            const double mode_scale = om.values.cwiseAbs().maxCoeff();
            if (strict_checks && mode_scale > 1e-13 * state_scale && state_scale > 0.0) {
                const double noise = grid->diff_noise_estimate(om.values);
                if (noise * mode_scale > 1e-6 * state_scale)
                    throw NumericalError(
                        "nonlinearity: differentiation noise above 1e-6 of the state (grid too coarse)");
            }
            u1s.mode(xi) = velocity_u1(om).values;
            u2ys.mode(xi) = u2_over_y_impl(om, false).values;
            dx.mode(xi) = ddx(om, 1).values;
            Eigen::VectorXcd v = grid->diff() * om.values;
            v.array() *= grid->nodes().array().cast<complexd>();
            v[0] = 0.0;
            cdy.mode(xi) = std::move(v);
        });
    }
    guard.rethrow();

    VorticityState p1 = dealiased_product(u1s, dx);
    VorticityState p2 = dealiased_product(u2ys, cdy);

    NonlinearState out;
    out.n = VorticityState(K, grid, omega.time());
    out.b = Eigen::VectorXcd(2 * K + 1);
    for (int xi = -K; xi <= K; ++xi) {
        out.n.mode(xi) = -(p1.mode(xi) + p2.mode(xi));
        out.b[xi + K] = -trace_operator(out.n.mode_field(xi));
    }
    return out;
}

double divergence_residual(const VelocityState& v) {
    double err = 0.0;
    const auto& D = v.grid->diff();
    for (int xi = -v.K; xi <= v.K; ++xi) {
        Eigen::VectorXcd r = complexd(0.0, double(xi)) * v.u1_mode(xi) + D * v.u2_mode(xi);
        err = std::max(err, r.cwiseAbs().maxCoeff());
    }
    return err;
}

double curl_residual(const VelocityState& v, const VorticityState& omega) {
    double err = 0.0;
    const auto& D = v.grid->diff();
    for (int xi = -v.K; xi <= v.K; ++xi) {
        Eigen::VectorXcd r =
            complexd(0.0, double(xi)) * v.u2_mode(xi) - D * v.u1_mode(xi) - omega.mode(xi);
        err = std::max(err, r.cwiseAbs().maxCoeff());
    }
    return err;
}

double kinetic_energy(const VelocityState& v) {
    double sum = 0.0;
    for (int xi = -v.K; xi <= v.K; ++xi) {
        sum += v.grid->quad_weights().dot(v.u1_mode(xi).cwiseAbs2());
        sum += v.grid->quad_weights().dot(v.u2_mode(xi).cwiseAbs2());
    }
    return kTwoPi * sum;
}

double enstrophy(const VorticityState& omega) {
    double sum = 0.0;
    for (int xi = -omega.K(); xi <= omega.K(); ++xi)
        sum += omega.grid()->quad_weights().dot(omega.mode(xi).cwiseAbs2());
    return kTwoPi * sum;
}

}  // namespace nshs
