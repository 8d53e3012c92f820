#include "nshs/solvers.hpp"

#include <cmath>
#include <iostream>

#include "nshs/kernels.hpp"
#include "nshs/norms.hpp"

namespace nshs {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Gauss-Legendre nodes/weights on [0,1] (tabulated for small q, computed by
// Newton on Legendre polynomials otherwise).
void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
    x.assign(q, 0.0);
    w.assign(q, 0.0);
    for (int i = 0; i < q; ++i) {
        // Initial guess (Chebyshev-like), then Newton on P_q.
        double t = std::cos(kPi * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = q * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= q; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = q * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t);  // map [-1,1] -> [0,1], reversed to ascend
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

double lagrange_weight(const std::vector<double>& nodes, int j, double s) {
    double v = 1.0;
    for (size_t m = 0; m < nodes.size(); ++m) {
        if (static_cast<int>(m) == j) continue;
        v *= (s - nodes[m]) / (nodes[j] - nodes[m]);
    }
    return v;
}

double compat_drift(const VorticityState& s, const Eigen::VectorXcd& c0) {
    double worst = 0.0;
    for (int xi = -s.K(); xi <= s.K(); ++xi)
        worst = std::max(worst, std::abs(compatibility(s.mode_field(xi)) - c0[xi + s.K()]));
    return worst;
}

double advective_cfl(const VorticityState& s, double dt) {
    VelocityState v = velocity(s);
    const auto& y = s.grid()->nodes();
    double worst = 0.0;
    for (int xi = -s.K(); xi <= s.K(); ++xi) {
        const double u1max = v.u1_mode(xi).cwiseAbs().maxCoeff();
        worst = std::max(worst, u1max * s.K() * dt);
        for (int i = 1; i < y.size(); ++i) {
            const double dy = y[i] - y[i - 1];
            worst = std::max(worst, std::abs(v.u2_mode(xi)[i]) * dt / dy);
        }
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mild (Duhamel) stepper

MildStepper::MildStepper(const RunConfig& cfg, std::shared_ptr<const YGrid> grid)
    : cfg_(cfg), grid_(std::move(grid)) {
    build_window(cfg_.dt);
}

void MildStepper::build_window(double dt) {
    const int c = cfg_.duhamel_nodes;
    window_ = dt;
    nodes_.resize(c + 1);
    for (int k = 0; k <= c; ++k) nodes_[k] = dt * 0.5 * (1.0 - std::cos(kPi * k / c));
    nodes_[c] = dt;

    // Node values -> monomial coefficients of the degree-c interpolant in
    // the normalized window variable x = s/dt.
    Eigen::MatrixXd vand(c + 1, c + 1);
    for (int j = 0; j <= c; ++j)
        for (int q = 0; q <= c; ++q) vand(j, q) = std::pow(nodes_[j] / dt, double(q));
    mono_ = vand.inverse();
}

VorticityState MildStepper::advance(const VorticityState& state, double dt,
                                    int* picard_iters, bool force_linear) const {
    require(dt <= cfg_.dt * (1.0 + 1e-12), "mild_advance: dt exceeds the configured window");
    MildStepper tmp_builder = *this;
    const MildStepper* self = this;
    if (std::abs(dt - cfg_.dt) > 1e-15 * cfg_.dt) {
        tmp_builder.build_window(dt);
        self = &tmp_builder;
    }

    const int c = cfg_.duhamel_nodes;
    const int K = state.K();

    // Window states at the collocation nodes; node 0 is the window start.
    std::vector<VorticityState> w(c + 1, state);
    for (int k = 1; k <= c; ++k) w[k].set_time(state.time() + self->nodes_[k]);

    std::vector<NonlinearState> forcing(c + 1);
    auto recompute_forcing = [&](int upto) {
        // only the window start is an accepted trajectory state
        for (int k = 0; k <= upto; ++k) forcing[k] = nonlinearity(w[k], k == 0);
    };

    if (force_linear) {
        // Zero forcing: single pass, pure kernel application.
        VorticityState out(K, grid_, state.time() + dt);
        for (int xi = -K; xi <= K; ++xi) {
            auto g = cached_green(xi, dt, cfg_.nu, grid_, cfg_.kernel_substeps);
            out.mode(xi) = apply_kernel(*g, state.mode_field(xi)).values;
        }
        if (picard_iters) *picard_iters = 0;
        return out;
    }

    recompute_forcing(0);
    for (int k = 1; k <= c; ++k) forcing[k] = forcing[0];

    int iters = 0;
    const double scale = std::max(1.0, state.max_abs());
    for (; iters < cfg_.picard_max; ++iters) {
        double change = 0.0;
        std::vector<VorticityState> wnew(c + 1, state);
        for (int k = 1; k <= c; ++k) {
            const double theta = self->nodes_[k];
            VorticityState next(K, grid_, state.time() + theta);
            ParallelExceptions guard;
#pragma omp parallel for schedule(static)
            for (int m = 0; m <= 2 * K; ++m) {
                guard.run([&, m] {
                const int xi = m - K;
                auto g_theta = cached_green(xi, theta, cfg_.nu, grid_, cfg_.kernel_substeps);
                Eigen::VectorXcd acc = apply_kernel(*g_theta, state.mode_field(xi)).values;
                // Monomial model of the window forcing and trace datum.
                std::vector<Eigen::VectorXcd> Nq(c + 1);
                std::vector<complexd> bq(c + 1);
                for (int q = 0; q <= c; ++q) {
                    Nq[q] = Eigen::VectorXcd::Zero(grid_->size());
                    bq[q] = 0.0;
                    for (int j = 0; j <= c; ++j) {
                        Nq[q] += self->mono_(q, j) * forcing[j].n.mode(xi);
                        bq[q] += self->mono_(q, j) * forcing[j].b[m];
                    }
                }
                acc += duhamel_window(xi, theta, self->window_, cfg_.nu, grid_, Nq, bq);
                next.mode(xi) = std::move(acc);
                });
            }
            guard.rethrow();
            wnew[k] = std::move(next);
        }
        for (int k = 1; k <= c; ++k) {
            double d = 0.0;
            for (int xi = -K; xi <= K; ++xi)
                d = std::max(d, (wnew[k].mode(xi) - w[k].mode(xi)).cwiseAbs().maxCoeff());
            change = std::max(change, d);
            w[k] = std::move(wnew[k]);
        }
        if (change <= cfg_.picard_tol * scale) {
            ++iters;
            break;
        }
        recompute_forcing(c);
    }
    if (iters >= cfg_.picard_max)
        throw NumericalError("mild_advance: Picard iteration did not converge (reduce dt)");
    if (picard_iters) *picard_iters = iters;
    VorticityState out = std::move(w[c]);
    out.symmetrize();
    return out;
}

// ---------------------------------------------------------------------------
// Direct (Crank-Nicolson + AB2) stepper

DirectStepper::DirectStepper(const RunConfig& cfg, std::shared_ptr<const YGrid> grid)
    : cfg_(cfg), grid_(std::move(grid)) {}

void DirectStepper::build(double dt, int kmax) {
    if (dt == dt_built_ && static_cast<int>(lu_.size()) > kmax) return;
    const int n = grid_->size();
    const auto& D = grid_->diff();
    lu_.resize(kmax + 1);
    rhs_op_.resize(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        Eigen::MatrixXd A = cfg_.nu * (D * D - double(k) * double(k) * Eigen::MatrixXd::Identity(n, n));
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - 0.5 * dt * A;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(n, n) + 0.5 * dt * A;
        // Robin row at the wall enforces nu(d_y + |xi|) omega^{n+1} = B;
        // homogeneous Dirichlet row at the truncation boundary.
        lhs.row(0) = cfg_.nu * (D.row(0) + double(k) * Eigen::RowVectorXd::Unit(n, 0));
        lhs.row(n - 1) = Eigen::RowVectorXd::Unit(n, n - 1);
        rhs.row(0).setZero();
        rhs.row(n - 1).setZero();
        lu_[k].compute(lhs);
        rhs_op_[k] = std::move(rhs);
    }
    dt_built_ = dt;
}

VorticityState DirectStepper::solve_step(const VorticityState& state,
                                         const VorticityState& n_expl,
                                         const Eigen::VectorXcd& b_new, double dt) const {
    const int K = state.K();
    const int n = grid_->size();
    VorticityState out(K, grid_, state.time() + dt);
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= 2 * K; ++m) {
        const int xi = m - K;
        const int k = std::abs(xi);
        Eigen::VectorXcd rhs(n);
        rhs.real() = rhs_op_[k] * state.mode(xi).real();
        rhs.imag() = rhs_op_[k] * state.mode(xi).imag();
        rhs += dt * n_expl.mode(xi);
        rhs[0] = b_new[m];
        rhs[n - 1] = 0.0;
        Eigen::VectorXcd sol(n);
        sol.real() = lu_[k].solve(rhs.real());
        sol.imag() = lu_[k].solve(rhs.imag());
        out.mode(xi) = std::move(sol);
    }
    return out;
}

VorticityState DirectStepper::advance(const VorticityState& state, double dt, bool force_linear) {
    build(dt, state.K());
    const int K = state.K();
    if (force_linear) {
        VorticityState zero_n(K, grid_, state.time());
        VorticityState out = solve_step(state, zero_n, Eigen::VectorXcd::Zero(2 * K + 1), dt);
        out.symmetrize();
        return out;
    }
    NonlinearState cur = nonlinearity(state);
    last_cfl_ = advective_cfl(state, dt);
    if (last_cfl_ > 0.9)
        std::cerr << "[nshs] warning: advective Courant number " << last_cfl_ << " > 0.9\n";

    VorticityState out(K, grid_);
    if (!have_prev_) {
        // Bootstrap: explicit Euler predictor, one Picard correction.
        VorticityState n_ab = cur.n;
        n_ab.set_time(state.time());
        VorticityState pred = solve_step(state, n_ab, cur.b, dt);
        NonlinearState at_pred = nonlinearity(pred, false);
        VorticityState n_mid(K, grid_, state.time());
        Eigen::VectorXcd b_mid(2 * K + 1);
        for (int xi = -K; xi <= K; ++xi) {
            n_mid.mode(xi) = 0.5 * (cur.n.mode(xi) + at_pred.n.mode(xi));
            b_mid[xi + K] = 0.5 * (cur.b[xi + K] + at_pred.b[xi + K]);
        }
        out = solve_step(state, n_mid, b_mid, dt);
    } else {
        VorticityState n_ab(K, grid_, state.time());
        Eigen::VectorXcd b_new(2 * K + 1);
        for (int xi = -K; xi <= K; ++xi) {
            n_ab.mode(xi) = 1.5 * cur.n.mode(xi) - 0.5 * prev_.n.mode(xi);
            b_new[xi + K] = 2.0 * cur.b[xi + K] - prev_.b[xi + K];
        }
        out = solve_step(state, n_ab, b_new, dt);
    }
    prev_ = std::move(cur);
    have_prev_ = true;
    // Top-octave filter: Crank-Nicolson is neutral at the stiff end, so
    // Robin-transient tail content would otherwise ring and accumulate.
    for (int xi = -K; xi <= K; ++xi) out.mode(xi) = grid_->filter_tail(out.mode(xi));
    out.symmetrize();
    return out;
}

// ---------------------------------------------------------------------------
// Euler (SSP-RK3) stepper

VorticityState EulerStepper::advance(const VorticityState& state, double dt) const {
    last_cfl_ = advective_cfl(state, dt);
    if (last_cfl_ > 0.9)
        throw NumericalError("euler_advance: CFL violation (advective Courant > 0.9)");
    const int K = state.K();
    auto rhs = [&](const VorticityState& s, bool strict) { return nonlinearity(s, strict).n; };

    VorticityState s1(K, state.grid(), state.time());
    VorticityState n0 = rhs(state, true);
    for (int xi = -K; xi <= K; ++xi) s1.mode(xi) = state.mode(xi) + dt * n0.mode(xi);

    VorticityState s2(K, state.grid(), state.time());
    VorticityState n1 = rhs(s1, false);
    for (int xi = -K; xi <= K; ++xi)
        s2.mode(xi) = 0.75 * state.mode(xi) + 0.25 * (s1.mode(xi) + dt * n1.mode(xi));

    VorticityState out(K, state.grid(), state.time() + dt);
    VorticityState n2 = rhs(s2, false);
    for (int xi = -K; xi <= K; ++xi)
        out.mode(xi) = state.mode(xi) / 3.0 + 2.0 / 3.0 * (s2.mode(xi) + dt * n2.mode(xi));
    out.symmetrize();
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory driver

Trajectory run(const RunConfig& cfg, const VorticityState& initial, SolverKind kind) {
    Trajectory traj;
    traj.kind = kind;
    traj.config = cfg;
    traj.snapshots.push_back(initial);

    Eigen::VectorXcd c0(2 * initial.K() + 1);
    for (int xi = -initial.K(); xi <= initial.K(); ++xi)
        c0[xi + initial.K()] = compatibility(initial.mode_field(xi));

    auto record = [&](const VorticityState& s, int picard, double cfl) {
        StepDiagnostics d;
        d.time = s.time();
        VelocityState v = velocity(s);
        d.energy = kinetic_energy(v);
        d.enstrophy = enstrophy(s);
        d.compat_max = compat_drift(s, c0);
        d.picard_iters = picard;
        d.cfl = cfl;
        traj.diagnostics.push_back(d);
    };
    record(initial, 0, 0.0);

    const int steps = static_cast<int>(std::llround(cfg.tfinal / cfg.dt));
    MildStepper mild(cfg, initial.grid());
    DirectStepper direct(cfg, initial.grid());
    EulerStepper euler(cfg);

    VorticityState cur = initial;
    try {
        for (int s = 0; s < steps; ++s) {
            int picard = 0;
            double cfl = 0.0;
            switch (kind) {
                case SolverKind::Mild:
                    cur = mild.advance(cur, cfg.dt, &picard);
                    break;
                case SolverKind::Direct:
                    cur = direct.advance(cur, cfg.dt);
                    cfl = direct.last_cfl();
                    break;
                case SolverKind::Euler:
                    cur = euler.advance(cur, cfg.dt);
                    cfl = euler.last_cfl();
                    break;
            }
            if (!cur.finite()) throw NumericalError("run: state lost finiteness");
            record(cur, picard, cfl);
            if ((s + 1) % cfg.snapshot_every == 0 || s + 1 == steps)
                traj.snapshots.push_back(cur);
        }
    } catch (const std::exception& e) {
        traj.failure = e.what();
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Initial data

namespace {

Eigen::VectorXcd real_profile(const std::function<double(double)>& f,
                              const std::shared_ptr<const YGrid>& grid) {
    Eigen::VectorXcd v(grid->size());
    for (int i = 0; i < grid->size(); ++i) v[i] = f(grid->nodes()[i]);
    return v;
}

}  // namespace

VorticityState project_compatible(const VorticityState& s) {
    VorticityState out = s;
    const auto& grid = s.grid();
    // Projection direction independent of the shipped datum profiles, so the
    // subtraction never annihilates a datum outright.
    Eigen::VectorXcd dir = real_profile(
        [](double y) { return y * y * y * std::exp(-y * y); }, grid);
    for (int xi = -s.K(); xi <= s.K(); ++xi) {
        const complexd cd = compatibility(ModeField(xi, dir, grid));
        const complexd c = compatibility(s.mode_field(xi));
        out.mode(xi) -= (c / cd) * dir;
    }
    return out;
}

VorticityState make_datum(const RunConfig& cfg, std::shared_ptr<const YGrid> grid) {
    VorticityState s(cfg.kmax, grid, 0.0);
    const double A = cfg.amplitude;
    switch (cfg.family) {
        case DatumFamily::Bump: {
            require(cfg.kmax >= 1, "bump datum needs kmax >= 1");
            Eigen::VectorXcd prof = real_profile(
                [](double y) { return y * y * std::exp(-y * y); }, grid);
            s.mode(1) = complexd(0.0, -0.5) * A * prof;
            s.mode(-1) = complexd(0.0, 0.5) * A * prof;
            break;
        }
        case DatumFamily::Maekawa: {
            require(cfg.kmax >= 1, "maekawa datum needs kmax >= 1");
            auto bump = [](double y) {
                const double r = (y - 1.0) / 0.5;
                return std::abs(r) < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) * 2.718281828459045 : 0.0;
            };
            Eigen::VectorXcd prof = real_profile(bump, grid);
            s.mode(0) = 0.3 * A * prof;
            s.mode(1) = complexd(0.0, -0.5) * A * prof;
            s.mode(-1) = complexd(0.0, 0.5) * A * prof;
            break;
        }
        case DatumFamily::Analytic: {
            for (int xi = -cfg.kmax; xi <= cfg.kmax; ++xi) {
                const double c = A * std::exp(-0.3 * std::abs(xi));
                s.mode(xi) = c * real_profile([](double y) { return y * std::exp(-y * y); }, grid);
            }
            break;
        }
    }
    if (cfg.compatible) s = project_compatible(s);
    return s;
}

InitialDataReport validate_initial_data(const VorticityState& initial, const RunConfig& cfg) {
    Norms norms(cfg, initial.grid());
    InitialDataReport rep;
    const double mu0 = cfg.mu0;

    MuBreakdown br = norms.mu_breakdown(initial, mu0 * (1.0 - 1e-9));
    for (size_t p = 0; p < kDerivPairs.size(); ++p) {
        rep.x_sum += br.x_parts[p];
        rep.y_sum += br.y_parts[p];
    }

    // Sobolev sum with conormal derivatives through order 4.
    const auto& D = initial.grid()->diff();
    const auto& y = initial.grid()->nodes();
    auto qs = initial.grid()->sub_quadrature(0.5, initial.grid()->ymax(), cfg.eval_points);
    for (int i = 0; i + 0 <= 4; ++i) {
        for (int j = 0; i + j <= 4; ++j) {
            double sum = 0.0;
            for (int xi = -initial.K(); xi <= initial.K(); ++xi) {
                const double fac = std::pow(std::abs(double(xi)), double(i));
                if (fac == 0.0 && i > 0) continue;
                Eigen::VectorXcd v = initial.mode(xi);
                for (int d = 0; d < j; ++d) {
                    v = (D * v).eval();
                    v.array() *= y.array().cast<complexd>();
                    v[0] = 0.0;
                }
                Eigen::VectorXcd ve(qs.y.size());
                ve.real() = qs.interp * v.real();
                ve.imag() = qs.interp * v.imag();
                sum += fac * fac * (qs.w.array() * qs.y.array().square() * ve.cwiseAbs2().array()).sum();
            }
            rep.s_sum += std::sqrt(sum);
        }
    }
    rep.m_est = rep.x_sum + rep.y_sum + rep.s_sum;
    rep.finite = std::isfinite(rep.m_est);
    return rep;
}

}  // namespace nshs
