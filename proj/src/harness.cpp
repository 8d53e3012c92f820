#include "nshs/harness.hpp"

#include <cmath>
#include <sstream>

#include "nshs/biot_savart.hpp"

namespace nshs {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

double fit_slope(const std::vector<double>& nus, const std::vector<double>& vals) {
    // least squares on log-log; requires >= 2 points
    const size_t n = nus.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = std::log(nus[i]);
        const double y = std::log(std::max(vals[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// || grad u ||^2 restricted to [0, b] for one snapshot.
double grad_energy(const VorticityState& s, double b, int eval_points) {
    VelocityState v = velocity(s);
    const auto grid = s.grid();
    auto q = grid->sub_quadrature(0.0, std::min(b, grid->ymax()), eval_points);
    const auto& D = grid->diff();
    double sum = 0.0;
    for (int xi = -s.K(); xi <= s.K(); ++xi) {
        const double k2 = double(xi) * xi;
        Eigen::VectorXcd du1 = D * v.u1_mode(xi);
        Eigen::VectorXcd du2 = D * v.u2_mode(xi);
        auto restrict_sq = [&](const Eigen::VectorXcd& f) {
            Eigen::VectorXcd fe(q.y.size());
            fe.real() = q.interp * f.real();
            fe.imag() = q.interp * f.imag();
            return (q.w.array() * fe.cwiseAbs2().array()).sum();
        };
        sum += restrict_sq(du1) + restrict_sq(du2) +
               k2 * (restrict_sq(v.u1_mode(xi)) + restrict_sq(v.u2_mode(xi)));
    }
    return kTwoPi * sum;
}

double velocity_distance(const VorticityState& a, const VorticityState& b) {
    VelocityState va = velocity(a);
    VelocityState vb = velocity(b);
    const auto& w = a.grid()->quad_weights();
    const int kmin = std::min(a.K(), b.K());
    double sum = 0.0;
    for (int xi = -kmin; xi <= kmin; ++xi) {
        sum += w.dot((va.u1_mode(xi) - vb.u1_mode(xi)).cwiseAbs2());
        sum += w.dot((va.u2_mode(xi) - vb.u2_mode(xi)).cwiseAbs2());
    }
    auto tail = [&](const VelocityState& v, int K) {
        for (int xi = -K; xi <= K; ++xi) {
            if (std::abs(xi) <= kmin) continue;
            sum += w.dot(v.u1_mode(xi).cwiseAbs2());
            sum += w.dot(v.u2_mode(xi).cwiseAbs2());
        }
    };
    tail(va, a.K());
    tail(vb, b.K());
    return std::sqrt(kTwoPi * sum);
}

}  // namespace

KatoDissipation kato_monitor(const Trajectory& traj, double c_factor) {
    KatoDissipation out;
    const double nu = traj.kind == SolverKind::Euler ? 0.0 : traj.config.nu;
    if (nu == 0.0 || traj.diagnostics.size() < 2) return out;

    // Total dissipation from the per-step enstrophy record.
    for (size_t i = 1; i < traj.diagnostics.size(); ++i) {
        const double dt = traj.diagnostics[i].time - traj.diagnostics[i - 1].time;
        out.total +=
            0.5 * dt * (traj.diagnostics[i].enstrophy + traj.diagnostics[i - 1].enstrophy);
    }
    out.total *= nu;

    // Near-wall part on snapshots.
    const double layer = c_factor * nu;
    std::vector<double> ge;
    ge.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots)
        ge.push_back(grad_energy(s, layer, traj.config.eval_points));
    for (size_t i = 1; i < traj.snapshots.size(); ++i) {
        const double dt = traj.snapshots[i].time() - traj.snapshots[i - 1].time();
        out.near_wall += 0.5 * dt * (ge[i] + ge[i - 1]);
    }
    out.near_wall *= nu;
    return out;
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os << "nu,sup_dist,dissipation,katowall,T,slope_running\n";
    os.precision(12);
    for (const auto& r : rows)
        os << r.nu << "," << r.sup_dist << "," << r.dissipation << "," << r.katowall << ","
           << r.T << "," << r.slope_running << "\n";
    return os.str();
}

ConvergenceTable run_convergence(const RunConfig& base, const std::vector<double>& nu_list) {
    for (size_t i = 1; i < nu_list.size(); ++i)
        require(nu_list[i] < nu_list[i - 1], "run_convergence: nu_list must decrease");

    ConvergenceTable table;

    // Euler reference at doubled mode count, same datum and cadence. The
    // shared grid clusters for the smallest viscosity in the sweep.
    RunConfig ecfg = base;
    ecfg.kmax = 2 * base.kmax;
    const double hint = nu_list.back() * std::min(1.0, 16.0 * base.dt);
    auto grid = YGrid::make(base.ny, base.ymax, hint);
    VorticityState edatum = make_datum(ecfg, grid);
    Trajectory euler = run(ecfg, edatum, SolverKind::Euler);
    if (!euler.failure.empty()) {
        table.failures.push_back("euler: " + euler.failure);
        return table;
    }

    std::vector<double> nus_ok, dists, diss;
    for (double nu : nu_list) {
        RunConfig cfg = base;
        cfg.nu = nu;
        VorticityState datum = make_datum(cfg, grid);
        Trajectory visc = run(cfg, datum, SolverKind::Direct);
        if (!visc.failure.empty()) {
            table.failures.push_back("nu=" + std::to_string(nu) + ": " + visc.failure);
            continue;
        }
        double sup = 0.0;
        const size_t m = std::min(visc.snapshots.size(), euler.snapshots.size());
        for (size_t i = 0; i < m; ++i)
            sup = std::max(sup, velocity_distance(visc.snapshots[i], euler.snapshots[i]));
        KatoDissipation kd = kato_monitor(visc, 10.0);

        ConvergenceRow row;
        row.nu = nu;
        row.sup_dist = sup;
        row.dissipation = kd.total;
        row.katowall = kd.near_wall;
        row.T = base.tfinal;
        nus_ok.push_back(nu);
        dists.push_back(sup);
        diss.push_back(kd.total);
        row.slope_running = fit_slope(nus_ok, dists);
        table.rows.push_back(row);
    }
    if (nus_ok.size() >= 3) {
        table.slope = fit_slope(nus_ok, dists);
        table.dissipation_slope = fit_slope(nus_ok, diss);
    }
    return table;
}

std::vector<NormReport> norm_history(const Trajectory& traj) {
    require(!traj.snapshots.empty(), "norm_history: empty trajectory");
    Norms norms(traj.config, traj.front().grid());
    std::vector<NormReport> out;
    out.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots) out.push_back(norms.triple_norm(s));
    return out;
}

GammaSearchResult gamma_search(const RunConfig& cfg, const std::vector<double>& gamma_grid,
                               SolverKind kind) {
    for (size_t i = 1; i < gamma_grid.size(); ++i)
        require(gamma_grid[i] > gamma_grid[i - 1], "gamma_search: grid must increase");

    GammaSearchResult res;
    for (double gamma : gamma_grid) {
        RunConfig c = cfg;
        c.gamma = gamma;
        // T = mu0/(2 gamma) minus the margin 0.05 mu0 / gamma (open interval).
        c.tfinal = 0.45 * c.mu0 / gamma;
        const int steps = std::max(1, static_cast<int>(std::ceil(c.tfinal / cfg.dt)));
        c.dt = c.tfinal / steps;
        c.validate();
        auto grid = make_solver_grid(c);
        VorticityState datum = make_datum(c, grid);
        Trajectory traj = run(c, datum, kind);
        if (!traj.failure.empty()) {
            res.tried.emplace_back(gamma, std::numeric_limits<double>::infinity());
            continue;
        }
        auto history = norm_history(traj);
        const double initial = history.front().triple;
        double sup = 0.0;
        for (const auto& r : history) sup = std::max(sup, r.triple);
        const double ratio = initial > 0.0 ? sup / initial : (sup > 0.0 ? 1e300 : 1.0);
        res.tried.emplace_back(gamma, ratio);
        if (ratio <= 3.0) {
            res.found = true;
            res.gamma = gamma;
            res.horizon = c.tfinal;
            res.sup_ratio = ratio;
            return res;
        }
    }
    return res;
}

}  // namespace nshs
