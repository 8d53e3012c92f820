#include "nshs/norms.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "nshs/weight.hpp"

namespace nshs {

MuSchedule mu_schedule(double mu, double mu0, double gamma, double s) {
    require(mu > 0.0 && mu < mu0 - gamma * s, "mu_schedule: requires 0 < mu < mu0 - gamma s");
    const double room = mu0 - mu - gamma * s;
    return MuSchedule{mu, mu + 0.25 * room, mu + 0.5 * room};
}

Norms::Norms(const RunConfig& cfg, std::shared_ptr<const YGrid> grid)
    : cfg_(cfg), grid_(std::move(grid)) {
    require(grid_->ymax() >= 1.0 + cfg_.mu0, "norms: grid must extend past 1+mu0");
}

Norms::Slice Norms::make_slice(double mu) const {
    Slice sl;
    auto q = grid_->sub_quadrature(0.0, 1.0 + mu, cfg_.eval_points);
    sl.y = std::move(q.y);
    sl.w = std::move(q.w);
    sl.interp = std::move(q.interp);
    sl.logw = Eigen::VectorXd(sl.y.size());
    for (int i = 0; i < sl.y.size(); ++i) sl.logw[i] = std::log(weight_w(sl.y[i], cfg_.nu));
    return sl;
}

double Norms::weighted_linf(const ModeField& f, double mu) const {
    require(mu >= 0.0 && mu <= cfg_.mu0 + 1e-12, "weighted_linf: mu out of [0, mu0]");
    Slice sl = make_slice(mu);
    Eigen::VectorXcd vals(sl.interp.rows());
    vals.real() = sl.interp * f.values.real();
    vals.imag() = sl.interp * f.values.imag();
    double best = 0.0;
    for (int i = 0; i < vals.size(); ++i)
        best = std::max(best, std::exp(sl.logw[i]) * std::abs(vals[i]));
    return best;
}

// sup over [0,1+mu] of e^{eps0 (1+mu-y)|xi|} w(y) |f(y)|, computed in logs so
// large |xi| exponentials cannot overflow before cancellation.
double Norms::x_of_mode(const Slice& sl, int xi, const Eigen::VectorXcd& vals, double mu) const {
    Eigen::VectorXcd v(sl.interp.rows());
    v.real() = sl.interp * vals.real();
    v.imag() = sl.interp * vals.imag();
    double best = -std::numeric_limits<double>::infinity();
    const double k = std::abs(xi);
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a == 0.0) continue;
        const double s = cfg_.eps0 * (1.0 + mu - sl.y[i]) * k + sl.logw[i] + std::log(a);
        best = std::max(best, s);
    }
    return std::isfinite(best) ? std::exp(best) : 0.0;
}

double Norms::y_of_mode(const Slice& sl, int xi, const Eigen::VectorXcd& vals, double mu) const {
    Eigen::VectorXcd v(sl.interp.rows());
    v.real() = sl.interp * vals.real();
    v.imag() = sl.interp * vals.imag();
    double sum = 0.0;
    const double k = std::abs(xi);
    for (int i = 0; i < v.size(); ++i)
        sum += sl.w[i] * std::exp(cfg_.eps0 * (1.0 + mu - sl.y[i]) * k) * std::abs(v[i]);
    return sum;
}

namespace {

// Sample points along the upper half of the contour dOmega_theta:
// z = x(1 + i theta) for x in [0,1], then the cap z = x + i(1+theta-x).
// The lower half mirrors by conjugation, which for conjugate-symmetric
// states contributes the same value.
struct ContourPoint {
    complexd z;
    double arc;  // |dz| weight
};

std::vector<ContourPoint> contour_points(double theta, int m) {
    std::vector<ContourPoint> pts;
    pts.reserve(2 * m);
    const double seg1 = std::sqrt(1.0 + theta * theta);
    for (int i = 0; i < m; ++i) {
        const double x = (i + 0.5) / m;
        pts.push_back({complexd(x, theta * x), seg1 / m});
    }
    const int mc = std::max(2, m / 4);
    const double seg2 = theta * std::sqrt(2.0);
    for (int i = 0; i < mc; ++i) {
        const double x = 1.0 + theta * (i + 0.5) / mc;
        pts.push_back({complexd(x, 1.0 + theta - x), seg2 / mc});
    }
    return pts;
}

}  // namespace

double Norms::x_of_mode_contour(int xi, const Eigen::VectorXcd& vals, double mu) const {
    double best = 0.0;
    const double k = std::abs(xi);
    for (int c = 1; c <= cfg_.contours; ++c) {
        const double theta = mu * c / cfg_.contours * (1.0 - 1e-9);
        for (const auto& p : contour_points(theta, cfg_.eval_points)) {
            const complexd fz = grid_->interpolate(vals, p.z);
            const double re = p.z.real();
            const double val = weight_w(re, cfg_.nu) * std::abs(fz) *
                               std::exp(cfg_.eps0 * std::max(0.0, 1.0 + mu - re) * k);
            best = std::max(best, val);
        }
    }
    return best;
}

double Norms::y_of_mode_contour(int xi, const Eigen::VectorXcd& vals, double mu) const {
    double best = 0.0;
    const double k = std::abs(xi);
    for (int c = 1; c <= cfg_.contours; ++c) {
        const double theta = mu * c / cfg_.contours * (1.0 - 1e-9);
        double sum = 0.0;
        for (const auto& p : contour_points(theta, cfg_.eval_points)) {
            const complexd fz = grid_->interpolate(vals, p.z);
            const double re = p.z.real();
            sum += p.arc * std::abs(fz) * std::exp(cfg_.eps0 * std::max(0.0, 1.0 + mu - re) * k);
        }
        best = std::max(best, sum);
    }
    return best;
}

std::vector<std::array<Eigen::VectorXcd, 3>> Norms::conormal_profiles(
    const VorticityState& s) const {
    const int K = s.K();
    std::vector<std::array<Eigen::VectorXcd, 3>> out(2 * K + 1);
    const auto& D = grid_->diff();
    const auto& y = grid_->nodes();
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= 2 * K; ++m) {
        out[m][0] = s.mode(m - K);
        for (int j = 1; j <= 2; ++j) {
            Eigen::VectorXcd v = D * out[m][j - 1];
            v.array() *= y.array().cast<complexd>();
            v[0] = 0.0;
            out[m][j] = std::move(v);
        }
    }
    return out;
}

MuBreakdown Norms::mu_breakdown(const VorticityState& s, double mu) const {
    auto profiles = conormal_profiles(s);
    MuBreakdown br;
    br.mu = mu;
    const Slice sl = make_slice(mu);
    const int K = s.K();
    for (size_t p = 0; p < kDerivPairs.size(); ++p) {
        const auto [i, j] = kDerivPairs[p];
        double xs = 0.0, ys = 0.0;
        for (int m = 0; m <= 2 * K; ++m) {
            const int xi = m - K;
            const double fac = std::pow(std::abs(double(xi)), double(i));
            if (fac == 0.0 && i > 0) continue;
            if (cfg_.continuation) {
                xs += fac * x_of_mode_contour(xi, profiles[m][j], mu);
                ys += fac * y_of_mode_contour(xi, profiles[m][j], mu);
            } else {
                xs += fac * x_of_mode(sl, xi, profiles[m][j], mu);
                ys += fac * y_of_mode(sl, xi, profiles[m][j], mu);
            }
        }
        br.x_parts[p] = xs;
        br.y_parts[p] = ys;
    }
    return br;
}

namespace {

double combine(const MuBreakdown& br, const std::array<double, 6>& parts, double room,
               double expo) {
    double low = 0.0, high = 0.0;
    for (size_t p = 0; p < kDerivPairs.size(); ++p) {
        const auto [i, j] = kDerivPairs[p];
        (i + j <= 1 ? low : high) += parts[p];
    }
    return low + std::pow(room, expo) * high;
}

}  // namespace

double Norms::x_mu_norm(const VorticityState& s, double mu, MuBreakdown* parts) const {
    const double room = cfg_.mu0 - mu - cfg_.gamma * s.time();
    require(room > 0.0, "x_mu_norm: requires mu < mu0 - gamma t");
    MuBreakdown br = mu_breakdown(s, mu);
    if (parts) *parts = br;
    return combine(br, br.x_parts, room, 0.5 + cfg_.alpha);
}

double Norms::y_mu_norm(const VorticityState& s, double mu, MuBreakdown* parts) const {
    const double room = cfg_.mu0 - mu - cfg_.gamma * s.time();
    require(room > 0.0, "y_mu_norm: requires mu < mu0 - gamma t");
    MuBreakdown br = mu_breakdown(s, mu);
    if (parts) *parts = br;
    return combine(br, br.y_parts, room, cfg_.alpha);
}

std::vector<double> Norms::mu_grid(double t) const {
    const double mu_max = cfg_.mu0 - cfg_.gamma * t;
    require(mu_max > 0.0, "mu_grid: state time is past mu0/gamma");
    std::vector<double> grid(cfg_.mu_points);
    // Offsets from the endpoint decay geometrically from 0.95 mu_max to
    // 1e-6 mu_max: the sup integrand vanishes at the endpoint only through
    // the (mu0 - mu - gamma t)^(1/2+alpha) prefactor.
    const double lo = 1e-6, hi = 0.95;
    for (int k = 0; k < cfg_.mu_points; ++k) {
        const double f = (cfg_.mu_points == 1) ? lo
                                               : hi * std::pow(lo / hi, double(k) / (cfg_.mu_points - 1));
        grid[k] = mu_max * (1.0 - f);
    }
    return grid;
}

double Norms::x_t_norm(const VorticityState& s, double* achieving_mu) const {
    double best = 0.0, best_mu = 0.0;
    for (double mu : mu_grid(s.time())) {
        const double v = x_mu_norm(s, mu);
        if (v > best) {
            best = v;
            best_mu = mu;
        }
    }
    if (achieving_mu) *achieving_mu = best_mu;
    return best;
}

double Norms::y_t_norm(const VorticityState& s, double* achieving_mu) const {
    double best = 0.0, best_mu = 0.0;
    for (double mu : mu_grid(s.time())) {
        const double v = y_mu_norm(s, mu);
        if (v > best) {
            best = v;
            best_mu = mu;
        }
    }
    if (achieving_mu) *achieving_mu = best_mu;
    return best;
}

double Norms::s_norm(const VorticityState& s) const {
    auto q = grid_->sub_quadrature(0.5, grid_->ymax(), cfg_.eval_points);
    double sum = 0.0;
    for (int xi = -s.K(); xi <= s.K(); ++xi) {
        Eigen::VectorXcd v(q.y.size());
        v.real() = q.interp * s.mode(xi).real();
        v.imag() = q.interp * s.mode(xi).imag();
        sum += (q.w.array() * q.y.array().square() * v.cwiseAbs2().array()).sum();
    }
    return std::sqrt(sum);
}

double Norms::s_mu_norm(const VorticityState& s, double mu) const {
    require(grid_->ymax() > 1.0 + mu, "s_mu_norm: grid must extend past 1+mu");
    auto q = grid_->sub_quadrature(1.0 + mu, grid_->ymax(), cfg_.eval_points);
    double sum = 0.0;
    for (int xi = -s.K(); xi <= s.K(); ++xi) {
        Eigen::VectorXcd v(q.y.size());
        v.real() = q.interp * s.mode(xi).real();
        v.imag() = q.interp * s.mode(xi).imag();
        sum += std::sqrt((q.w.array() * q.y.array().square() * v.cwiseAbs2().array()).sum());
    }
    return sum;
}

double Norms::z_norm(const VorticityState& s) const {
    auto q = grid_->sub_quadrature(0.5, grid_->ymax(), cfg_.eval_points);
    const auto& D = grid_->diff();
    const int K = s.K();
    double total = 0.0;
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; i + j <= 3; ++j) {
            double sum = 0.0;
            for (int xi = -K; xi <= K; ++xi) {
                Eigen::VectorXcd v = s.mode(xi);
                for (int d = 0; d < j; ++d) v = (D * v).eval();
                const double fac = std::pow(std::abs(double(xi)), double(i));
                if (fac == 0.0 && i > 0) continue;
                Eigen::VectorXcd ve(q.y.size());
                ve.real() = q.interp * v.real();
                ve.imag() = q.interp * v.imag();
                sum += fac * fac * (q.w.array() * q.y.array().square() * ve.cwiseAbs2().array()).sum();
            }
            total += std::sqrt(sum);
        }
    }
    return total;
}

NormReport Norms::triple_norm(const VorticityState& s) const {
    NormReport r;
    r.time = s.time();
    r.mu_max = cfg_.mu0 - cfg_.gamma * s.time();
    const auto grid = mu_grid(s.time());
    double bx = 0.0, by = 0.0;
    for (double mu : grid) {
        MuBreakdown br = mu_breakdown(s, mu);
        const double room = cfg_.mu0 - mu - cfg_.gamma * s.time();
        const double xv = combine(br, br.x_parts, room, 0.5 + cfg_.alpha);
        const double yv = combine(br, br.y_parts, room, cfg_.alpha);
        if (xv > bx) {
            bx = xv;
            r.x_achieving_mu = mu;
        }
        if (yv > by) {
            by = yv;
            r.y_achieving_mu = mu;
        }
        r.per_mu.push_back(br);
    }
    r.x_t = bx;
    r.y_t = by;
    r.z = z_norm(s);
    r.triple = r.x_t + r.y_t + r.z;
    return r;
}

std::string NormReport::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["time"] = time;
    j["x_t"] = x_t;
    j["y_t"] = y_t;
    j["z"] = z;
    j["triple"] = triple;
    j["mu_max"] = mu_max;
    j["x_achieving_mu"] = x_achieving_mu;
    j["y_achieving_mu"] = y_achieving_mu;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& br : per_mu) {
        nlohmann::json row;
        row["mu"] = br.mu;
        for (size_t p = 0; p < kDerivPairs.size(); ++p) {
            const std::string key =
                "d" + std::to_string(kDerivPairs[p].first) + std::to_string(kDerivPairs[p].second);
            row["x_" + key] = br.x_parts[p];
            row["y_" + key] = br.y_parts[p];
        }
        rows.push_back(row);
    }
    j["per_mu"] = rows;
    return j.dump(2);
}

}  // namespace nshs
