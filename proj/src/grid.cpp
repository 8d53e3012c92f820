#include "nshs/grid.hpp"

#include <cmath>

namespace nshs {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Smallest map slope parameter b such that the first `count` CGL nodes land
// below ylayer. sinh(b*s)/sinh(b) is decreasing in b for fixed s in (0,1).
double solve_map_parameter(const Eigen::VectorXd& s, double ymax, double ylayer,
                           double spacing, int count) {
    auto ok = [&](double b) {
        auto y = [&](double sv) {
            return b == 0.0 ? ymax * sv : ymax * std::sinh(b * sv) / std::sinh(b);
        };
        return y(s[count - 1]) <= ylayer && y(s[1]) <= spacing;
    };
    if (ok(0.0)) return 0.0;
    double lo = 0.0, hi = 34.0;
    if (!ok(hi)) return -1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

void clenshaw_curtis(int n, Eigen::VectorXd& s, Eigen::VectorXd& w) {
    const int N = n - 1;
    s.resize(n);
    w.resize(n);
    for (int j = 0; j <= N; ++j) s[j] = 0.5 * (1.0 - std::cos(kPi * j / N));
    // CC weights on [-1,1] by direct cosine sums, then scaled to [0,1].
    // Exact for polynomials of degree <= N.
    for (int j = 0; j <= N; ++j) {
        double c = (j == 0 || j == N) ? 1.0 : 2.0;
        double sum = 1.0;
        for (int k = 1; k <= N / 2; ++k) {
            double bk = (2 * k == N) ? 1.0 : 2.0;
            sum -= bk * std::cos(2.0 * kPi * k * j / N) / (4.0 * k * k - 1.0);
        }
        w[j] = 0.5 * c * sum / N;  // extra 1/2 maps [-1,1] -> [0,1]
    }
}

std::shared_ptr<const YGrid> YGrid::make(int n_nodes, double ymax, double nu_hint) {
    require(n_nodes >= 32, "make_grid: n_nodes must be >= 32");
    require(ymax >= 2.0, "make_grid: ymax must be >= 2");
    require(nu_hint > 0.0, "make_grid: nu must be positive");

    auto g = std::shared_ptr<YGrid>(new YGrid());
    g->ymax_ = ymax;
    g->nu_hint_ = nu_hint;

    Eigen::VectorXd s, wcc;
    clenshaw_curtis(n_nodes, s, wcc);
    g->s_ = s;

    const double root_nu = std::sqrt(nu_hint);
    const double b = solve_map_parameter(s, ymax, std::min(root_nu, ymax), root_nu / 8.0, 8);
    if (b < 0.0)
        throw InvalidArgument("make_grid: n_nodes too small to resolve the boundary layer at this nu");
    g->bmap_ = b;

    const int n = n_nodes;
    g->nodes_.resize(n);
    g->dyds_.resize(n);
    for (int j = 0; j < n; ++j) {
        g->nodes_[j] = g->map(s[j]);
        g->dyds_[j] = (b == 0.0) ? ymax : ymax * b * std::cosh(b * s[j]) / std::sinh(b);
    }
    g->nodes_[0] = 0.0;
    g->nodes_[n - 1] = ymax;

    // Clustering this hard leaves the bulk under-resolved; the node budget
    // cannot serve both the layer and the O(1) region.
    double max_cell = 0.0;
    for (int j = 1; j < n; ++j) max_cell = std::max(max_cell, g->nodes_[j] - g->nodes_[j - 1]);
    if (max_cell > ymax / 4.0)
        throw InvalidArgument("make_grid: n_nodes too small to resolve both the boundary layer and the bulk");

    // Mapped quadrature. The raw weights must integrate the map derivative
    // to near machine precision, otherwise the sinh stretch required by this
    // nu is not polynomially resolved at this node count.
    g->wq_ = wcc.cwiseProduct(g->dyds_);
    if (std::abs(g->wq_.sum() - ymax) > 1e-10 * ymax)
        throw InvalidArgument("make_grid: n_nodes too small to resolve the boundary-layer clustering");
    g->wq_ *= ymax / g->wq_.sum();

    // Barycentric weights for CGL: (-1)^j, halved at the endpoints.
    g->bary_.resize(n);
    for (int j = 0; j < n; ++j) {
        g->bary_[j] = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) g->bary_[j] *= 0.5;
    }

    // Differentiation in s by the barycentric formula, then chain rule.
    Eigen::MatrixXd ds(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            ds(i, j) = (g->bary_[j] / g->bary_[i]) / (s[i] - s[j]);
            diag -= ds(i, j);
        }
        ds(i, i) = diag;
    }
    g->d1_ = g->dyds_.cwiseInverse().asDiagonal() * ds;
    return g;
}

double YGrid::map(double s) const {
    return bmap_ == 0.0 ? ymax_ * s : ymax_ * std::sinh(bmap_ * s) / std::sinh(bmap_);
}

double YGrid::imap(double y) const {
    return bmap_ == 0.0 ? y / ymax_ : std::asinh(y / ymax_ * std::sinh(bmap_)) / bmap_;
}

complexd YGrid::imap(complexd y) const {
    return bmap_ == 0.0 ? y / ymax_ : std::asinh(y / ymax_ * std::sinh(bmap_)) / bmap_;
}

Eigen::MatrixXd YGrid::interpolation_matrix(const Eigen::VectorXd& targets) const {
    const int n = size();
    const int m = static_cast<int>(targets.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        const double st = imap(targets[i]);
        int hit = -1;
        for (int j = 0; j < n; ++j)
            if (st == s_[j]) { hit = j; break; }
        if (hit >= 0) {
            P(i, hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < n; ++j) {
            double c = bary_[j] / (st - s_[j]);
            P(i, j) = c;
            denom += c;
        }
        P.row(i) /= denom;
    }
    return P;
}

complexd YGrid::interpolate(const Eigen::VectorXcd& values, complexd y) const {
    const complexd st = imap(y);
    const int n = size();
    for (int j = 0; j < n; ++j)
        if (st == complexd(s_[j], 0.0)) return values[j];
    complexd num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        complexd c = bary_[j] / (st - s_[j]);
        num += c * values[j];
        den += c;
    }
    return num / den;
}

YGrid::SubQuadrature YGrid::sub_quadrature(double a, double b, int m) const {
    require(a >= 0.0 && b <= ymax_ + 1e-12 && a < b, "sub_quadrature: bad interval");
    SubQuadrature q;
    Eigen::VectorXd s01, w01;
    clenshaw_curtis(m, s01, w01);
    q.y = Eigen::VectorXd(m);
    q.w = Eigen::VectorXd(m);
    for (int j = 0; j < m; ++j) {
        q.y[j] = a + (b - a) * s01[j];
        q.w[j] = (b - a) * w01[j];
    }
    q.interp = interpolation_matrix(q.y);
    return q;
}

Eigen::VectorXcd YGrid::cheb_coeffs(const Eigen::VectorXcd& values) const {
    // Discrete Chebyshev transform on CGL points; s ascending corresponds to
    // x = -cos(pi j / N) so coefficients pick up (-1)^k relative to the
    // standard ordering, which is irrelevant for magnitude-based estimates.
    const int n = size();
    const int N = n - 1;
    Eigen::VectorXcd c(n);
    for (int k = 0; k <= N; ++k) {
        complexd sum = 0.0;
        for (int j = 0; j <= N; ++j) {
            double fac = (j == 0 || j == N) ? 0.5 : 1.0;
            sum += fac * values[j] * std::cos(kPi * k * j / N);
        }
        double scale = (k == 0 || k == N) ? 1.0 / N : 2.0 / N;
        c[k] = scale * sum;
    }
    return c;
}

Eigen::VectorXcd YGrid::cheb_synthesize(const Eigen::VectorXcd& coeffs) const {
    const int n = size();
    const int N = n - 1;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j <= N; ++j)
        for (int k = 0; k <= N; ++k)
            v[j] += coeffs[k] * std::cos(kPi * k * j / N);
    return v;
}

Eigen::VectorXcd YGrid::filter_tail(const Eigen::VectorXcd& values) const {
    const int n = size();
    Eigen::VectorXcd c = cheb_coeffs(values);
    const int k0 = 3 * n / 4;
    for (int k = k0; k < n; ++k) {
        const double r = double(k - k0) / double(n - 1 - k0);
        c[k] *= std::exp(-36.0 * r * r * r * r);
    }
    return cheb_synthesize(c);
}

double YGrid::diff_noise_estimate(const Eigen::VectorXcd& values) const {
    // Contribution of the top spectral octave to the conormal derivative,
    // relative to the full derivative. The y factor suppresses boundary
    // oscillations, so this is measured on (y d/dy) directly rather than by
    // coefficient-size heuristics.
    const int n = size();
    Eigen::VectorXcd c = cheb_coeffs(values);
    if (c.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    for (int k = 0; k < n - std::max(1, n / 8); ++k) c[k] = 0.0;
    Eigen::VectorXcd tail = cheb_synthesize(c);
    Eigen::VectorXcd dtail = d1_ * tail;
    Eigen::VectorXcd dfull = d1_ * values;
    double tail_norm = 0.0, full_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        tail_norm = std::max(tail_norm, std::abs(nodes_[i] * dtail[i]));
        full_norm = std::max(full_norm, std::abs(nodes_[i] * dfull[i]));
    }
    // Relative to the larger of the derivative and the field itself, so
    // that near-constant fields (derivative at roundoff) do not alarm.
    const double denom = std::max(full_norm, values.cwiseAbs().maxCoeff());
    if (denom == 0.0) return 0.0;
    return tail_norm / denom;
}

}  // namespace nshs
