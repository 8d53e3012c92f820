#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nshs/biot_savart.hpp"
#include "nshs/field.hpp"
#include "nshs/fourier.hpp"

using namespace nshs;

namespace {

VorticityState random_state(const std::shared_ptr<const YGrid>& g, int K, std::uint64_t seed) {
    Rng rng(seed);
    VorticityState s(K, g, 0.0);
    for (int xi = 0; xi <= K; ++xi) {
        const complexd c(rng.uniform(-1, 1), xi ? rng.uniform(-1, 1) : 0.0);
        const double a = 0.6 + rng.uniform();
        for (int i = 0; i < g->size(); ++i) {
            const double y = g->nodes()[i];
            s.mode(xi)[i] = c * y * std::exp(-a * y * y);
        }
        if (xi) s.mode(-xi) = s.mode(xi).conjugate();
    }
    return s;
}

// Brute-force evaluation of the one-sided convolution integrals by composite
// Simpson on a fine uniform grid (independent of the collocation solves).
complexd u1_brute(const ModeField& om, double ytarget, int half = 8192) {
    const double ymax = om.grid->ymax();
    const double k = std::abs(om.xi);
    auto simpson = [&](double a, double b, auto f) {
        const int m = half;  // even panel count
        const double h = (b - a) / m;
        Eigen::VectorXd pts(m + 1);
        for (int i = 0; i <= m; ++i) pts[i] = a + h * i;
        Eigen::MatrixXd P = om.grid->interpolation_matrix(pts);
        Eigen::VectorXcd vals(m + 1);
        vals.real() = P * om.values.real();
        vals.imag() = P * om.values.imag();
        complexd sum = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += w * h / 3.0 * f(pts[i]) * vals[i];
        }
        return sum;
    };
    complexd lower = simpson(0.0, ytarget, [&](double z) {
        return std::exp(-k * (ytarget - z)) * (1.0 - std::exp(-2.0 * k * z));
    });
    complexd upper = simpson(ytarget, ymax, [&](double z) {
        return std::exp(-k * (z - ytarget)) * (1.0 + std::exp(-2.0 * k * ytarget));
    });
    return 0.5 * (-lower + upper);
}

}  // namespace

TEST_CASE("velocity_u1 closed forms and brute-force oracle") {
    auto g = YGrid::make(160, 24.0, 1e-1);
    const int n = g->size();

    ModeField zero(2, Eigen::VectorXcd::Zero(n), g);
    CHECK(velocity_u1(zero).values.cwiseAbs().maxCoeff() == 0.0);

    // xi = 0: u1(y) = int_y^inf e^{-z} dz = e^{-y}.
    Eigen::VectorXcd ez(n);
    for (int i = 0; i < n; ++i) ez[i] = std::exp(-g->nodes()[i]);
    ModeField om0(0, ez, g);
    auto u = velocity_u1(om0);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(u.values[i] - std::exp(-g->nodes()[i])));
    CHECK(err < 1e-9);

    // wall value u1(0) = int e^{-|xi| z} omega dz.
    Eigen::VectorXcd prof(n);
    for (int i = 0; i < n; ++i) {
        const double y = g->nodes()[i];
        prof[i] = complexd(y * y, y) * std::exp(-y * y);
    }
    for (int xi : {1, 3, 7}) {
        ModeField om(xi, prof, g);
        complexd wall = velocity_u1(om).values[0];
        Eigen::VectorXcd integrand(n);
        for (int i = 0; i < n; ++i) integrand[i] = std::exp(-double(xi) * g->nodes()[i]) * prof[i];
        complexd expected = g->integrate(integrand);
        CHECK(std::abs(wall - expected) < 1e-9);
    }

    // mid-domain values against composite-Simpson brute force.
    ModeField om3(3, prof, g);
    auto u3 = velocity_u1(om3);
    for (int idx : {20, 45, 70, 100}) {
        complexd expected = u1_brute(om3, g->nodes()[idx]);
        CHECK(std::abs(u3.values[idx] - expected) < 1e-8);
    }
}

TEST_CASE("velocity_u2 boundary and structure relations") {
    auto g = YGrid::make(128, 8.0, 1e-1);
    VorticityState s = random_state(g, 5, 2024);

    for (int xi = -5; xi <= 5; ++xi) {
        auto u2 = velocity_u2(s.mode_field(xi));
        CHECK(std::abs(u2.values[0]) == 0.0);  // exact wall zero
        if (xi == 0) CHECK(u2.values.cwiseAbs().maxCoeff() == 0.0);
    }

    VelocityState v = velocity(s);
    CHECK(divergence_residual(v) < 1e-8);
    CHECK(curl_residual(v, s) < 1e-6);
}

TEST_CASE("u2_over_y matches u2 and its wall limit") {
    auto g = YGrid::make(128, 8.0, 1e-2);
    VorticityState s = random_state(g, 4, 7);

    for (int xi : {1, 2, 4}) {
        ModeField om = s.mode_field(xi);
        auto ratio = u2_over_y(om);
        auto u2 = velocity_u2(om);
        double err = 0.0;
        for (int i = 1; i < g->size(); ++i)
            err = std::max(err, std::abs(g->nodes()[i] * ratio.values[i] - u2.values[i]));
        CHECK(err < 1e-10);

        // Richardson extrapolation of u2/y toward y=0 from interpolated values.
        const double h = 1e-3;
        auto at = [&](double yv) {
            Eigen::VectorXd t(1);
            t[0] = yv;
            Eigen::MatrixXd P = g->interpolation_matrix(t);
            complexd num(P.row(0).dot(u2.values.real()), P.row(0).dot(u2.values.imag()));
            return num / yv;
        };
        complexd r1 = at(2.0 * h), r2 = at(h);
        complexd extr = 2.0 * r2 - r1;
        CHECK(std::abs(ratio.values[0] - extr) < 1e-6);
    }

    ModeField zero(3, Eigen::VectorXcd::Zero(g->size()), g);
    CHECK(u2_over_y(zero).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace operator closed forms") {
    auto g = YGrid::make(160, 24.0, 1e-1);
    const int n = g->size();
    Eigen::VectorXcd ez(n);
    for (int i = 0; i < n; ++i) ez[i] = std::exp(-g->nodes()[i]);

    CHECK(std::abs(trace_operator(ModeField(2, Eigen::VectorXcd::Zero(n), g))) == 0.0);
    CHECK(trace_operator(ModeField(1, ez, g)).real() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(trace_operator(ModeField(0, ez, g)).real() == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("nonlinearity vanishes for shear flows and zero states") {
    auto g = YGrid::make(96, 8.0, 1e-1);
    VorticityState zero(4, g, 0.0);
    NonlinearState nz = nonlinearity(zero);
    CHECK(nz.n.max_abs() == 0.0);
    CHECK(nz.b.cwiseAbs().maxCoeff() == 0.0);

    VorticityState shear(4, g, 0.0);
    for (int i = 0; i < g->size(); ++i)
        shear.mode(0)[i] = g->nodes()[i] * std::exp(-g->nodes()[i]);
    NonlinearState ns = nonlinearity(shear);
    CHECK(ns.n.max_abs() < 1e-14);
    CHECK(ns.b.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("nonlinearity matches a physical-space computation") {
    auto g = YGrid::make(128, 8.0, 1e-1);
    const int K = 2;
    VorticityState s(K, g, 0.0);
    for (int i = 0; i < g->size(); ++i) {
        const double y = g->nodes()[i];
        s.mode(1)[i] = complexd(0.0, -0.5) * y * y * std::exp(-y * y);
        s.mode(2)[i] = complexd(0.3, 0.1) * y * std::exp(-1.3 * y * y);
    }
    s.mode(-1) = s.mode(1).conjugate();
    s.mode(-2) = s.mode(2).conjugate();

    NonlinearState N = nonlinearity(s);

    // Physical-space oracle on a finer x grid: synthesize u1, u2, dx omega,
    // dy omega, multiply pointwise, analyze back.
    const int nx = 4 * XTransform::dealias_size(K);
    VelocityState v = velocity(s);
    const auto& D = g->diff();
    VorticityState u1s(K, g, 0.0), u2s(K, g, 0.0), dxs(K, g, 0.0), dys(K, g, 0.0);
    for (int xi = -K; xi <= K; ++xi) {
        u1s.mode(xi) = v.u1_mode(xi);
        u2s.mode(xi) = v.u2_mode(xi);
        dxs.mode(xi) = complexd(0, double(xi)) * s.mode(xi);
        dys.mode(xi) = D * s.mode(xi);
    }
    Eigen::MatrixXd U1 = to_physical(u1s, nx), U2 = to_physical(u2s, nx);
    Eigen::MatrixXd DX = to_physical(dxs, nx), DY = to_physical(dys, nx);
    Eigen::MatrixXd Nphys = -(U1.cwiseProduct(DX) + U2.cwiseProduct(DY));
    VorticityState Nref = from_physical(Nphys, K, g, 0.0);

    double err = 0.0;
    for (int xi = -K; xi <= K; ++xi)
        err = std::max(err, (Nref.mode(xi) - N.n.mode(xi)).cwiseAbs().maxCoeff());
    CHECK(err < 1e-6);

    // B from the representation formula: B_xi = -trace(N_xi).
    for (int xi = -K; xi <= K; ++xi)
        CHECK(std::abs(N.b[xi + K] + trace_operator(N.n.mode_field(xi))) < 1e-12);
}
