#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nshs/config.hpp"
#include "nshs/field.hpp"
#include "nshs/fourier.hpp"
#include "nshs/grid.hpp"
#include "nshs/weight.hpp"

using namespace nshs;

TEST_CASE("make_grid endpoint and resolution contracts") {
    auto g = YGrid::make(64, 4.0, 1.0);
    CHECK(g->nodes()[0] == 0.0);
    CHECK(g->nodes()[63] == 4.0);
    for (int i = 1; i < g->size(); ++i) CHECK(g->nodes()[i] > g->nodes()[i - 1]);

    auto fine = YGrid::make(256, 4.0, 1e-4);
    int below = 0;
    for (int i = 0; i < fine->size(); ++i)
        if (fine->nodes()[i] <= 0.01) ++below;
    CHECK(below >= 8);
    CHECK(fine->nodes()[1] - fine->nodes()[0] <= 0.01 / 8.0);

    auto mid = YGrid::make(256, 4.0, 1e-2);
    CHECK(mid->quad_weights().sum() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mid->quad_weights().minCoeff() > 0.0);

    CHECK_THROWS_AS(YGrid::make(16, 4.0, 1.0), InvalidArgument);
    // The graded map absorbs physical nu at the minimum node count; only an
    // unsatisfiable clustering demand is rejected.
    CHECK_THROWS_AS(YGrid::make(32, 4.0, 1e-30), InvalidArgument);
    CHECK_NOTHROW(YGrid::make(32, 4.0, 1e-4));
}

TEST_CASE("grid quadrature and differentiation are spectrally accurate") {
    auto g = YGrid::make(96, 8.0, 1e-2);
    Eigen::VectorXd f(g->size());
    for (int i = 0; i < g->size(); ++i) f[i] = std::exp(-g->nodes()[i]);
    const double exact = 1.0 - std::exp(-8.0);
    CHECK(g->integrate(f) == doctest::Approx(exact).epsilon(1e-12));

    Eigen::VectorXd df = g->diff() * f;
    double err = 0.0;
    for (int i = 0; i < g->size(); ++i) err = std::max(err, std::abs(df[i] + f[i]));
    CHECK(err < 1e-8);
}

TEST_CASE("interpolation matrix reproduces smooth profiles") {
    auto g = YGrid::make(96, 4.0, 1e-2);
    Eigen::VectorXd targets(5);
    targets << 0.01, 0.3, 1.0, 2.5, 3.9;
    Eigen::MatrixXd P = g->interpolation_matrix(targets);
    Eigen::VectorXd f(g->size());
    for (int i = 0; i < g->size(); ++i) f[i] = std::sin(g->nodes()[i]);
    Eigen::VectorXd v = P * f;
    for (int i = 0; i < targets.size(); ++i)
        CHECK(v[i] == doctest::Approx(std::sin(targets[i])).epsilon(1e-10));

    auto q = g->sub_quadrature(0.5, 1.5, 65);
    Eigen::VectorXd y2(g->size());
    for (int i = 0; i < g->size(); ++i) y2[i] = g->nodes()[i] * g->nodes()[i];
    Eigen::VectorXd vals = q.interp * y2;
    const double integral = (q.w.array() * vals.array()).sum();
    CHECK(integral == doctest::Approx((std::pow(1.5, 3) - std::pow(0.5, 3)) / 3.0).epsilon(1e-12));
}

TEST_CASE("weight branches and Remark-style properties") {
    CHECK(weight_w(0.05, 0.01) == doctest::Approx(0.1));
    CHECK(weight_w(0.5, 0.01) == doctest::Approx(0.5));
    CHECK(weight_w(1.05, 0.01) == doctest::Approx(1.0));

    for (double nu : {1.0, 1e-1, 1e-2, 1e-4}) {
        const double root = std::sqrt(nu);
        double prev = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double y = 1.1 * i / 200;
            const double w = weight_w(y, nu);
            CHECK(w >= prev);  // monotone, hence (a) with C=1
            prev = w;
            CHECK(w >= root - 1e-15);
            CHECK(w <= 1.0 + 1e-15);
            CHECK(y <= (1.0 + 0.1) * w + 1e-12);                      // (d)
            CHECK(w * std::exp(-y / (16.0 * root)) <= 16.0 * root);   // (e)
        }
        CHECK(weight_w_exp(0.0, nu) == doctest::Approx(root));
    }
}

TEST_CASE("ddx multiplies by (i xi)^order") {
    auto g = YGrid::make(48, 4.0, 1e-1);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g->size());

    ModeField f0(0, ones, g);
    CHECK(ddx(f0, 1).values.cwiseAbs().maxCoeff() == 0.0);

    ModeField f2(2, ones, g);
    auto d = ddx(f2, 1);
    CHECK(d.values[3].real() == doctest::Approx(0.0));
    CHECK(d.values[3].imag() == doctest::Approx(2.0));

    ModeField f3(3, ones, g);
    auto dd = ddx(f3, 2);
    CHECK(dd.values[5].real() == doctest::Approx(-9.0));
    CHECK(dd.values[5].imag() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("conormal derivative matches symbolic results") {
    auto g = YGrid::make(96, 4.0, 1e-1);
    const auto& y = g->nodes();

    Eigen::VectorXcd f(g->size());
    for (int i = 0; i < g->size(); ++i) f[i] = y[i] * y[i];
    auto d = conormal_dy(ModeField(1, f, g), 1);
    for (int i = 0; i < g->size(); ++i)
        CHECK(d.values[i].real() == doctest::Approx(2.0 * y[i] * y[i]).epsilon(1e-8));
    CHECK(d.values[0] == complexd(0.0, 0.0));

    Eigen::VectorXcd c = Eigen::VectorXcd::Ones(g->size());
    CHECK(conormal_dy(ModeField(0, c, g), 1).values.cwiseAbs().maxCoeff() < 1e-10);

    // (y d_y)^2 e^{-y} = (y^2 - y) e^{-y}, from y d_y(-y e^{-y}).
    Eigen::VectorXcd e(g->size());
    for (int i = 0; i < g->size(); ++i) e[i] = std::exp(-y[i]);
    auto d2 = conormal_dy(ModeField(0, e, g), 2);
    double err = 0.0;
    for (int i = 0; i < g->size(); ++i) {
        const double exact = (y[i] * y[i] - y[i]) * std::exp(-y[i]);
        err = std::max(err, std::abs(d2.values[i].real() - exact));
    }
    CHECK(err < 1e-7);

    CHECK_THROWS_AS(conormal_dy(ModeField(0, e, g), 3), InvalidArgument);
}

TEST_CASE("conormal derivative flags under-resolved fields") {
    auto g = YGrid::make(48, 4.0, 1.0);  // no boundary-layer clustering
    Eigen::VectorXcd rough(g->size());
    for (int i = 0; i < g->size(); ++i) rough[i] = std::exp(-g->nodes()[i] / 1e-3);
    CHECK_THROWS_AS(conormal_dy(ModeField(0, rough, g), 1), NumericalError);
}

TEST_CASE("to_physical synthesis and round trip") {
    auto g = YGrid::make(48, 4.0, 1e-1);
    const int K = 4;

    VorticityState s(K, g, 0.0);
    s.mode(0).setOnes();
    Eigen::MatrixXd phys = to_physical(s, 16);
    CHECK(phys.minCoeff() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(phys.maxCoeff() == doctest::Approx(1.0).epsilon(1e-13));

    VorticityState c(K, g, 0.0);
    c.mode(1).setConstant(0.5);
    c.mode(-1).setConstant(0.5);
    Eigen::MatrixXd cosx = to_physical(c, 16);
    for (int m = 0; m < 16; ++m) {
        const double x = -M_PI + 2.0 * M_PI * m / 16;
        CHECK(cosx(m, 3) == doctest::Approx(std::cos(x)).epsilon(1e-12));
    }

    Rng rng(42);
    VorticityState r(K, g, 0.0);
    for (int xi = 0; xi <= K; ++xi) {
        for (int j = 0; j < g->size(); ++j)
            r.mode(xi)[j] = complexd(rng.uniform(-1, 1), xi ? rng.uniform(-1, 1) : 0.0);
        if (xi) r.mode(-xi) = r.mode(xi).conjugate();
    }
    CHECK(r.conjugate_symmetry_error() == 0.0);
    Eigen::MatrixXd p = to_physical(r, XTransform::dealias_size(K));
    VorticityState round = from_physical(p, K, g, 0.0);
    double err = 0.0;
    for (int xi = -K; xi <= K; ++xi)
        err = std::max(err, (round.mode(xi) - r.mode(xi)).cwiseAbs().maxCoeff());
    CHECK(err < 1e-12);

    CHECK_THROWS_AS(to_physical(r, 2 * K + 1), InvalidArgument);
}

TEST_CASE("config enforces the paper constraints by name") {
    RunConfig ok;
    ok.validate();

    CHECK_THROWS_WITH_AS(parse_config("[physics]\nmu0 = 0.2\n"),
                         doctest::Contains("mu0 in (0,1/10]"), InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_config("[physics]\nalpha = 0.5\n"),
                         doctest::Contains("alpha in (0,1/2)"), InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_config("[physics]\ngamma = 2.0\n"),
                         doctest::Contains("T < mu0/(2 gamma)"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[physics]\nnot_a_key = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("", {"numerics.bogus=1"}), InvalidArgument);

    RunConfig a = parse_config("[physics]\nnu = 0.02\n[numerics]\nkmax = 4\n");
    CHECK(a.nu == 0.02);
    CHECK(a.kmax == 4);
    RunConfig b = parse_config(a.serialize());
    CHECK(b.serialize() == a.serialize());

    RunConfig c = parse_config("", {"physics.nu=0.07", "datum.family=maekawa"});
    CHECK(c.nu == 0.07);
    CHECK(c.family == DatumFamily::Maekawa);
}
