#pragma once

#include <array>
#include <vector>

#include "nshs/config.hpp"
#include "nshs/field.hpp"

namespace nshs {

/// Intermediate analyticity radii used by the kernel estimates:
/// mu1 = mu + (mu0-mu-gamma s)/4, mu2 = mu + (mu0-mu-gamma s)/2.
struct MuSchedule {
    double mu, mu1, mu2;
};
MuSchedule mu_schedule(double mu, double mu0, double gamma, double s);

/// Derivative multi-indices (i,j) with i+j <= 2, in a fixed order.
inline constexpr std::array<std::pair<int, int>, 6> kDerivPairs = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

/// Per-mu breakdown of the analytic norms by derivative pair.
struct MuBreakdown {
    double mu = 0.0;
    std::array<double, 6> x_parts{};  // ||d_x^i (y d_y)^j f||_{X_mu}
    std::array<double, 6> y_parts{};  // ||d_x^i (y d_y)^j f||_{Y_mu}
};

/// All norm components at one time, with the mu sweep behind each sup.
struct NormReport {
    double time = 0.0;
    double x_t = 0.0, y_t = 0.0, z = 0.0, triple = 0.0;
    double mu_max = 0.0;
    double x_achieving_mu = 0.0, y_achieving_mu = 0.0;
    std::vector<MuBreakdown> per_mu;

    std::string to_json() const;
};

/// Evaluator for the mixed analytic-Sobolev norm system. Holds the grid,
/// the restricted-interval quadratures and the mu sweep; pure and reusable
/// across states on the same grid.
class Norms {
public:
    Norms(const RunConfig& cfg, std::shared_ptr<const YGrid> grid);

    /// sup over the real slice [0, 1+mu] of w(Re y) |f(y)|.
    double weighted_linf(const ModeField& f, double mu) const;

    /// Per-pair X_mu and Y_mu components at one mu (no time prefactors).
    MuBreakdown mu_breakdown(const VorticityState& s, double mu) const;

    /// Weighted combination entering X(t): sum_{i+j<=1} parts +
    /// (mu0-mu-gamma t)^{1/2+alpha} sum_{i+j=2} parts. Rejects mu >= mu0 - gamma t.
    double x_mu_norm(const VorticityState& s, double mu, MuBreakdown* parts = nullptr) const;
    double y_mu_norm(const VorticityState& s, double mu, MuBreakdown* parts = nullptr) const;

    /// Sup over the mu grid refined toward mu0 - gamma t.
    double x_t_norm(const VorticityState& s, double* achieving_mu = nullptr) const;
    double y_t_norm(const VorticityState& s, double* achieving_mu = nullptr) const;

    double s_norm(const VorticityState& s) const;
    double s_mu_norm(const VorticityState& s, double mu) const;
    double z_norm(const VorticityState& s) const;

    NormReport triple_norm(const VorticityState& s) const;

    /// The mu evaluation grid for time t (geometric toward the endpoint).
    std::vector<double> mu_grid(double t) const;

    const RunConfig& config() const { return cfg_; }

private:
    RunConfig cfg_;
    std::shared_ptr<const YGrid> grid_;

    struct Slice {
        Eigen::VectorXd y, w;       // evaluation rule on [0, 1+mu]
        Eigen::MatrixXd interp;
        Eigen::VectorXd logw;       // log weight at rule nodes
    };
    Slice make_slice(double mu) const;

    // X_mu / Y_mu of a single prepared mode profile (derivatives applied).
    double x_of_mode(const Slice& sl, int xi, const Eigen::VectorXcd& vals, double mu) const;
    double y_of_mode(const Slice& sl, int xi, const Eigen::VectorXcd& vals, double mu) const;

    // Contour variants used in continuation mode.
    double x_of_mode_contour(int xi, const Eigen::VectorXcd& vals, double mu) const;
    double y_of_mode_contour(int xi, const Eigen::VectorXcd& vals, double mu) const;

    // (y d_y)^j profiles for all modes, j = 0,1,2.
    std::vector<std::array<Eigen::VectorXcd, 3>> conormal_profiles(const VorticityState& s) const;
};

}  // namespace nshs
