#pragma once

#include <map>
#include <string>
#include <vector>

#include "nshs/util.hpp"

namespace nshs {

enum class DatumFamily { Bump, Maekawa, Analytic };
enum class SolverKind { Mild, Direct, Euler };

std::string to_string(DatumFamily f);
std::string to_string(SolverKind k);

/// Physical and numerical parameters of a run. Paper constraints
/// (mu0 <= 1/10, alpha in (0,1/2), T < mu0/(2 gamma)) are enforced by
/// validate(), which every parse path calls.
struct RunConfig {
    // physics
    double nu = 0.05;        // viscosity, in (0,1]
    double mu0 = 0.1;        // initial analyticity radius, in (0, 1/10]
    double gamma = 1.0;      // radius decay rate, > 0
    double eps0 = 0.05;      // exponential norm rate, in (0,1)
    double alpha = 0.25;     // time-weight exponent, in (0, 1/2)
    double theta0 = 0.1;     // kernel decay constant, > 0

    // numerics
    int kmax = 8;            // tangential frequency cutoff K
    int ny = 129;            // wall-normal nodes
    double ymax = 8.0;       // domain truncation
    double dt = 1e-3;        // time step / Duhamel window
    double tfinal = 0.04;    // final time, < mu0/(2 gamma)
    double picard_tol = 1e-10;
    int picard_max = 20;
    int duhamel_nodes = 4;   // window collocation nodes (per window, plus t)
    int gauss_points = 6;    // s-quadrature points per node
    int kernel_substeps = 96;

    // norms
    int mu_points = 32;      // mu-grid size for the sup over mu
    int eval_points = 129;   // evaluation rule size for restricted intervals
    bool continuation = false;  // complex-contour evaluation of sup norms
    int contours = 8;

    // datum
    DatumFamily family = DatumFamily::Bump;
    double amplitude = 1.0;
    bool compatible = false;  // project the datum onto zero wall compatibility

    // io
    int snapshot_every = 10;

    void validate() const;
    double certified_horizon() const { return mu0 / (2.0 * gamma); }

    std::string serialize() const;
};

/// Parses the documented INI format (sections [physics], [numerics],
/// [norms], [datum], [io]) and applies "section.key=value" overrides.
/// Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {});
RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});

}  // namespace nshs
