#pragma once

// Test-only closed forms, kept independent of the library implementation:
// the Robin-boundary residual kernel from the classical image construction
// (delta images plus an exponentially weighted image line), and the
// unit-mass Neumann kernel.

#include <cmath>

namespace oracles {

inline double erfcx(double x) {
    // exp(x^2) erfc(x); asymptotic series for large x, direct otherwise.
    if (x > 6.0) {
        const double ix2 = 1.0 / (2.0 * x * x);
        return (1.0 - ix2 + 3.0 * ix2 * ix2) / (x * 1.77245385090551602729816748334);
    }
    return std::exp(x * x) * std::erfc(x);
}

inline double htilde_unit_mass(int xi, double t, double y, double z, double nu) {
    const double s = 4.0 * nu * t;
    const double g = (std::exp(-(y - z) * (y - z) / s) + std::exp(-(y + z) * (y + z) / s)) /
                     std::sqrt(3.14159265358979323846 * s);
    return g * std::exp(-nu * double(xi) * xi * t);
}

// Residual R = G - Htilde for the boundary row nu(d_y + |xi|) g = 0, from
// the image-line ansatz G = Phi(y-z) + Phi(y+z) + 2 beta int_0^inf e^{beta a}
// Phi(y+z+a) da with beta = |xi| (unit-mass Phi):
//   R(t,y,z) = beta e^{-nu xi^2 t} e^{nu t beta^2 - beta w} erfc(w/(2 sqrt(nu t)) - beta sqrt(nu t)),
// w = y + z.
inline double robin_residual(int xi, double t, double y, double z, double nu) {
    const double beta = std::abs(double(xi));
    if (beta == 0.0) return 0.0;
    const double w = y + z;
    const double rt = std::sqrt(nu * t);
    const double arg = w / (2.0 * rt) - beta * rt;
    const double damp = std::exp(-nu * double(xi) * xi * t);
    if (arg >= 0.0) {
        // scaled form, exponents combined: e^{nu t b^2 - b w - arg^2} = e^{-w^2/(4 nu t)}
        return beta * damp * erfcx(arg) * std::exp(-w * w / (4.0 * nu * t));
    }
    return beta * damp * std::exp(nu * t * beta * beta - beta * w) * std::erfc(arg);
}

inline double robin_green(int xi, double t, double y, double z, double nu) {
    return htilde_unit_mass(xi, t, y, z, nu) + robin_residual(xi, t, y, z, nu);
}

}  // namespace oracles
