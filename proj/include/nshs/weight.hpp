#pragma once

#include <algorithm>
#include <cmath>

namespace nshs {

/// Boundary-layer weight: sqrt(nu) inside the layer, y in the bulk, capped
/// at 1 past y=1. Continuous and nondecreasing on [0, 1+mu0].
inline double weight_w(double y, double nu) {
    const double root = std::sqrt(nu);
    if (y <= root) return root;
    if (y <= 1.0) return y;
    return 1.0;
}

/// Alternative exponential weight min{ sqrt(nu) e^{y/(C sqrt(nu))}, 1 }.
inline double weight_w_exp(double y, double nu, double c = 16.0) {
    const double root = std::sqrt(nu);
    return std::min(root * std::exp(y / (c * root)), 1.0);
}

}  // namespace nshs
