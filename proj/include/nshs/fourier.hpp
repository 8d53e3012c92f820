#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nshs/util.hpp"

namespace nshs {

/// Forward/backward Fourier transforms in the periodic x variable between
/// nodal samples on nx points of [-pi,pi) and mode coefficients xi=-K..K.
/// Plans are cached per size with FFTW_ESTIMATE so results are deterministic.
class XTransform {
public:
    /// spectrum_to_grid: samples(m) = sum_xi coeff[xi] e^{i xi x_m}.
    /// coeffs laid out xi = -K..K (2K+1 entries). Requires nx >= 2K+2.
    static Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs, int nx);

    /// grid samples -> coefficients xi=-K..K with nx >= 2K+2.
    static Eigen::VectorXcd analyze(const Eigen::VectorXcd& samples, int K);

    /// Smallest even transform size >= max(3K+1, 2K+2) (3/2-rule padding).
    static int dealias_size(int K);
};

}  // namespace nshs
