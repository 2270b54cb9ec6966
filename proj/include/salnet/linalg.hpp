#pragma once

#include <array>
#include <vector>

#include "salnet/matrix.hpp"

namespace salnet {

struct SpectralOptions {
    int max_iters = 4000;
    double tol = 1e-6;
    int start_vectors = 4;
};

// Largest |eigenvalue| of a square matrix, estimated from the geometric
// growth rate of ||W^k v|| for several fixed random start vectors. The rate
// is averaged over the second half of the iteration so that complex
// conjugate pairs (rotating iterates) do not bias the estimate; the maximum
// over start vectors is returned. Deterministic: start vectors come from a
// fixed internal seed.
double spectral_radius(const Matrix& w, const SpectralOptions& opts = {});
double spectral_radius(const Matrix& w, int max_iters, double tol);

// W * (target / spectral_radius(W)). Throws std::domain_error for a matrix
// whose spectral radius is zero.
Matrix scale_to_spectral_radius(const Matrix& w, double target, const SpectralOptions& opts = {});

struct Pca2 {
    std::vector<std::array<double, 2>> projected;
    std::array<double, 2> eigenvalues{};
    std::array<double, 2> explained{};  // fraction of total variance
    std::array<Vector, 2> components;
};

// Mean-centred projection onto the two leading eigenvectors of the sample
// covariance, found by power iteration with deflation. Throws
// std::invalid_argument for fewer than 3 points or dimension < 2 and
// std::domain_error when the covariance is identically zero.
Pca2 pca_top2(const std::vector<Vector>& points);

}  // namespace salnet
