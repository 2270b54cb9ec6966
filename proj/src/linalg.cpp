#include "salnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "salnet/rng.hpp"

namespace salnet {

namespace {

constexpr std::uint64_t kInternalSeed = 0x5EC7A1ULL;

// Mean log growth per step over the second half of `iters` multiplications.
double growth_rate(const Matrix& w, Vector v, int max_iters, double tol) {
    const std::size_t n = w.rows();
    Vector next(n);
    std::vector<double> log_growth;
    log_growth.reserve(static_cast<std::size_t>(max_iters));
    double previous = 0.0;
    bool have_previous = false;
    for (int k = 1; k <= max_iters; ++k) {
        matvec_into(w, v, next);
        const double len = norm(next);
        if (len == 0.0) return 0.0;
        log_growth.push_back(std::log(len));
        for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / len;

        if (k >= 200 && k % 100 == 0) {
            const std::size_t half = log_growth.size() / 2;
            double sum = 0.0;
            for (std::size_t i = half; i < log_growth.size(); ++i) sum += log_growth[i];
            const double estimate = std::exp(sum / static_cast<double>(log_growth.size() - half));
            if (have_previous && std::abs(estimate - previous) <= tol * estimate) return estimate;
            previous = estimate;
            have_previous = true;
        }
    }
    const std::size_t half = log_growth.size() / 2;
    double sum = 0.0;
    for (std::size_t i = half; i < log_growth.size(); ++i) sum += log_growth[i];
    return std::exp(sum / static_cast<double>(log_growth.size() - half));
}

}  // namespace

double spectral_radius(const Matrix& w, const SpectralOptions& opts) {
    if (!w.square()) throw std::invalid_argument("spectral_radius: matrix must be square");
    if (w.rows() == 0) throw std::invalid_argument("spectral_radius: empty matrix");
    if (opts.max_iters < 2 || opts.start_vectors < 1) throw std::invalid_argument("spectral_radius: bad options");
    Rng rng(kInternalSeed);
    double best = 0.0;
    for (int s = 0; s < opts.start_vectors; ++s) {
        auto v = random_unit_vector(rng, w.rows());
        best = std::max(best, growth_rate(w, std::move(v), opts.max_iters, opts.tol));
    }
    return best;
}

double spectral_radius(const Matrix& w, int max_iters, double tol) {
    SpectralOptions opts;
    opts.max_iters = max_iters;
    opts.tol = tol;
    return spectral_radius(w, opts);
}

Matrix scale_to_spectral_radius(const Matrix& w, double target, const SpectralOptions& opts) {
    const double rho = spectral_radius(w, opts);
    if (!(rho > 0.0)) throw std::domain_error("scale_to_spectral_radius: spectral radius is zero");
    return w * (target / rho);
}

namespace {

// Leading eigenpair of a symmetric positive semi-definite matrix.
std::pair<double, Vector> leading_eigenpair(const Matrix& c, Vector v, double scale) {
    const std::size_t d = c.rows();
    Vector next(d);
    double lambda = 0.0;
    for (int iter = 0; iter < 200000; ++iter) {
        matvec_into(c, v, next);
        const double len = norm(next);
        if (len <= 1e-300 + 1e-15 * scale) return {0.0, v};
        double change = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            next[i] /= len;
            change = std::max(change, std::abs(next[i] - v[i]));
        }
        v.swap(next);
        lambda = len;
        if (change < 1e-13) break;
    }
    const Vector cv = matvec(c, v);
    lambda = dot(v, cv);
    return {lambda, v};
}

void orient(Vector& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0)
        for (auto& x : v) x = -x;
}

Vector orthogonal_to(const Vector& u, std::size_t d) {
    for (std::size_t k = 0; k < d; ++k) {
        Vector e(d, 0.0);
        e[k] = 1.0;
        axpy(-u[k], u, e);
        const double len = norm(e);
        if (len > 1e-6) {
            for (auto& x : e) x /= len;
            return e;
        }
    }
    return Vector(d, 0.0);
}

}  // namespace

Pca2 pca_top2(const std::vector<Vector>& points) {
    if (points.size() < 3) throw std::invalid_argument("pca_top2: need at least 3 points");
    const std::size_t d = points.front().size();
    if (d < 2) throw std::invalid_argument("pca_top2: dimension must be >= 2");
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("pca_top2: ragged input");

    Vector mean(d, 0.0);
    for (const auto& p : points) axpy(1.0, p, mean);
    for (auto& x : mean) x /= static_cast<double>(points.size());

    Matrix cov(d, d);
    Vector centred(d);
    for (const auto& p : points) {
        for (std::size_t i = 0; i < d; ++i) centred[i] = p[i] - mean[i];
        add_outer(cov, 1.0, centred, centred);
    }
    cov *= 1.0 / static_cast<double>(points.size() - 1);

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);
    if (!(trace > 0.0)) throw std::domain_error("pca_top2: zero covariance (all points identical)");

    Rng rng(kInternalSeed);
    Pca2 out;
    auto [l1, v1] = leading_eigenpair(cov, random_unit_vector(rng, d), trace);
    orient(v1);

    Matrix deflated = cov;
    add_outer(deflated, -l1, v1, v1);
    Vector start = random_unit_vector(rng, d);
    axpy(-dot(start, v1), v1, start);
    auto [l2, v2] = leading_eigenpair(deflated, start, trace);
    // Re-orthogonalise; for a rank-one covariance v2 is arbitrary.
    axpy(-dot(v2, v1), v1, v2);
    if (const double len = norm(v2); len > 1e-6) {
        for (auto& x : v2) x /= len;
    } else {
        v2 = orthogonal_to(v1, d);
        l2 = 0.0;
    }
    orient(v2);
    l2 = std::max(l2, 0.0);

    out.eigenvalues = {l1, l2};
    out.explained = {l1 / trace, l2 / trace};
    out.components = {v1, v2};
    out.projected.reserve(points.size());
    for (const auto& p : points) {
        for (std::size_t i = 0; i < d; ++i) centred[i] = p[i] - mean[i];
        out.projected.push_back({dot(centred, v1), dot(centred, v2)});
    }
    return out;
}

}  // namespace salnet
