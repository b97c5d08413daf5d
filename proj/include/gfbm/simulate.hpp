#pragma once

#include "gfbm/model.hpp"
#include "gfbm/table.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gfbm {

struct TimeGrid {
    std::vector<double> points;
    bool uniform = true;
    double mesh = 0.0;

    static TimeGrid uniform_grid(double horizon, int steps);
    // Points must start at 0 and increase strictly.
    static TimeGrid from_points(std::vector<double> points);

    int steps() const { return static_cast<int>(points.size()) - 1; }
    double horizon() const { return points.back(); }
    TimeGrid subsample(int stride) const;
    void validate() const;
};

enum class PathLabel { Gfbm, RlGfbm, Mixed, Bm, Fou, DriftLambda, ShotNoise };
std::string to_string(PathLabel l);

struct GaussianPath {
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    PathLabel label = PathLabel::Gfbm;
    double hurst = 0.5;
};

GaussianPath subsample(const GaussianPath& path, int stride);

struct PathSet {
    std::vector<GaussianPath> paths;
    double jitter = 0.0; // diagonal shift used by the factorization, relative to trace/n
    std::vector<std::string> warnings;
};

struct PathBundle {
    GaussianPath x;
    GaussianPath b_tilde;
    std::vector<double> b_increments;
    double rho = 0.0;
};

struct FouParams {
    double a = 1.0;
    double m = 0.0;
    double nu = 1.0;
    double z0 = 0.0;
    void validate() const;
};

// RNG stream identifiers for the independent Gaussian drivers.
enum Stream : std::uint64_t { kStreamX = 1, kStreamBTilde = 2, kStreamB = 3, kStreamBPerp = 4, kStreamMarks = 5 };

// Lower Cholesky factor of a covariance matrix, with the jitter policy
// delta in {0, 1e-12, 1e-10, 1e-8} * trace/n.
class GaussianFactor {
public:
    using Fill = std::function<void(Eigen::MatrixXd&)>;
    // fill writes the full symmetric n x n covariance; it is called again for every jitter retry.
    static GaussianFactor factorize(int n, const Fill& fill);

    int size() const { return static_cast<int>(l_.rows()); }
    double jitter() const { return jitter_; }
    const Eigen::MatrixXd& matrix() const { return l_; }

    // size() x n_paths matrix of correlated normals; column p uses stream (seed, stream, p).
    Eigen::MatrixXd sample(int n_paths, std::uint64_t seed, std::uint64_t stream) const;
    // Correlated normals from given standard normals (one column per path).
    Eigen::MatrixXd apply(const Eigen::MatrixXd& z) const;

private:
    Eigen::MatrixXd l_;
    double jitter_ = 0.0;
};

Eigen::MatrixXd standard_normals(int rows, int n_paths, std::uint64_t seed, std::uint64_t stream);

// Covariance of the increments X(t_{i+1}) - X(t_i) on the grid.
void fill_increment_covariance(const CovarianceTable& table, const TimeGrid& grid, Eigen::MatrixXd& m);
void fill_increment_covariance(const RlCovarianceTable& table, const TimeGrid& grid, Eigen::MatrixXd& m);

PathSet sample_gfbm(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed);
PathSet sample_gfbm(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed);
PathSet sample_rl_gfbm(const RlParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed);
PathSet sample_bm(const TimeGrid& grid, int n_paths, std::uint64_t seed, std::uint64_t stream = kStreamBTilde);
PathSet sample_mixed(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed);
PathSet sample_mixed(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed);
// Components of the mixed process; y = x + b_tilde reproduces sample_mixed with the same seed.
std::vector<PathBundle> sample_mixed_bundle(const CovarianceTable& table, const TimeGrid& grid, int n_paths,
                                            std::uint64_t seed);
PathSet sample_fou(const GfbmParams& params, const FouParams& fou, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed);
// Integration-by-parts form of the fOU solution applied to one driver path.
std::vector<double> fou_transform(const FouParams& fou, const TimeGrid& grid, const std::vector<double>& x);

} // namespace gfbm
