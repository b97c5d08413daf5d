#include "gfbm/simulate.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/parallel.hpp"
#include "gfbm/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace gfbm {

TimeGrid TimeGrid::uniform_grid(double horizon, int steps)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("grid horizon must be positive");
    if (steps < 1)
        throw DomainError("grid needs at least one step");
    TimeGrid g;
    g.points.resize(steps + 1);
    for (int i = 0; i <= steps; ++i)
        g.points[i] = horizon * i / steps;
    g.points.back() = horizon;
    g.uniform = true;
    g.mesh = horizon / steps;
    return g;
}

TimeGrid TimeGrid::from_points(std::vector<double> points)
{
    TimeGrid g;
    g.points = std::move(points);
    if (g.points.size() < 2)
        throw DomainError("grid needs at least two points");
    if (g.points.front() != 0.0)
        throw DomainError("grid must start at 0");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 1; i < g.points.size(); ++i) {
        const double h = g.points[i] - g.points[i - 1];
        if (!(h > 0.0))
            throw DomainError("grid points must increase strictly");
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    g.mesh = hi;
    g.uniform = (hi - lo) <= 1e-12 * hi;
    return g;
}

void TimeGrid::validate() const
{
    TimeGrid copy = from_points(points);
    (void)copy;
}

TimeGrid TimeGrid::subsample(int stride) const
{
    if (stride < 1 || steps() % stride != 0)
        throw DomainError("subsample stride must divide the number of steps");
    std::vector<double> pts;
    for (int i = 0; i <= steps(); i += stride)
        pts.push_back(points[i]);
    return from_points(std::move(pts));
}

std::string to_string(PathLabel l)
{
    switch (l) {
    case PathLabel::Gfbm: return "gfbm";
    case PathLabel::RlGfbm: return "rl_gfbm";
    case PathLabel::Mixed: return "mixed";
    case PathLabel::Bm: return "bm";
    case PathLabel::Fou: return "fou";
    case PathLabel::DriftLambda: return "drift_lambda";
    case PathLabel::ShotNoise: return "shot_noise";
    }
    return "unknown";
}

GaussianPath subsample(const GaussianPath& path, int stride)
{
    GaussianPath out = path;
    out.grid = std::make_shared<const TimeGrid>(path.grid->subsample(stride));
    out.values.clear();
    for (std::size_t i = 0; i < path.values.size(); i += stride)
        out.values.push_back(path.values[i]);
    return out;
}

void FouParams::validate() const
{
    if (!(a > 0.0))
        throw DomainError("fOU mean reversion a must be positive");
    if (!(nu >= 0.0))
        throw DomainError("fOU nu must be non-negative");
    if (!std::isfinite(m) || !std::isfinite(z0))
        throw DomainError("fOU level and initial value must be finite");
}

GaussianFactor GaussianFactor::factorize(int n, const Fill& fill)
{
    if (n < 1)
        throw DomainError("covariance dimension must be positive");
    GaussianFactor f;
    f.l_.resize(n, n);
    const double deltas[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double delta : deltas) {
        fill(f.l_);
        const double trace = f.l_.diagonal().sum();
        if (!std::isfinite(trace))
            throw NumericalError("covariance matrix has non-finite entries");
        if (delta > 0.0)
            f.l_.diagonal().array() += delta * trace / n;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(f.l_);
        if (llt.info() == Eigen::Success) {
            f.jitter_ = delta;
            return f;
        }
    }
    std::ostringstream os;
    os << "covariance factorization failed after jitter 1e-8*trace/n";
    if (n <= 4096) {
        fill(f.l_);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.l_, Eigen::EigenvaluesOnly);
        os << "; minimum eigenvalue " << es.eigenvalues()(0);
    }
    throw NumericalError(os.str());
}

Eigen::MatrixXd standard_normals(int rows, int n_paths, std::uint64_t seed, std::uint64_t stream)
{
    Eigen::MatrixXd z(rows, n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
        auto rng = make_rng(seed, stream, p);
        fill_normal(rng, z.col(p).data(), rows);
    });
    return z;
}

Eigen::MatrixXd GaussianFactor::apply(const Eigen::MatrixXd& z) const
{
    if (z.rows() != l_.rows())
        throw DomainError("normal matrix has the wrong number of rows");
    Eigen::MatrixXd out(z.rows(), z.cols());
    // Column blocks keep the result independent of the thread count.
    const Eigen::Index block = 64;
    const Eigen::Index nb = (z.cols() + block - 1) / block;
    parallel_for(nb, [&](std::size_t b) {
        const Eigen::Index c0 = b * block;
        const Eigen::Index w = std::min(block, z.cols() - c0);
        out.middleCols(c0, w).noalias() = l_.triangularView<Eigen::Lower>() * z.middleCols(c0, w);
    });
    return out;
}

Eigen::MatrixXd GaussianFactor::sample(int n_paths, std::uint64_t seed, std::uint64_t stream) const
{
    return apply(standard_normals(size(), n_paths, seed, stream));
}

namespace {

// m(i,j) = Psi(t_{i+1}, t_{j+1}) for the lower triangle, then symmetric, then differenced.
template <class Lower>
void difference_fill(int n, const Lower& lower, Eigen::MatrixXd& m)
{
    m.resize(n, n);
    parallel_for(n, [&](std::size_t j) {
        for (int i = static_cast<int>(j); i < n; ++i)
            m(i, j) = lower(i, static_cast<int>(j));
    });
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i)
            m(i, j) = m(j, i);
    parallel_for(n, [&](std::size_t j) {
        double* c = m.col(j).data();
        for (int i = n - 1; i >= 1; --i)
            c[i] -= c[i - 1];
    });
    for (int j = n - 1; j >= 1; --j)
        m.col(j) -= m.col(j - 1);
}

std::shared_ptr<const TimeGrid> share(const TimeGrid& g)
{
    g.validate();
    return std::make_shared<const TimeGrid>(g);
}

PathSet to_paths(const Eigen::MatrixXd& incr, const std::shared_ptr<const TimeGrid>& grid, std::uint64_t seed,
                 PathLabel label, double hurst)
{
    PathSet out;
    const int n = static_cast<int>(incr.rows());
    out.paths.resize(incr.cols());
    for (Eigen::Index p = 0; p < incr.cols(); ++p) {
        GaussianPath& g = out.paths[p];
        g.grid = grid;
        g.seed = seed;
        g.index = p;
        g.label = label;
        g.hurst = hurst;
        g.values.resize(n + 1);
        g.values[0] = 0.0;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += incr(i, p);
            g.values[i + 1] = s;
        }
    }
    return out;
}

void check_paths(int n_paths)
{
    if (n_paths < 1)
        throw DomainError("n_paths must be at least 1");
}

} // namespace

void fill_increment_covariance(const CovarianceTable& table, const TimeGrid& grid, Eigen::MatrixXd& m)
{
    const int n = grid.steps();
    const auto& t = grid.points;
    const double h2 = 2.0 * table.params().hurst;
    std::vector<double> scale(n + 1);
    for (int i = 0; i <= n; ++i)
        scale[i] = std::pow(t[i], h2);
    difference_fill(
        n,
        [&](int i, int j) {
            const double s = t[j + 1], u = t[i + 1];
            return scale[i + 1] * table.unit_psi(s / u, (u - s) / u);
        },
        m);
    for (int i = 0; i < n; ++i)
        m(i, i) = table.phi(t[i], t[i + 1]);
}

void fill_increment_covariance(const RlCovarianceTable& table, const TimeGrid& grid, Eigen::MatrixXd& m)
{
    const auto& t = grid.points;
    difference_fill(grid.steps(), [&](int i, int j) { return table.psi(t[j + 1], t[i + 1]); }, m);
}

PathSet sample_gfbm(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    check_paths(n_paths);
    auto g = share(grid);
    auto f = GaussianFactor::factorize(g->steps(), [&](Eigen::MatrixXd& m) { fill_increment_covariance(table, *g, m); });
    PathSet out = to_paths(f.sample(n_paths, seed, kStreamX), g, seed, PathLabel::Gfbm, table.params().hurst);
    out.jitter = f.jitter();
    return out;
}

PathSet sample_gfbm(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    CovarianceTable table(params);
    return sample_gfbm(table, grid, n_paths, seed);
}

PathSet sample_rl_gfbm(const RlParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    check_paths(n_paths);
    auto g = share(grid);
    RlCovarianceTable table(params);
    auto f = GaussianFactor::factorize(g->steps(), [&](Eigen::MatrixXd& m) { fill_increment_covariance(table, *g, m); });
    PathSet out = to_paths(f.sample(n_paths, seed, kStreamX), g, seed, PathLabel::RlGfbm, params.hurst);
    out.jitter = f.jitter();
    return out;
}

PathSet sample_bm(const TimeGrid& grid, int n_paths, std::uint64_t seed, std::uint64_t stream)
{
    check_paths(n_paths);
    auto g = share(grid);
    const int n = g->steps();
    Eigen::MatrixXd z = standard_normals(n, n_paths, seed, stream);
    for (int i = 0; i < n; ++i)
        z.row(i) *= std::sqrt(g->points[i + 1] - g->points[i]);
    return to_paths(z, g, seed, PathLabel::Bm, 0.5);
}

std::vector<PathBundle> sample_mixed_bundle(const CovarianceTable& table, const TimeGrid& grid, int n_paths,
                                            std::uint64_t seed)
{
    PathSet x = sample_gfbm(table, grid, n_paths, seed);
    PathSet b = sample_bm(grid, n_paths, seed, kStreamBTilde);
    std::vector<PathBundle> out(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        out[p].x = std::move(x.paths[p]);
        out[p].b_tilde = std::move(b.paths[p]);
    }
    return out;
}

PathSet sample_mixed(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    PathSet x = sample_gfbm(table, grid, n_paths, seed);
    PathSet b = sample_bm(grid, n_paths, seed, kStreamBTilde);
    for (int p = 0; p < n_paths; ++p) {
        auto& v = x.paths[p].values;
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += b.paths[p].values[i];
        x.paths[p].label = PathLabel::Mixed;
    }
    return x;
}

PathSet sample_mixed(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    CovarianceTable table(params);
    return sample_mixed(table, grid, n_paths, seed);
}

std::vector<double> fou_transform(const FouParams& fou, const TimeGrid& grid, const std::vector<double>& x)
{
    fou.validate();
    const auto& t = grid.points;
    if (x.size() != t.size())
        throw DomainError("fOU driver path does not match the grid");
    std::vector<double> z(t.size());
    double integral = 0.0; // int_0^{t_k} e^{-a(t_k - s)} X(s) ds by trapezoid
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k > 0) {
            const double h = t[k] - t[k - 1];
            const double e = std::exp(-fou.a * h);
            integral = e * integral + 0.5 * h * (e * x[k - 1] + x[k]);
        }
        const double decay = std::exp(-fou.a * t[k]);
        z[k] = fou.z0 * decay - fou.m * std::expm1(-fou.a * t[k]) + fou.nu * (x[k] - fou.a * integral);
    }
    return z;
}

PathSet sample_fou(const GfbmParams& params, const FouParams& fou, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed)
{
    fou.validate();
    PathSet x = sample_gfbm(params, grid, n_paths, seed);
    if (!grid.uniform)
        x.warnings.push_back("fOU trapezoid rule applied on a non-uniform grid");
    for (auto& p : x.paths) {
        p.values = fou_transform(fou, *p.grid, p.values);
        p.label = PathLabel::Fou;
    }
    return x;
}

} // namespace gfbm
