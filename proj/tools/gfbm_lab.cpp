#include "gfbm/bergomi.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/girsanov.hpp"
#include "gfbm/io.hpp"
#include "gfbm/market.hpp"
#include "gfbm/model.hpp"
#include "gfbm/parallel.hpp"
#include "gfbm/shotnoise.hpp"
#include "gfbm/simulate.hpp"
#include "gfbm/table.hpp"
#include "gfbm/variation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace {

using nlohmann::json;
using namespace gfbm;

constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

void emit_csv(const Table& t, CsvWriter& w)
{
    w.header(t.header);
    for (const auto& row : t.rows) {
        for (const auto& c : row)
            std::visit([&](const auto& v) { w.cell(v); }, c);
        w.end_row();
    }
}

json table_json(const Table& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { r[t.header[i]] = v; }, row[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct Common {
    std::string out = "-";
    std::string format = "csv";
    std::uint64_t seed = 1;
    double abs_tol = QuadratureSpec::tight().abs_tol;
    double rel_tol = QuadratureSpec::tight().rel_tol;

    QuadratureSpec spec() const
    {
        QuadratureSpec s = QuadratureSpec::tight();
        s.abs_tol = abs_tol;
        s.rel_tol = rel_tol;
        s.validate();
        return s;
    }
};

// Flags of the selected subcommand, as given or defaulted.
json options_json(const CLI::App* sub)
{
    json j = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help")
            continue;
        std::vector<std::string> vals = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
        if (vals.empty() && !opt->get_default_str().empty())
            vals = {opt->get_default_str()};
        if (vals.size() == 1)
            j[name] = vals[0];
        else
            j[name] = vals;
    }
    return j;
}

class Runner {
public:
    Runner(const CLI::App* sub, const Common& common) : sub_(sub), c_(common), start_(std::chrono::steady_clock::now())
    {
        if (c_.format != "csv" && c_.format != "json")
            throw DomainError("format must be csv or json");
    }

    void table(const Table& t, const json& extra = json::object()) const
    {
        if (c_.format == "json") {
            json j = extra;
            j["rows"] = table_json(t);
            document(j);
            return;
        }
        if (c_.out == "-") {
            CsvWriter w(std::cout);
            emit_csv(t, w);
        } else {
            {
                CsvWriter w(c_.out);
                emit_csv(t, w);
            }
            sidecar(extra);
        }
    }

    void document(const json& j) const
    {
        if (c_.out == "-") {
            std::cout << j.dump(2) << '\n';
        } else {
            write_json(c_.out, j);
            sidecar(json::object());
        }
    }

private:
    void sidecar(const json& extra) const
    {
        const double runtime =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json meta;
        meta["command"] = sub_->get_name();
        meta["config"] = options_json(sub_);
        meta["seed"] = c_.seed;
        meta["threads"] = thread_count();
        meta["versions"] = {{"gfbm-lab", kVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                          "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"boost", BOOST_LIB_VERSION}};
        meta["runtime_seconds"] = runtime;
        if (!extra.empty())
            meta["report"] = extra;
        write_sidecar(c_.out, meta);
    }

    const CLI::App* sub_;
    Common c_;
    std::chrono::steady_clock::time_point start_;
};

Table paths_table(const PathSet& ps)
{
    Table t;
    t.header.push_back("t");
    for (std::size_t p = 0; p < ps.paths.size(); ++p)
        t.header.push_back("path_" + std::to_string(p));
    if (ps.paths.empty())
        return t;
    const auto& pts = ps.paths.front().grid->points;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        std::vector<Cell> row{pts[k]};
        for (const auto& path : ps.paths)
            row.emplace_back(path.values[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

json warnings_json(const PathSet& ps)
{
    json j;
    j["jitter"] = ps.jitter;
    j["warnings"] = ps.warnings;
    return j;
}

void check_count(int n, const char* what)
{
    if (n < 1)
        throw DomainError(std::string(what) + " must be at least 1");
}

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generalized fractional Brownian motion laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; flags on the command line take precedence");
    app.set_version_flag("--version", kVersion);

    int threads = 0;
    app.add_option("--threads", threads, "worker cap (default: GFBM_LAB_THREADS, else all cores)")
        ->envname("GFBM_LAB_THREADS")
        ->check(CLI::NonNegativeNumber);

    Common common;
    auto add_common = [&](CLI::App* s, bool seeded) {
        s->add_option("--out,-o", common.out, "output file, '-' for stdout")->capture_default_str();
        s->add_option("--format", common.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        s->add_option("--abs-tol", common.abs_tol, "quadrature absolute tolerance")->capture_default_str();
        s->add_option("--rel-tol", common.rel_tol, "quadrature relative tolerance")->capture_default_str();
        if (seeded)
            s->add_option("--seed", common.seed, "random seed")->capture_default_str();
    };

    double alpha = 0.0, gamma = 0.0, horizon = 1.0;
    auto add_ag = [&](CLI::App* s) {
        s->add_option("--alpha", alpha, "kernel exponent")->required();
        s->add_option("--gamma", gamma, "variance exponent")->required();
    };

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "semimartingale region of (alpha, gamma)");
    add_ag(classify_cmd);
    add_common(classify_cmd, false);

    // table1
    std::string side = "a";
    auto* table1_cmd = app.add_subcommand("table1", "forward VVIX factor table for t = 0.5 (a) or t = 0.75 (b)");
    table1_cmd->add_option("--side", side, "a or b")->check(CLI::IsMember({"a", "b"}))->capture_default_str();
    add_common(table1_cmd, false);

    // simulate
    int n_steps = 256, n_paths = 100;
    std::string process = "gfbm";
    FouParams fou;
    auto* simulate_cmd = app.add_subcommand("simulate", "exact Gaussian path simulation");
    add_ag(simulate_cmd);
    simulate_cmd->add_option("--n", n_steps, "grid steps")->capture_default_str();
    simulate_cmd->add_option("--paths", n_paths, "number of paths")->capture_default_str();
    simulate_cmd->add_option("--horizon", horizon, "final time")->capture_default_str();
    simulate_cmd->add_option("--process", process, "gfbm, rl, mixed, bm, fou or drift")
        ->check(CLI::IsMember({"gfbm", "rl", "mixed", "bm", "fou", "drift"}))
        ->capture_default_str();
    simulate_cmd->add_option("--fou-a", fou.a, "fOU mean reversion")->capture_default_str();
    simulate_cmd->add_option("--fou-m", fou.m, "fOU long-run mean")->capture_default_str();
    simulate_cmd->add_option("--fou-nu", fou.nu, "fOU noise scale")->capture_default_str();
    simulate_cmd->add_option("--fou-z0", fou.z0, "fOU initial value")->capture_default_str();
    add_common(simulate_cmd, true);

    // variation
    std::vector<double> p_list{2.0};
    std::vector<int> n_list{256, 1024, 4096};
    auto* variation_cmd = app.add_subcommand("variation", "p-variation sums over refining partitions");
    add_ag(variation_cmd);
    variation_cmd->add_option("--p", p_list, "exponents")->capture_default_str();
    variation_cmd->add_option("--n", n_list, "partition sizes, each dividing the largest")->capture_default_str();
    variation_cmd->add_option("--paths", n_paths, "number of paths")->capture_default_str();
    variation_cmd->add_option("--horizon", horizon, "final time")->capture_default_str();
    add_common(variation_cmd, true);

    // wiener-hopf
    int wh_n = 64, volterra_steps = 0;
    auto* wh_cmd = app.add_subcommand("wiener-hopf", "Wiener-Hopf solution L(s,t) on the slice nodes");
    add_ag(wh_cmd);
    wh_cmd->add_option("--horizon", horizon, "final time")->capture_default_str();
    wh_cmd->add_option("--nodes", wh_n, "nodes per slice, a multiple of 16")->capture_default_str();
    wh_cmd->add_option("--volterra-steps", volterra_steps, "also solve the Volterra inverse on this uniform grid")
        ->capture_default_str();
    add_common(wh_cmd, false);

    // vvix-surface
    double surf_h = 0.05;
    std::vector<double> ts{0.5}, Ts{1.0}, gammas;
    double g_lo = 0.0, g_hi = 0.99;
    int g_count = 100;
    BergomiParams bp;
    auto* surface_cmd = app.add_subcommand("vvix-surface", "VVIX approximation over gamma with fixed H");
    surface_cmd->add_option("--H", surf_h, "Hurst index")->capture_default_str();
    surface_cmd->add_option("--t", ts, "evaluation times")->capture_default_str();
    surface_cmd->add_option("--T", Ts, "maturities")->capture_default_str();
    surface_cmd->add_option("--gammas", gammas, "explicit gamma values (overrides the range)");
    surface_cmd->add_option("--gamma-min", g_lo, "first gamma")->capture_default_str();
    surface_cmd->add_option("--gamma-max", g_hi, "last gamma")->capture_default_str();
    surface_cmd->add_option("--gamma-count", g_count, "gamma points")->capture_default_str();
    surface_cmd->add_option("--eta", bp.eta, "vol of vol")->capture_default_str();
    surface_cmd->add_option("--delta", bp.delta, "VIX window")->capture_default_str();
    add_common(surface_cmd, false);

    // price
    std::string mode = "martingale", model = "bachelier";
    double mu = 0.05, sigma = 0.2, rate = 0.01, p0 = 1.0;
    auto* price_cmd = app.add_subcommand("price", "risk-neutral pricing under the mixed model, or the arbitrage portfolio");
    add_ag(price_cmd);
    price_cmd->add_option("--mode", mode, "martingale or arbitrage")
        ->check(CLI::IsMember({"martingale", "arbitrage"}))
        ->capture_default_str();
    price_cmd->add_option("--mu", mu, "drift")->capture_default_str();
    price_cmd->add_option("--sigma", sigma, "volatility")->capture_default_str();
    price_cmd->add_option("--r", rate, "interest rate")->capture_default_str();
    price_cmd->add_option("--p0", p0, "initial price")->capture_default_str();
    price_cmd->add_option("--horizon", horizon, "maturity")->capture_default_str();
    price_cmd->add_option("--n", n_steps, "grid steps")->capture_default_str();
    price_cmd->add_option("--paths", n_paths, "number of paths")->capture_default_str();
    price_cmd->add_option("--nodes", wh_n, "Wiener-Hopf nodes per slice")->capture_default_str();
    price_cmd->add_option("--model", model, "arbitrage model: bachelier or black_scholes")
        ->check(CLI::IsMember({"bachelier", "black_scholes"}))
        ->capture_default_str();
    add_common(price_cmd, true);

    // shotnoise
    ShotNoiseParams sn;
    auto* shot_cmd = app.add_subcommand("shotnoise", "scaled integrated shot noise");
    shot_cmd->add_option("--rate", sn.rate, "Poisson intensity")->capture_default_str();
    shot_cmd->add_option("--alpha", sn.alpha, "shot exponent")->capture_default_str();
    shot_cmd->add_option("--gamma", sn.gamma, "mark variance exponent")->capture_default_str();
    shot_cmd->add_option("--epsilon", sn.epsilon, "time scaling")->capture_default_str();
    sn.window = 0.0;
    shot_cmd->add_option("--window", sn.window, "arrivals start at -window; 0 selects 64 horizon/epsilon")
        ->capture_default_str();
    shot_cmd->add_option("--mark-scale", sn.mark_scale, "mark amplitude")->capture_default_str();
    shot_cmd->add_option("--n", n_steps, "grid steps")->capture_default_str();
    shot_cmd->add_option("--paths", n_paths, "number of paths")->capture_default_str();
    shot_cmd->add_option("--horizon", horizon, "final time")->capture_default_str();
    add_common(shot_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        set_thread_count(threads);
        const CLI::App* sub = app.get_subcommands().front();
        Runner run(sub, common);

        if (sub == classify_cmd) {
            const GfbmParams p = make_params(alpha, gamma, common.spec());
            const RegionClass rc = classify(p);
            json j;
            j["alpha"] = alpha;
            j["gamma"] = gamma;
            j["region"] = to_string(rc.region);
            j["H"] = rc.hurst;
            j["c"] = p.c;
            j["fake_brownian_line"] = rc.fake_brownian_line;
            j["x_is_semimartingale"] = to_string(rc.x_is_semimartingale);
            j["x_finite_variation"] = rc.x_finite_variation;
            j["x_differentiable"] = rc.x_differentiable;
            j["y_is_semimartingale"] = to_string(rc.y_is_semimartingale);
            run.document(j);
        } else if (sub == table1_cmd) {
            const auto rows = table1(side[0]);
            Table t;
            if (side == "a") {
                t.header = {"alpha", "gamma", "H", "f", "v"};
                for (const auto& r : rows)
                    t.rows.push_back({r.alpha, r.gamma, r.hurst, r.f, r.v});
            } else {
                // The published v column is not proportional to f; it is reported next to the formula value.
                const auto ref = table1b_reference_v();
                t.header = {"alpha", "gamma", "H", "f", "v_formula", "v_paper", "v_paper_discrepancy"};
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto& r = rows[i];
                    t.rows.push_back({r.alpha, r.gamma, r.hurst, r.f, r.v, ref[i], ref[i] / r.v - 1.0});
                }
            }
            run.table(t);
        } else if (sub == simulate_cmd) {
            check_count(n_steps, "--n");
            check_count(n_paths, "--paths");
            const TimeGrid grid = TimeGrid::uniform_grid(horizon, n_steps);
            PathSet ps;
            if (process == "rl") {
                ps = sample_rl_gfbm(make_rl_params(alpha, gamma), grid, n_paths, common.seed);
            } else if (process == "bm") {
                ps = sample_bm(grid, n_paths, common.seed);
            } else {
                const GfbmParams p = make_params(alpha, gamma, common.spec());
                const CovarianceTable table(p, common.spec());
                if (process == "gfbm")
                    ps = sample_gfbm(table, grid, n_paths, common.seed);
                else if (process == "mixed")
                    ps = sample_mixed(table, grid, n_paths, common.seed);
                else if (process == "fou")
                    ps = sample_fou(p, fou, grid, n_paths, common.seed);
                else
                    ps = drift_lambda(table, grid, n_paths, common.seed);
            }
            for (const auto& w : ps.warnings)
                std::cerr << "warning: " << w << '\n';
            run.table(paths_table(ps), warnings_json(ps));
        } else if (sub == variation_cmd) {
            check_count(n_paths, "--paths");
            const GfbmParams p = make_params(alpha, gamma, common.spec());
            const auto rows = variation_sweep(p, p_list, n_list, n_paths, common.seed, horizon);
            Table t;
            t.header = {"p", "n", "mean", "std_error", "expected", "regime"};
            for (const auto& r : rows)
                t.rows.push_back({r.p, static_cast<long long>(r.n), r.mean, r.std_error, r.expected, to_string(r.regime)});
            json extra;
            extra["rho_t"] = rho(p) * horizon;
            extra["H"] = p.hurst;
            run.table(t, extra);
        } else if (sub == wh_cmd) {
            const GfbmParams p = make_params(alpha, gamma, common.spec());
            auto table = std::make_shared<const CovarianceTable>(p, common.spec());
            const WienerHopfGrid wh = solve_wiener_hopf(table, horizon, wh_n);
            Table t;
            t.header = {"s", "t", "value"};
            for (std::size_t j = 0; j < wh.slice_times.size(); ++j)
                for (std::size_t i = 0; i < wh.nodes.size(); ++i)
                    t.rows.push_back({wh.slice_times[j] * wh.nodes[i], wh.slice_times[j], wh.l_values(j, i)});
            json extra;
            extra["residual_norm"] = wh.residual_norm;
            extra["residual_raw"] = wh.residual_raw;
            extra["offnode_residual"] = wh.offnode_residual;
            extra["condition"] = wh.condition;
            if (volterra_steps > 0) {
                const VolterraGrid vg = solve_volterra(wh, TimeGrid::uniform_grid(horizon, volterra_steps));
                extra["volterra_residual"] = vg.residual_norm;
                if (common.out != "-")
                    write_volterra_csv(common.out + ".volterra.csv", vg);
            }
            std::cerr << "residual " << format_double(wh.residual_norm) << " condition "
                      << format_double(wh.condition) << '\n';
            run.table(t, extra);
        } else if (sub == surface_cmd) {
            if (gammas.empty()) {
                check_count(g_count, "--gamma-count");
                gammas = linspace(g_lo, g_hi, g_count);
            }
            const auto rows = vvix_surface(surf_h, gammas, ts, Ts, bp);
            Table t;
            t.header = {"alpha", "gamma", "t", "T", "v"};
            for (const auto& r : rows)
                t.rows.push_back({r.alpha, r.gamma, r.t, r.T, r.v});
            run.table(t);
        } else if (sub == price_cmd) {
            check_count(n_steps, "--n");
            check_count(n_paths, "--paths");
            const GfbmParams p = make_params(alpha, gamma, common.spec());
            const MarketParams mkt = MarketParams::make(mu, sigma, rate, p0);
            json j;
            if (mode == "martingale") {
                auto table = std::make_shared<const CovarianceTable>(p, common.spec());
                const WienerHopfGrid wh = solve_wiener_hopf(table, horizon, wh_n);
                const MartingaleReport r = martingale_check(mkt, *table, wh, n_steps, n_paths, common.seed);
                j["estimate"] = r.estimate;
                j["stderr"] = r.std_error;
                j["deviation_se"] = r.deviation_se;
                j["call_estimate"] = r.call_estimate;
                j["call_stderr"] = r.call_std_error;
                j["mean_weight"] = r.mean_weight;
                j["weight_stderr"] = r.weight_std_error;
                j["wiener_hopf_residual"] = wh.residual_norm;
            } else {
                const PriceModel pm = model == "bachelier" ? PriceModel::Bachelier : PriceModel::BlackScholes;
                const double r_arb = pm == PriceModel::Bachelier ? 0.0 : rate;
                const ArbitrageReport r =
                    arbitrage_demo(p, TimeGrid::uniform_grid(horizon, n_steps), n_paths, common.seed, pm, r_arb);
                j["model"] = to_string(r.model);
                j["rate"] = r.rate;
                j["monotone_fraction"] = r.monotone_fraction;
                j["max_identity_error"] = r.max_identity_error;
                j["nonnegative"] = r.nonnegative;
                j["terminal_positive"] = r.terminal_positive;
                j["warnings"] = r.warnings;
                if (!r.paths.empty())
                    j["levels"] = r.paths.front().steps;
                json errs = json::array();
                for (const auto& path : r.paths)
                    errs.push_back(path.sum_error);
                j["sum_error"] = errs;
                for (const auto& w : r.warnings)
                    std::cerr << "warning: " << w << '\n';
            }
            j["n_paths"] = n_paths;
            j["seed"] = common.seed;
            j["params"] = {{"alpha", alpha}, {"gamma", gamma}, {"mu", mkt.mu}, {"sigma", mkt.sigma},
                           {"r", mkt.r},         {"theta", mkt.theta}, {"p0", mkt.p0}, {"horizon", horizon}};
            run.document(j);
        } else if (sub == shot_cmd) {
            check_count(n_steps, "--n");
            check_count(n_paths, "--paths");
            if (sn.window == 0.0 && sn.epsilon > 0.0)
                sn.window = 64.0 * horizon / sn.epsilon;
            const PathSet ps =
                sample_shot_noise_prelimit(sn, TimeGrid::uniform_grid(horizon, n_steps), n_paths, common.seed);
            json extra = warnings_json(ps);
            extra["variance_T"] = shot_noise_variance(sn, horizon);
            extra["truncation_fraction"] = shot_noise_truncation_fraction(sn, horizon);
            run.table(paths_table(ps), extra);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
