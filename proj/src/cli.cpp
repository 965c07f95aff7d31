#include "netkernel/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "netkernel/errors.hpp"
#include "netkernel/experiments.hpp"
#include "netkernel/jsonio.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {
namespace cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    if (!j.is_object() || j.empty()) throw ConfigError("config must be a non-empty object");
    return j;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

BasisSpec parse_basis(const json& j) {
    if (j.is_object() && j.contains("preset")) {
        check_keys(j, {"preset", "p"}, "basis preset");
        const std::string name = j.at("preset").get<std::string>();
        if (name == "lj3") return presets::lj_basis(false);
        if (name == "lj10") return presets::lj_basis(true);
        if (name == "kuramoto_h") return presets::kuramoto_basis(false);
        if (name == "kuramoto_hphi") return presets::kuramoto_basis(true);
        if (name == "leader_follower") return presets::leader_follower_basis();
        if (name == "multitype") return presets::multitype_basis();
        if (name == "fourier_radial") return presets::fourier_radial_basis(j.value("p", 16));
        throw ConfigError("unknown basis preset '" + name + "'");
    }
    return basis_from_json(j);
}

VectorXd parse_coef(const json& j, int p_expected) {
    if (j.is_array()) {
        VectorXd c(j.size());
        for (std::size_t k = 0; k < j.size(); ++k) c(k) = j[k].get<double>();
        if (p_expected > 0 && c.size() != p_expected)
            throw ConfigError("coefficient length does not match the basis");
        return c;
    }
    check_keys(j, {"preset", "p", "seed"}, "coef preset");
    const std::string name = j.at("preset").get<std::string>();
    if (name == "lj3") return presets::lj_coef(false);
    if (name == "lj10") return presets::lj_coef(true);
    if (name == "leader_follower") return presets::leader_follower_coef();
    if (name == "fourier_radial")
        return presets::fourier_radial_coef(j.value("p", 16), j.value("seed", std::uint64_t{1}));
    throw ConfigError("unknown coef preset '" + name + "'");
}

WeightMatrix parse_weights(const json& j, int n_agents) {
    check_keys(j, {"kind", "degree", "seed", "leaders", "entries"}, "weights");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "random")
        return sample_weight_matrix(n_agents, j.at("degree").get<int>(),
                                    j.value("seed", std::uint64_t{1}));
    if (kind == "leader_follower")
        return presets::leader_follower_matrix(n_agents,
                                               j.at("leaders").get<std::vector<int>>(),
                                               j.value("seed", std::uint64_t{1}));
    if (kind == "dense_random") {
        CounterRng rng(j.value("seed", std::uint64_t{1}));
        MatrixXd raw(n_agents, n_agents);
        for (int i = 0; i < n_agents; ++i)
            for (int jj = 0; jj < n_agents; ++jj) raw(i, jj) = rng.uniform(i, jj);
        return WeightMatrix::normalized(std::move(raw));
    }
    if (kind == "matrix") {
        const auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
        MatrixXd m(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw ConfigError("weight matrix must be square");
            for (std::size_t jj = 0; jj < rows.size(); ++jj) m(i, jj) = rows[i][jj];
        }
        WeightMatrix a{std::move(m)};
        a.validate();
        return a;
    }
    throw ConfigError("unknown weights kind '" + kind + "'");
}

AlsOptions parse_als_options(const json& j) {
    check_keys(j, {"tol", "max_iter", "c0_seed", "reg"}, "als options");
    AlsOptions o;
    o.tol = j.value("tol", 1e-6);
    o.max_iter = j.value("max_iter", 10);
    o.c0_seed = j.value("c0_seed", std::uint64_t{0});
    if (j.contains("reg")) o.reg = regularizer_from_json(j.at("reg"));
    return o;
}

json fit_to_json(const FitResult& fit) {
    json j;
    j["converged"] = fit.converged;
    j["c_hat"] = std::vector<double>(fit.c_hat.c.data(), fit.c_hat.c.data() + fit.c_hat.c.size());
    j["a_hat"] = json::array();
    for (int i = 0; i < fit.a_hat.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < fit.a_hat.size(); ++k) row.push_back(fit.a_hat.entries(i, k));
        j["a_hat"].push_back(row);
    }
    j["history"] = json::array();
    for (const auto& rec : fit.history)
        j["history"].push_back({{"iter", rec.iter},
                                {"rel_change_a", rec.rel_change_a},
                                {"rel_change_c", rec.rel_change_c},
                                {"loss", rec.loss}});
    return j;
}

// ---- experiment handlers -------------------------------------------------

int run_simulate(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "system", "weights", "basis", "coef", "m", "sigma_obs",
                     "output"},
               "simulate config");
    const SystemSpec spec = system_from_json(cfg.at("system"));
    const BasisSpec basis = parse_basis(cfg.at("basis"));
    const VectorXd coef = parse_coef(cfg.at("coef"), basis.p());
    const WeightMatrix a = parse_weights(cfg.at("weights"), spec.n_agents);
    const int m = cfg.at("m").get<int>();

    TrajectoryData data = simulate(spec, a, basis, KernelCoef{coef}, m);
    const double sigma_obs = cfg.value("sigma_obs", 0.0);
    if (sigma_obs > 0.0)
        data = add_observation_noise(data, sigma_obs, mix64(spec.seed) ^ 0x6f6273ull);
    const fs::path path = out / cfg.value("output", std::string("trajectories.bin"));
    save_trajectories(data, path.string());

    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "simulate";
    summary["output"] = path.string();
    summary["m"] = m;
    summary["a_hash"] = data.a_hash;
    summary["c_hash"] = data.c_hash;
    write_json(summary, out / "simulate_summary.json");
    return 0;
}

int run_fit(const json& cfg, const fs::path& out, bool orals) {
    check_keys(cfg, {"experiment", "data", "basis", "als", "reg", "truth", "output"},
               "fit config");
    const TrajectoryData data = load_trajectories(cfg.at("data").get<std::string>());
    const BasisSpec basis = parse_basis(cfg.at("basis"));

    FitResult fit;
    if (orals) {
        const Regularizer reg = cfg.contains("reg") ? regularizer_from_json(cfg.at("reg"))
                                                    : Regularizer::min_norm();
        fit = orals_fit(data, basis, reg);
    } else {
        fit = als_fit(data, basis,
                      cfg.contains("als") ? parse_als_options(cfg.at("als")) : AlsOptions{});
    }

    json summary = fit_to_json(fit);
    summary["schema_version"] = 1;
    summary["experiment"] = orals ? "fit-orals" : "fit-als";
    if (cfg.contains("truth")) {
        const auto& truth = cfg.at("truth");
        check_keys(truth, {"weights", "coef"}, "truth");
        const WeightMatrix a_true = parse_weights(truth.at("weights"), data.spec.n_agents);
        const VectorXd c_true = parse_coef(truth.at("coef"), basis.p());
        const EmpiricalMeasure measure = exploration_measure(data);
        summary["graph_err"] = graph_error(a_true, fit.a_hat);
        summary["kernel_err"] = kernel_error(basis, c_true, fit.c_hat.c, measure);
    }
    write_json(summary, out / cfg.value("output", std::string(orals ? "fit_orals.json"
                                                                    : "fit_als.json")));
    return 0;
}

int run_fit_threefold(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "data", "basis", "q", "options", "output"},
               "fit-threefold config");
    const TrajectoryData data = load_trajectories(cfg.at("data").get<std::string>());
    const BasisSpec basis = parse_basis(cfg.at("basis"));
    ThreefoldOptions opts;
    if (cfg.contains("options")) {
        const auto& oj = cfg.at("options");
        check_keys(oj, {"tol", "max_iter", "use_kmeans", "kmeans_labels_only", "seed"},
                   "threefold options");
        opts.tol = oj.value("tol", 1e-6);
        opts.max_iter = oj.value("max_iter", 50);
        opts.use_kmeans = oj.value("use_kmeans", true);
        opts.kmeans_labels_only = oj.value("kmeans_labels_only", false);
        opts.seed = oj.value("seed", std::uint64_t{0});
    }
    const MultitypeFactors fit = threefold_fit(data, basis, cfg.at("q").get<int>(), opts);

    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "fit-threefold";
    summary["converged"] = fit.converged;
    summary["labels"] = fit.labels;
    summary["u"] = json::array();
    for (int k = 0; k < fit.u.rows(); ++k) {
        json row = json::array();
        for (int q = 0; q < fit.u.cols(); ++q) row.push_back(fit.u(k, q));
        summary["u"].push_back(row);
    }
    summary["v"] = json::array();
    for (int i = 0; i < fit.v.rows(); ++i) {
        json row = json::array();
        for (int q = 0; q < fit.v.cols(); ++q) row.push_back(fit.v(i, q));
        summary["v"].push_back(row);
    }
    write_json(summary, out / cfg.value("output", std::string("fit_threefold.json")));
    return 0;
}

int run_study_convergence(const json& cfg, const fs::path& out) {
    check_keys(cfg,
               {"experiment", "m_grid", "runs", "misspecified", "sigma", "sigma_obs", "seed",
                "m_test_measure"},
               "study-convergence config");
    experiments::ConvergenceConfig c;
    c.m_grid = cfg.at("m_grid").get<std::vector<int>>();
    c.runs = cfg.value("runs", 20);
    c.misspecified = cfg.value("misspecified", false);
    c.sigma = cfg.value("sigma", 1e-2);
    c.sigma_obs = cfg.value("sigma_obs", 0.0);
    c.seed = cfg.value("seed", std::uint64_t{1});
    c.m_test_measure = cfg.value("m_test_measure", 200);
    const auto res = experiments::study_convergence(c);
    experiments::write_csv(res.raw, (out / "convergence_runs.csv").string());
    experiments::write_csv(res.quartiles, (out / "convergence_quartiles.csv").string());
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "study-convergence";
    summary["slope_graph_als"] = res.slope_graph_als;
    summary["slope_kernel_als"] = res.slope_kernel_als;
    summary["slope_graph_orals"] = res.slope_graph_orals;
    summary["slope_kernel_orals"] = res.slope_kernel_orals;
    write_json(summary, out / "convergence_summary.json");
    return 0;
}

int run_study_noise(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "sweep", "levels", "runs", "m", "seed"},
               "study-noise config");
    experiments::NoiseConfig c;
    const std::string sweep = cfg.value("sweep", std::string("sigma"));
    if (sweep == "sigma_obs")
        c.sweep_sigma_obs = true;
    else if (sweep != "sigma")
        throw ConfigError("sweep must be 'sigma' or 'sigma_obs'");
    c.levels = cfg.at("levels").get<std::vector<double>>();
    if (c.levels.empty()) throw ConfigError("empty noise grid");
    c.runs = cfg.value("runs", 10);
    c.m_train = cfg.value("m", 500);
    c.seed = cfg.value("seed", std::uint64_t{1});
    const auto res = experiments::study_noise(c);
    experiments::write_csv(res.raw, (out / ("noise_" + sweep + ".csv")).string());
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "study-noise";
    summary["sweep"] = sweep;
    summary["slope_graph_als"] = res.slope_graph_als;
    summary["slope_kernel_als"] = res.slope_kernel_als;
    summary["slope_graph_orals"] = res.slope_graph_orals;
    summary["slope_kernel_orals"] = res.slope_kernel_orals;
    write_json(summary, out / ("noise_" + sweep + "_summary.json"));
    return 0;
}

int run_study_regularizers(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "runs", "m", "n_agents", "seed"},
               "study-regularizers config");
    experiments::RegularizerStudyConfig c;
    c.runs = cfg.value("runs", 10);
    c.m_train = cfg.value("m", 64);
    c.n_agents = cfg.value("n_agents", 20);
    c.seed = cfg.value("seed", std::uint64_t{1});
    const auto table = experiments::study_regularizers(c);
    experiments::write_csv(table, (out / "regularizers.csv").string());
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "study-regularizers";
    summary["methods"] = {"none", "pseudo_inverse", "min_norm", "tikhonov_id", "dartr"};
    write_json(summary, out / "regularizers_summary.json");
    return 0;
}

int run_study_rip(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "m", "n_probe", "seed", "landscape"}, "study-rip config");
    const int m = cfg.value("m", 2000);
    const int n_probe = cfg.value("n_probe", 2000);
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
    const auto rip = experiments::study_rip(m, n_probe, seed);

    experiments::Table ratios;
    ratios.columns = {"family", "ratio"};
    auto add = [&](double id, const RipReport& rep) {
        for (double r : rep.ratios) ratios.rows.push_back({id, r});
    };
    add(0, rip.gaussian);
    add(1, rip.fourier);
    add(2, rip.hermite);
    add(3, rip.lj);
    experiments::write_csv(ratios, (out / "rip_ratios.csv").string());

    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "study-rip";
    summary["delta"] = {{"gaussian", rip.gaussian.delta},
                        {"fourier", rip.fourier.delta},
                        {"hermite", rip.hermite.delta},
                        {"lj", rip.lj.delta}};

    if (cfg.contains("landscape")) {
        const auto& lj = cfg.at("landscape");
        check_keys(lj, {"instances", "grid", "m"}, "landscape config");
        const int instances = lj.value("instances", 20);
        const int grid = lj.value("grid", 200);
        const int lm = lj.value("m", 100);
        const auto hermite = experiments::study_landscape(presets::hermite_pair_basis(),
                                                          instances, grid, lm, seed ^ 0x51);
        const auto fourier = experiments::study_landscape(presets::fourier_pair_basis(),
                                                          instances, grid, lm, seed ^ 0x52);
        summary["landscape"] = {
            {"hermite_instances_with_spurious", hermite.instances_with_spurious},
            {"fourier_instances_with_spurious", fourier.instances_with_spurious}};
        experiments::Table grid_tab;
        grid_tab.columns = {"theta1", "theta2", "loss"};
        const auto& scan = hermite.last_scan;
        for (int i = 0; i < scan.grid; ++i)
            for (int j = 0; j < scan.grid; ++j)
                grid_tab.rows.push_back({2.0 * M_PI * i / scan.grid,
                                         2.0 * M_PI * j / scan.grid, scan.loss(i, j)});
        experiments::write_csv(grid_tab, (out / "landscape_grid.csv").string());
    }
    write_json(summary, out / "rip_summary.json");
    return 0;
}

int run_kuramoto(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "m_grid", "runs", "seed"}, "kuramoto config");
    experiments::KuramotoConfig c;
    if (cfg.contains("m_grid")) c.m_grid = cfg.at("m_grid").get<std::vector<int>>();
    c.runs = cfg.value("runs", 20);
    c.seed = cfg.value("seed", std::uint64_t{1});
    const auto table = experiments::study_kuramoto(c);
    experiments::write_csv(table, (out / "kuramoto.csv").string());
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "kuramoto";
    write_json(summary, out / "kuramoto_summary.json");
    return 0;
}

int run_leader_follower(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "m_grid", "seed"}, "leader-follower config");
    std::vector<int> m_grid = {15, 30, 100};
    if (cfg.contains("m_grid")) m_grid = cfg.at("m_grid").get<std::vector<int>>();
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
    const auto runs = experiments::study_leader_follower(m_grid, seed);
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "leader-follower";
    summary["runs"] = json::array();
    for (const auto& r : runs)
        summary["runs"].push_back({{"m", r.m_train},
                                   {"graph_err", r.graph_err},
                                   {"leaders_exact", r.leaders_exact},
                                   {"groups_exact", r.groups_exact}});
    write_json(summary, out / "leader_follower_summary.json");
    return 0;
}

int run_multitype_select(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "runs", "seed"}, "multitype-select config");
    const int runs = cfg.value("runs", 10);
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
    const auto results = experiments::study_multitype_select(runs, seed);
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "multitype-select";
    summary["runs"] = json::array();
    for (const auto& r : results)
        summary["runs"].push_back({{"q_true", r.q_true},
                                   {"q_star", r.q_star},
                                   {"err_q1", r.err_q1},
                                   {"err_q2", r.err_q2}});
    write_json(summary, out / "multitype_select_summary.json");
    return 0;
}

int run_benchmark(const json& cfg, const fs::path& out) {
    check_keys(cfg, {"experiment", "m_grid", "n_agents", "p", "n_steps", "reps", "seed"},
               "benchmark config");
    experiments::BenchmarkConfig c;
    if (cfg.contains("m_grid")) c.m_grid = cfg.at("m_grid").get<std::vector<int>>();
    c.n_agents = cfg.value("n_agents", 16);
    c.p = cfg.value("p", 8);
    c.n_steps = cfg.value("n_steps", 2);
    c.reps = cfg.value("reps", 3);
    c.seed = cfg.value("seed", std::uint64_t{1});
    const auto res = experiments::study_benchmark(c);
    experiments::write_csv(res.table, (out / "benchmark.csv").string());
    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = "benchmark";
    summary["slope_als"] = res.slope_als;
    summary["slope_orals"] = res.slope_orals;
    write_json(summary, out / "benchmark_summary.json");
    return 0;
}

}  // namespace

int run(const std::string& subcommand, const std::string& config_path,
        const std::string& out_dir, std::optional<int> threads,
        std::optional<std::uint64_t> seed_override) {
    try {
        if (threads) set_num_threads(*threads);
        json cfg = load_config(config_path);
        if (cfg.contains("experiment") &&
            cfg.at("experiment").get<std::string>() != subcommand)
            throw ConfigError("config experiment '" +
                              cfg.at("experiment").get<std::string>() +
                              "' does not match subcommand '" + subcommand + "'");
        if (seed_override) cfg["seed"] = *seed_override;

        const fs::path out(out_dir);
        fs::create_directories(out);

        if (subcommand == "simulate") return run_simulate(cfg, out);
        if (subcommand == "fit-als") return run_fit(cfg, out, false);
        if (subcommand == "fit-orals") return run_fit(cfg, out, true);
        if (subcommand == "fit-threefold") return run_fit_threefold(cfg, out);
        if (subcommand == "study-convergence") return run_study_convergence(cfg, out);
        if (subcommand == "study-noise") return run_study_noise(cfg, out);
        if (subcommand == "study-regularizers") return run_study_regularizers(cfg, out);
        if (subcommand == "study-rip") return run_study_rip(cfg, out);
        if (subcommand == "kuramoto") return run_kuramoto(cfg, out);
        if (subcommand == "leader-follower") return run_leader_follower(cfg, out);
        if (subcommand == "multitype-select") return run_multitype_select(cfg, out);
        if (subcommand == "benchmark") return run_benchmark(cfg, out);
        throw ConfigError("unknown experiment '" + subcommand + "'");
    } catch (const Error& e) {
        json rec;
        rec["error"] = e.name();
        rec["message"] = e.what();
        rec["code"] = static_cast<int>(e.code());
        std::cerr << rec.dump() << std::endl;
        return static_cast<int>(e.code());
    } catch (const json::exception& e) {
        json rec;
        rec["error"] = "ConfigError";
        rec["message"] = e.what();
        rec["code"] = 2;
        std::cerr << rec.dump() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        json rec;
        rec["error"] = "NumericalError";
        rec["message"] = e.what();
        rec["code"] = 4;
        std::cerr << rec.dump() << std::endl;
        return 4;
    }
}

}  // namespace cli
}  // namespace netkernel
