#include "netkernel/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {
namespace experiments {

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

EmpiricalMeasure test_measure_for(const Trial& trial) {
    SystemSpec test_spec = trial.spec;
    test_spec.seed = mix64(trial.spec.seed) ^ 0x74657374ull;
    const TrajectoryData test =
        simulate(test_spec, trial.a_true, trial.sim_basis, KernelCoef{trial.sim_coef},
                 trial.m_test_measure);
    return exploration_measure(test);
}

}  // namespace

void write_csv(const Table& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "# netkernel csv schema_version=1\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    os.precision(17);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
    if (!os) throw DataError("write failed for " + path);
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw DataError("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - lo;
    return (1.0 - frac) * v[lo] + frac * v[hi];
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("slope needs >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log10(x[i]);
        const double ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TrialResult run_trial(const Trial& trial) {
    TrajectoryData data =
        simulate(trial.spec, trial.a_true, trial.sim_basis, KernelCoef{trial.sim_coef},
                 trial.m_train);
    if (trial.sigma_obs > 0.0)
        data = add_observation_noise(data, trial.sigma_obs,
                                     mix64(trial.spec.seed) ^ 0x6f6273ull);
    const EmpiricalMeasure measure = test_measure_for(trial);

    TrialResult result;
    const bool shared = sensing_stats_affordable(trial.spec.n_agents, trial.fit_basis.p());

    if (shared) {
        const double t0 = now_ms();
        const SensingStats stats = assemble_sensing_stats(data, trial.fit_basis);
        const double t1 = now_ms();
        result.als_fit = als_fit(stats, trial.als);
        const double t2 = now_ms();
        if (trial.run_orals) result.orals_fit = orals_fit(stats, trial.orals_reg);
        const double t3 = now_ms();
        result.als_ms = (t1 - t0) + (t2 - t1);
        result.orals_ms = (t1 - t0) + (t3 - t2);
    } else {
        const double t0 = now_ms();
        AlsOptions als_opts = trial.als;
        als_opts.assembly = AlsOptions::Assembly::Streaming;
        result.als_fit = als_fit(data, trial.fit_basis, als_opts);
        const double t1 = now_ms();
        if (trial.run_orals) result.orals_fit = orals_fit(data, trial.fit_basis, trial.orals_reg);
        const double t2 = now_ms();
        result.als_ms = t1 - t0;
        result.orals_ms = t2 - t1;
    }

    result.als_graph = graph_error(trial.a_true, result.als_fit.a_hat);
    result.als_kernel =
        kernel_error(trial.true_kernel, trial.fit_basis, result.als_fit.c_hat.c, measure);
    if (trial.run_orals) {
        result.orals_graph = graph_error(trial.a_true, result.orals_fit.a_hat);
        result.orals_kernel =
            kernel_error(trial.true_kernel, trial.fit_basis, result.orals_fit.c_hat.c, measure);
    }
    return result;
}

ConvergenceResult study_convergence(const ConvergenceConfig& cfg) {
    if (cfg.m_grid.empty()) throw ConfigError("empty M grid");
    ConvergenceResult out;
    out.raw.columns = {"algo", "M", "run", "graph_err", "kernel_err", "traj_err", "wall_ms"};
    out.quartiles.columns = {"algo",      "M",           "graph_q1", "graph_median",
                             "graph_q3",  "kernel_q1",   "kernel_median", "kernel_q3"};

    std::vector<double> med_graph_als, med_kernel_als, med_graph_orals, med_kernel_orals;
    std::vector<double> ms(cfg.m_grid.begin(), cfg.m_grid.end());

    for (int m_train : cfg.m_grid) {
        std::vector<double> ga, ka, go, ko;
        for (int run = 0; run < cfg.runs; ++run) {
            const std::uint64_t run_seed = mix64(cfg.seed) ^ mix64(1000 * run + m_train);
            Trial trial;
            trial.spec = presets::lj_spec(6, 50, run_seed);
            trial.spec.sigma = cfg.sigma;
            trial.a_true = sample_weight_matrix(6, 2, run_seed ^ 0xa1);
            trial.sim_basis = presets::lj_basis(true);
            trial.sim_coef = presets::lj_coef(true);
            trial.fit_basis = presets::lj_basis(cfg.misspecified);
            trial.true_kernel = presets::lj_true_kernel();
            trial.sigma_obs = cfg.sigma_obs;
            trial.m_train = m_train;
            trial.m_test_measure = cfg.m_test_measure;
            const TrialResult res = run_trial(trial);
            ga.push_back(res.als_graph);
            ka.push_back(res.als_kernel);
            go.push_back(res.orals_graph);
            ko.push_back(res.orals_kernel);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            out.raw.rows.push_back({0.0, double(m_train), double(run), res.als_graph,
                                    res.als_kernel, nan, res.als_ms});
            out.raw.rows.push_back({1.0, double(m_train), double(run), res.orals_graph,
                                    res.orals_kernel, nan, res.orals_ms});
        }
        out.quartiles.rows.push_back({0.0, double(m_train), quantile(ga, 0.25), median(ga),
                                      quantile(ga, 0.75), quantile(ka, 0.25), median(ka),
                                      quantile(ka, 0.75)});
        out.quartiles.rows.push_back({1.0, double(m_train), quantile(go, 0.25), median(go),
                                      quantile(go, 0.75), quantile(ko, 0.25), median(ko),
                                      quantile(ko, 0.75)});
        med_graph_als.push_back(median(ga));
        med_kernel_als.push_back(median(ka));
        med_graph_orals.push_back(median(go));
        med_kernel_orals.push_back(median(ko));
    }
    if (cfg.m_grid.size() >= 2) {
        out.slope_graph_als = loglog_slope(ms, med_graph_als);
        out.slope_kernel_als = loglog_slope(ms, med_kernel_als);
        out.slope_graph_orals = loglog_slope(ms, med_graph_orals);
        out.slope_kernel_orals = loglog_slope(ms, med_kernel_orals);
    }
    return out;
}

NoiseResult study_noise(const NoiseConfig& cfg) {
    if (cfg.levels.empty()) throw ConfigError("empty noise grid");
    NoiseResult out;
    out.raw.columns = {"algo", "level", "run", "graph_err", "kernel_err"};

    std::vector<double> mg_als, mk_als, mg_orals, mk_orals;
    for (double level : cfg.levels) {
        std::vector<double> ga, ka, go, ko;
        for (int run = 0; run < cfg.runs; ++run) {
            const std::uint64_t run_seed =
                mix64(cfg.seed) ^ mix64(run * 7919 + static_cast<int>(1e9 * level));
            Trial trial;
            trial.spec = presets::lj_spec(6, 50, run_seed);
            trial.a_true = sample_weight_matrix(6, 2, run_seed ^ 0xb2);
            trial.sim_basis = presets::lj_basis(false);
            trial.sim_coef = presets::lj_coef(false);
            trial.fit_basis = presets::lj_basis(false);
            trial.true_kernel = presets::lj_true_kernel();
            trial.m_train = cfg.m_train;
            if (cfg.sweep_sigma_obs) {
                trial.spec.sigma = 0.0;
                trial.sigma_obs = level;
            } else {
                trial.spec.sigma = level;
                trial.sigma_obs = 0.0;
            }
            const TrialResult res = run_trial(trial);
            ga.push_back(res.als_graph);
            ka.push_back(res.als_kernel);
            go.push_back(res.orals_graph);
            ko.push_back(res.orals_kernel);
            out.raw.rows.push_back({0.0, level, double(run), res.als_graph, res.als_kernel});
            out.raw.rows.push_back({1.0, level, double(run), res.orals_graph, res.orals_kernel});
        }
        mg_als.push_back(median(ga));
        mk_als.push_back(median(ka));
        mg_orals.push_back(median(go));
        mk_orals.push_back(median(ko));
    }
    out.slope_graph_als = loglog_slope(cfg.levels, mg_als);
    out.slope_kernel_als = loglog_slope(cfg.levels, mk_als);
    out.slope_graph_orals = loglog_slope(cfg.levels, mg_orals);
    out.slope_kernel_orals = loglog_slope(cfg.levels, mk_orals);
    return out;
}

Table study_regularizers(const RegularizerStudyConfig& cfg) {
    Table table;
    table.columns = {"method", "run", "als_graph", "als_kernel", "orals_graph", "orals_kernel"};

    for (int run = 0; run < cfg.runs; ++run) {
        const std::uint64_t run_seed = mix64(cfg.seed) ^ mix64(run + 1);
        SystemSpec spec = presets::lj_spec(cfg.n_agents, 5, run_seed);
        const WeightMatrix a = sample_weight_matrix(cfg.n_agents, 2, run_seed ^ 0xc3);
        const BasisSpec basis = presets::lj_basis(false);
        const VectorXd coef = presets::lj_coef(false);
        TrajectoryData data = simulate(spec, a, basis, KernelCoef{coef}, cfg.m_train);
        data = add_observation_noise(data, 1e-3, run_seed ^ 0xd4);
        const SensingStats stats = assemble_sensing_stats(data, basis);
        const EmpiricalMeasure measure = exploration_measure(data);
        const VecFn truth = presets::lj_true_kernel();

        const MatrixXd bpsi = bpsi_matrix(data, basis).B;
        std::vector<std::pair<double, Regularizer>> methods;
        methods.emplace_back(0.0, Regularizer::none());
        methods.emplace_back(1.0, Regularizer::pseudo_inverse(1e-8));
        methods.emplace_back(2.0, Regularizer::min_norm());
        Regularizer tik = Regularizer::tikhonov_id(0.0);
        tik.auto_lambda = true;
        methods.emplace_back(3.0, tik);
        Regularizer dartr = Regularizer::tikhonov(0.0, bpsi);
        dartr.auto_lambda = true;
        methods.emplace_back(4.0, dartr);

        for (const auto& [method_id, reg] : methods) {
            AlsOptions als_opts;
            als_opts.reg = reg;
            double als_g = std::numeric_limits<double>::quiet_NaN();
            double als_k = als_g, orals_g = als_g, orals_k = als_g;
            try {
                const FitResult af = als_fit(stats, als_opts);
                als_g = graph_error(a, af.a_hat);
                als_k = kernel_error(truth, basis, af.c_hat.c, measure);
            } catch (const Error&) {
            }
            try {
                Regularizer oreg = reg;
                if (reg.mode == Regularizer::Mode::TikhonovGeneralized) {
                    // sensing unknowns are per-neighbor copies of the kernel
                    // coefficients; the penalty lifts blockwise
                    MatrixXd lifted = MatrixXd::Zero((cfg.n_agents - 1) * basis.p(),
                                                     (cfg.n_agents - 1) * basis.p());
                    for (int j = 0; j < cfg.n_agents - 1; ++j)
                        lifted.block(j * basis.p(), j * basis.p(), basis.p(), basis.p()) = bpsi;
                    oreg = Regularizer::tikhonov(reg.lambda, lifted);
                    oreg.auto_lambda = true;
                }
                const FitResult of = orals_fit(stats, oreg);
                orals_g = graph_error(a, of.a_hat);
                orals_k = kernel_error(truth, basis, of.c_hat.c, measure);
            } catch (const Error&) {
            }
            table.rows.push_back({method_id, double(run), als_g, als_k, orals_g, orals_k});
        }
    }
    return table;
}

BenchmarkResult study_benchmark(const BenchmarkConfig& cfg) {
    BenchmarkResult out;
    out.table.columns = {"M", "als_ms", "orals_ms"};
    std::vector<double> ms, als_t, orals_t;

    const BasisSpec basis = presets::fourier_radial_basis(cfg.p);
    const VectorXd coef = presets::fourier_radial_coef(cfg.p, cfg.seed);
    for (int m_train : cfg.m_grid) {
        SystemSpec spec;
        spec.n_agents = cfg.n_agents;
        spec.dim = 1;
        spec.sigma = 1e-4;
        spec.dt = 1e-3;
        spec.n_steps = cfg.n_steps;
        spec.init = SystemSpec::Init::UniformBox;
        spec.init_a = 0.0;
        spec.init_b = 1.5;
        spec.seed = mix64(cfg.seed) ^ mix64(m_train);
        const WeightMatrix a = sample_weight_matrix(cfg.n_agents, 2, spec.seed ^ 0xe5);
        const TrajectoryData data = simulate(spec, a, basis, KernelCoef{coef}, m_train);

        double best_als = std::numeric_limits<double>::infinity();
        double best_orals = best_als;
        for (int rep = 0; rep < cfg.reps; ++rep) {
            AlsOptions als_opts;
            als_opts.assembly = AlsOptions::Assembly::Streaming;
            const double t0 = now_ms();
            (void)als_fit(data, basis, als_opts);
            const double t1 = now_ms();
            (void)orals_fit(data, basis);
            const double t2 = now_ms();
            best_als = std::min(best_als, t1 - t0);
            best_orals = std::min(best_orals, t2 - t1);
        }
        out.table.rows.push_back({double(m_train), best_als, best_orals});
        ms.push_back(m_train);
        als_t.push_back(best_als);
        orals_t.push_back(best_orals);
    }
    if (ms.size() >= 2) {
        out.slope_als = loglog_slope(ms, als_t);
        out.slope_orals = loglog_slope(ms, orals_t);
    }
    return out;
}

RipStudyResult study_rip(int n_samples, int n_probe, std::uint64_t seed) {
    RipStudyResult out;
    out.gaussian = rip_scan(make_gaussian_sensing(2, 2, n_samples, seed ^ 0x11), n_probe, seed);
    out.fourier = rip_scan(
        make_ips_sensing(presets::fourier_pair_basis(), 3, n_samples, seed ^ 0x22), n_probe,
        seed);
    out.hermite = rip_scan(
        make_ips_sensing(presets::hermite_pair_basis(), 3, n_samples, seed ^ 0x33), n_probe,
        seed);
    out.lj = rip_scan(make_ips_sensing(presets::lj_pair_basis(), 3, n_samples, seed ^ 0x44),
                      n_probe, seed);
    return out;
}

LandscapeStudyResult study_landscape(const BasisSpec& pair_basis, int instances, int grid,
                                     int n_samples, std::uint64_t seed) {
    LandscapeStudyResult out;
    CounterRng rng(mix64(seed) ^ 0x6c616e64ull);
    for (int inst = 0; inst < instances; ++inst) {
        const auto sensing =
            make_ips_sensing(pair_basis, 3, n_samples, mix64(seed) ^ mix64(inst + 1));
        const double t1 = rng.uniform_in(0.0, 2.0 * M_PI, inst, 0);
        const double t2 = rng.uniform_in(0.0, 2.0 * M_PI, inst, 1);
        const LandscapeScan scan = landscape_scan(grid, sensing, t1, t2);
        int spurious = 0;
        for (const auto& [gi, gj] : scan.local_minima)
            if (scan.loss(gi, gj) > 1e-3 * scan.max_loss) ++spurious;
        out.spurious_per_instance.push_back(spurious);
        if (spurious > 0) ++out.instances_with_spurious;
        out.last_scan = scan;
    }
    return out;
}

Table study_kuramoto(const KuramotoConfig& cfg) {
    Table table;
    table.columns = {"basis_extended", "M",         "run",        "als_kernel",
                     "orals_kernel",   "als_graph", "orals_graph"};
    for (int extended = 0; extended <= 1; ++extended) {
        for (int m_train : cfg.m_grid) {
            for (int run = 0; run < cfg.runs; ++run) {
                const std::uint64_t run_seed =
                    mix64(cfg.seed) ^ mix64(run * 131 + m_train * 7 + extended);
                Trial trial;
                trial.spec = presets::kuramoto_spec(run_seed);
                trial.a_true = sample_weight_matrix(10, 3, run_seed ^ 0xf6);
                trial.sim_basis = presets::kuramoto_basis(true);
                VectorXd sim_c = VectorXd::Zero(trial.sim_basis.p());
                sim_c(trial.sim_basis.p() - 1) = 1.0;  // the sin(x) component
                trial.sim_coef = sim_c;
                trial.fit_basis = presets::kuramoto_basis(extended == 1);
                trial.true_kernel = presets::kuramoto_true_kernel();
                trial.sigma_obs = 1e-3;
                trial.m_train = m_train;
                trial.m_test_measure = 50;
                const TrialResult res = run_trial(trial);
                table.rows.push_back({double(extended), double(m_train), double(run),
                                      res.als_kernel, res.orals_kernel, res.als_graph,
                                      res.orals_graph});
            }
        }
    }
    return table;
}

std::vector<LeaderFollowerRun> study_leader_follower(const std::vector<int>& m_grid,
                                                     std::uint64_t seed) {
    const int n = 20;
    const std::vector<int> leaders = {0, 5};
    const WeightMatrix a_true = presets::leader_follower_matrix(n, leaders, seed);
    const BasisSpec basis = presets::leader_follower_basis();
    const VectorXd coef = presets::leader_follower_coef();
    const LeadershipConfig cfg;
    const LeaderGroups truth =
        classify_leaders_followers(a_true, cfg, std::nullopt, seed);

    std::vector<LeaderFollowerRun> out;
    for (int m_train : m_grid) {
        SystemSpec spec = presets::leader_follower_spec(n, mix64(seed) ^ mix64(m_train));
        TrajectoryData data = simulate(spec, a_true, basis, KernelCoef{coef}, m_train);
        data = add_observation_noise(data, 1e-3, spec.seed ^ 0x99);
        const FitResult fit = als_fit(data, basis);
        LeaderFollowerRun run;
        run.m_train = m_train;
        run.graph_err = graph_error(a_true, fit.a_hat);
        try {
            const LeaderGroups est =
                classify_leaders_followers(fit.a_hat, cfg, std::nullopt, seed);
            run.leaders_exact = est.leaders == truth.leaders;
            run.groups_exact = est.groups == truth.groups;
        } catch (const NoLeaders&) {
            run.leaders_exact = false;
            run.groups_exact = false;
        }
        out.push_back(run);
    }
    return out;
}

std::vector<MultitypeSelectRun> study_multitype_select(int runs, std::uint64_t seed) {
    std::vector<MultitypeSelectRun> out;
    const int n = 10;
    const BasisSpec basis = presets::multitype_basis();
    for (int q_true = 1; q_true <= 2; ++q_true) {
        const MatrixXd cmat = presets::multitype_cmat(n, q_true);
        for (int run = 0; run < runs; ++run) {
            const std::uint64_t run_seed = mix64(seed) ^ mix64(q_true * 1000 + run);
            SystemSpec train_spec = presets::multitype_spec(n, run_seed);
            // dense random weights, row-normalized
            WeightMatrix a_true = [&] {
                CounterRng rng(run_seed ^ 0x77ull);
                MatrixXd raw(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) raw(i, j) = rng.uniform(i, j);
                return WeightMatrix::normalized(std::move(raw));
            }();
            TrajectoryData train = simulate_multitype(train_spec, a_true, basis, cmat, 400);
            train = add_observation_noise(train, 1e-3, run_seed ^ 0x88);

            SystemSpec test_spec = train_spec;
            test_spec.seed = run_seed ^ 0xabcd;
            test_spec.dt = 1e-2;
            test_spec.n_steps = 200;
            const TrajectoryData test = simulate_multitype(test_spec, a_true, basis, cmat, 10);

            ThreefoldOptions opts;
            opts.seed = run_seed;
            const ModelSelectResult sel =
                model_select(train, test, basis, {1, 2}, test_spec.dt, test_spec.n_steps, opts);
            MultitypeSelectRun rec;
            rec.q_true = q_true;
            rec.q_star = sel.best;
            for (const auto& e : sel.table) {
                if (e.n_types == 1) rec.err_q1 = e.traj_error;
                if (e.n_types == 2) rec.err_q2 = e.traj_error;
            }
            out.push_back(rec);
        }
    }
    return out;
}

}  // namespace experiments
}  // namespace netkernel
