#pragma once

#include <string>

#include "netkernel/metrics.hpp"
#include "netkernel/multitype.hpp"
#include "netkernel/orals.hpp"
#include "netkernel/presets.hpp"

namespace netkernel {
namespace experiments {

// Plain numeric table with named columns; written as CSV with a schema tag.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const Table& table, const std::string& path);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);
// least-squares slope of log10(y) against log10(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// One dataset -> both estimators -> errors against the generating truth.
struct Trial {
    SystemSpec spec;             // data-generation parameters (seed included)
    WeightMatrix a_true;
    BasisSpec sim_basis;         // basis the data was generated with
    VectorXd sim_coef;
    BasisSpec fit_basis;         // hypothesis space handed to the estimators
    VecFn true_kernel;           // reference kernel for the error metric
    double sigma_obs = 0.0;
    int m_train = 100;
    int m_test_measure = 200;    // trajectories behind the error measure
    AlsOptions als;
    Regularizer orals_reg = Regularizer::min_norm();
    bool run_orals = true;
};

struct TrialResult {
    double als_graph = 0.0, als_kernel = 0.0;
    double orals_graph = 0.0, orals_kernel = 0.0;
    double als_ms = 0.0, orals_ms = 0.0;
    FitResult als_fit;
    FitResult orals_fit;
};

TrialResult run_trial(const Trial& trial);

// Convergence in sample size: for each M and run, a fresh seeded system is
// simulated and fit with both estimators. Columns: algo (0 ALS / 1 ORALS),
// M, run, graph_err, kernel_err, traj_err (nan, not simulated here), wall_ms.
struct ConvergenceConfig {
    std::vector<int> m_grid;
    int runs = 20;
    bool misspecified = false;  // 10-function basis + observation noise
    double sigma = 1e-2;
    double sigma_obs = 0.0;
    std::uint64_t seed = 1;
    int m_test_measure = 200;
};

struct ConvergenceResult {
    Table raw;        // per run
    Table quartiles;  // per (algo, M): q1 / median / q3 of both errors
    double slope_graph_als = 0.0, slope_kernel_als = 0.0;
    double slope_graph_orals = 0.0, slope_kernel_orals = 0.0;
};

ConvergenceResult study_convergence(const ConvergenceConfig& cfg);

// Error decay against the stochastic-force or observation-noise level.
struct NoiseConfig {
    bool sweep_sigma_obs = false;  // false: sweep sigma with sigma_obs = 0
    std::vector<double> levels;
    int runs = 10;
    int m_train = 500;
    std::uint64_t seed = 1;
};

struct NoiseResult {
    Table raw;
    double slope_graph_als = 0.0, slope_kernel_als = 0.0;
    double slope_graph_orals = 0.0, slope_kernel_orals = 0.0;
};

NoiseResult study_noise(const NoiseConfig& cfg);

// Regularizer comparison on a small-sample, rank-deficient configuration.
struct RegularizerStudyConfig {
    int runs = 10;
    int m_train = 64;
    int n_agents = 20;
    std::uint64_t seed = 1;
};

Table study_regularizers(const RegularizerStudyConfig& cfg);

// Wall time of assembly + solve for both estimators across an M grid.
struct BenchmarkConfig {
    std::vector<int> m_grid = {256, 1024, 4096};
    int n_agents = 16;
    int p = 8;
    int n_steps = 2;
    int reps = 3;  // repetitions per point, minimum taken
    std::uint64_t seed = 1;
};

struct BenchmarkResult {
    Table table;  // columns: M, als_ms, orals_ms
    double slope_als = 0.0, slope_orals = 0.0;
};

BenchmarkResult study_benchmark(const BenchmarkConfig& cfg);

// Restricted-isometry scans over the canonical sensing families.
struct RipStudyResult {
    RipReport gaussian, fourier, hermite, lj;
};

RipStudyResult study_rip(int n_samples, int n_probe, std::uint64_t seed);

// Landscape scans over seeded instances; a minimum is spurious when its loss
// exceeds 1e-3 times the grid maximum.
struct LandscapeStudyResult {
    std::vector<int> spurious_per_instance;
    int instances_with_spurious = 0;
    LandscapeScan last_scan;  // kept for CSV emission
};

LandscapeStudyResult study_landscape(const BasisSpec& pair_basis, int instances, int grid,
                                     int n_samples, std::uint64_t seed);

// Kuramoto estimation under the misspecified and extended hypothesis spaces.
struct KuramotoConfig {
    std::vector<int> m_grid = {8, 64, 512};
    int runs = 20;
    std::uint64_t seed = 1;
};

Table study_kuramoto(const KuramotoConfig& cfg);

// Leader-follower identification across sample sizes.
struct LeaderFollowerRun {
    int m_train = 0;
    double graph_err = 0.0;
    bool leaders_exact = false;
    bool groups_exact = false;
};

std::vector<LeaderFollowerRun> study_leader_follower(const std::vector<int>& m_grid,
                                                     std::uint64_t seed);

// Multitype model selection: repeats of the Q_true in {1,2} comparison.
struct MultitypeSelectRun {
    int q_true = 0;
    int q_star = 0;
    double err_q1 = 0.0, err_q2 = 0.0;
};

std::vector<MultitypeSelectRun> study_multitype_select(int runs, std::uint64_t seed);

}  // namespace experiments
}  // namespace netkernel
