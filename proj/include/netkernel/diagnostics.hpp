#pragma once

#include <functional>
#include <utility>

#include "netkernel/tensors.hpp"

namespace netkernel {

// Weighted sample cloud of pairwise differences r_ij over (i != j, l < L, m),
// the empirical form of the exploration measure. Weights are uniform
// 1 / ((N-1) N L M).
struct EmpiricalMeasure {
    std::vector<VectorXd> samples;
    double weight() const { return samples.empty() ? 0.0 : 1.0 / samples.size(); }
};

EmpiricalMeasure exploration_measure(const TrajectoryData& data);

using VecFn = std::function<VectorXd(const VectorXd&)>;

// sqrt of the measure-weighted mean of |Phi(r)|^2
double l2rho_norm(const BasisSpec& basis, const VectorXd& coef, const EmpiricalMeasure& measure);
double l2rho_norm(const VecFn& kernel, const EmpiricalMeasure& measure);

struct MinSingvalReport {
    double min_sv_sq_per_m = 0.0;  // sigma_min^2(design) / M
    double cond = 0.0;             // sigma_max / sigma_min
};

MinSingvalReport min_singval_sq(const RegressionBlock& block);

// Monte-Carlo restricted-isometry ratios of a sensing family: R_l =
// (1/M) sum_m |u' A_m v|^2 over random unit pairs, normalized by
// C = (max + min) / 2, with delta = (max - min) / (max + min).
struct RipReport {
    std::vector<double> ratios;  // normalized to [0, 2]
    double C = 0.0;
    double delta = 0.0;
};

RipReport rip_scan(const std::vector<MatrixXd>& sensing, int n_probe, std::uint64_t seed);

// Loss surface of the rank-1 angle parameterization over [0, 2pi)^2 for
// 2 x 2 sensing matrices, with strict 8-neighbor (periodic) local minima.
struct LandscapeScan {
    int grid = 0;
    MatrixXd loss;  // loss(i, j) at theta1 = 2pi i / grid, theta2 = 2pi j / grid
    std::vector<std::pair<int, int>> local_minima;
    double max_loss = 0.0;
};

LandscapeScan landscape_scan(int theta_grid, const std::vector<MatrixXd>& sensing,
                             double theta1_true, double theta2_true);

// Monte-Carlo check of the Gaussian coercivity ratio
// E[phi(|r12|) phi(|r13|) cos(r12, r13)] / E[phi(|r12|)^2] against the
// dimension-dependent analytic bound.
struct CoercivityMc {
    double ratio = 0.0;
    double bound = 0.0;
};

CoercivityMc gaussian_coercivity_mc(int dim, const BasisFunction& radial_fn, long n_mc,
                                    std::uint64_t seed);

// iid N(0,1) sensing matrices, and interacting-particle sensing matrices
// built from one standard-Gaussian initial state per sample (agent-1 row,
// scalar states).
std::vector<MatrixXd> make_gaussian_sensing(int rows, int cols, int n_samples,
                                            std::uint64_t seed);
std::vector<MatrixXd> make_ips_sensing(const BasisSpec& basis, int n_agents, int n_samples,
                                       std::uint64_t seed);

// sup over measure samples of max_k |psi_k|; the basis-boundedness constant
double basis_sup_bound(const BasisSpec& basis, const EmpiricalMeasure& measure);

}  // namespace netkernel
