#pragma once

#include <optional>

#include "netkernel/diagnostics.hpp"

namespace netkernel {

// ||a_true - a_hat||_F / ||a_true||_F
double graph_error(const WeightMatrix& a_true, const WeightMatrix& a_hat);

// relative L2(rho) error of the fitted kernel; the true kernel may live
// outside span{psi_k}, so it is passed as a plain function
double kernel_error(const VecFn& true_kernel, const BasisSpec& basis, const VectorXd& c_hat,
                    const EmpiricalMeasure& measure);
double kernel_error(const BasisSpec& basis, const VectorXd& c_true, const VectorXd& c_hat,
                    const EmpiricalMeasure& measure);
// multitype variant: mean relative error over the per-agent kernel columns
double kernel_error_multitype(const BasisSpec& basis, const MatrixXd& cmat_true,
                              const MatrixXd& cmat_hat, const EmpiricalMeasure& measure);

// mean over trajectories of the relative discrete-L2(0,T) path error
double trajectory_error(const TrajectoryData& truth, const TrajectoryData& pred);

// C1 T^2 exp(2 C1 C2 T) (C2 ||a-a_hat||_F^2 + ||c-c_hat||^2) with
// C1 = 2 p C0^2 and C2 = ||c_hat||^2 + ||c||^2
double trajectory_bound(const WeightMatrix& a, const WeightMatrix& a_hat, const VectorXd& c,
                        const VectorXd& c_hat, double c0_bound, double t_final);

// sup over time of the mean squared Frobenius deviation between paths of the
// true and fitted systems driven by the same noise and initial conditions
double empirical_traj_deviation(const SystemSpec& spec, const WeightMatrix& a,
                                const KernelCoef& c, const WeightMatrix& a_hat,
                                const KernelCoef& c_hat, const BasisSpec& basis, int n_paths);

// max over measure samples of max_k (|psi_k| + |grad psi_k|), the gradient by
// central differences with h = 1e-5; feeds trajectory_bound's C0
double basis_c0_bound(const BasisSpec& basis, const EmpiricalMeasure& measure);

struct LeadershipConfig {
    double alpha = 0.8;
    double beta = 0.2;
    void validate() const;  // alpha + beta = 1, alpha > beta
};

// L_i = alpha ||a_{i.}||_1 + beta ||a_{.i}||_1
VectorXd leadership_features(const WeightMatrix& a, const LeadershipConfig& cfg);

struct LeaderGroups {
    std::vector<int> leaders;
    std::vector<std::vector<int>> groups;  // groups[k] includes its leader
};

enum class FollowerAssignOrder { GreedyGlobal, SequentialJ };

// Step 1: leaders from 2-means on the leadership features (or the hinted
// count of top-feature agents). Step 2: grow one group per leader by the
// cross-feature alpha sum_in |a_ij| + beta sum_in |a_ji|, globally greedy by
// default, with ties broken toward lowest j then lowest k.
LeaderGroups classify_leaders_followers(const WeightMatrix& a, const LeadershipConfig& cfg,
                                        std::optional<int> n_leaders_hint, std::uint64_t seed,
                                        FollowerAssignOrder order = FollowerAssignOrder::GreedyGlobal);

}  // namespace netkernel
