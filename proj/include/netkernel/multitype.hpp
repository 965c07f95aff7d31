#pragma once

#include "netkernel/als.hpp"

namespace netkernel {

struct ThreefoldOptions {
    double tol = 1e-6;
    int max_iter = 50;
    bool use_kmeans = true;
    // open variant: k-means only assigns type labels, rows of v are kept
    bool kmeans_labels_only = false;
    std::uint64_t seed = 0;
    Regularizer reg = Regularizer::min_norm();  // u- and v-step solver
};

struct ThreefoldRecord {
    int iter = 0;
    double rel_change_a = 0.0;
    double rel_change_u = 0.0;
    double rel_change_v = 0.0;
    double loss = 0.0;
};

// Factors of the multitype system dX = a B(X) u v' dt + sigma dW with v
// column-orthonormal. Columns are reported ordered by descending ||u col||
// with the largest-magnitude entry of each v column positive.
struct MultitypeFactors {
    WeightMatrix a;
    MatrixXd u;     // p x Q
    MatrixXd v;     // N x Q, v'v = I_Q
    MatrixXd cmat;  // p x N = u v'
    std::vector<int> labels;  // k-means type assignments (empty when disabled)
    std::vector<ThreefoldRecord> history;
    bool converged = false;
};

MultitypeFactors threefold_fit(const TrajectoryData& data, const BasisSpec& basis, int n_types,
                               const ThreefoldOptions& opts = {});
MultitypeFactors threefold_fit(const SensingStats& stats, const BasisSpec& basis, int n_types,
                               const ThreefoldOptions& opts = {});

// Joint loss of the factored model, from the sensing statistics.
double loss_from_stats_multitype(const SensingStats& stats, const WeightMatrix& a,
                                 const MatrixXd& cmat);

struct ModelSelectEntry {
    int n_types = 0;
    double traj_error = 0.0;
};

struct ModelSelectResult {
    int best = 0;
    std::vector<ModelSelectEntry> table;
};

// Fits every candidate Q on the training data, re-simulates the test initial
// conditions under each fitted model with the test data's noise realization,
// and picks the smallest Q within 5% of the minimal mean trajectory error.
ModelSelectResult model_select(const TrajectoryData& data_train, const TrajectoryData& data_test,
                               const BasisSpec& basis, const std::vector<int>& q_candidates,
                               double horizon_dt, int horizon_steps,
                               const ThreefoldOptions& opts = {});

}  // namespace netkernel
