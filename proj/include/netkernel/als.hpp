#pragma once

#include <optional>

#include "netkernel/tensors.hpp"

namespace netkernel {

struct AlsOptions {
    double tol = 1e-6;
    int max_iter = 10;
    Regularizer reg;  // kernel-step regularizer
    std::uint64_t c0_seed = 0;
    std::optional<VectorXd> c0;

    // Auto keeps one shared set of sensing statistics when (N-1)p is small
    // and re-streams the data each iteration otherwise.
    enum class Assembly { Auto, SharedStats, Streaming };
    Assembly assembly = Assembly::Auto;
};

struct IterationRecord {
    int iter = 0;
    double rel_change_a = 0.0;
    double rel_change_c = 0.0;
    double loss = 0.0;
};

struct FitResult {
    WeightMatrix a_hat;
    KernelCoef c_hat;
    std::vector<IterationRecord> history;
    bool converged = false;
};

// Alternating estimation of (a, c): per-row nonnegative least squares with
// row normalization, then a regularized least-squares kernel update, until
// both relative changes drop below tol or max_iter is reached.
FitResult als_fit(const TrajectoryData& data, const BasisSpec& basis, const AlsOptions& opts = {});

// Shared-statistics variant when the caller already assembled them.
FitResult als_fit(const SensingStats& stats, const AlsOptions& opts);

// Empirical loss (1/(M T)) sum_{l,m} ||dX - a B(X) c dt||_F^2 with T = L dt,
// evaluated by direct streaming; independent of the fit assembly paths.
double loss(const TrajectoryData& data, const BasisSpec& basis, const WeightMatrix& a,
            const KernelCoef& coef);

// Same loss from sensing statistics. z rows follow the j-major ordering.
double loss_from_stats(const SensingStats& stats, const WeightMatrix& a, const VectorXd& c);

// Unit Gaussian start vector for the kernel coefficients.
VectorXd default_c0(int p, std::uint64_t seed);

}  // namespace netkernel
