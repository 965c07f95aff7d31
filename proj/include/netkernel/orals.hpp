#pragma once

#include "netkernel/als.hpp"

namespace netkernel {

// Per-agent estimates of the rank-1 products Z_i = a_i' c' from the sensing
// regressions, with conditioning information.
struct ZEstimates {
    std::vector<MatrixXd> Z;   // (N-1) x p, row jj = a_ij * c'
    VectorXd residuals;        // RMS regression residual per agent
    VectorXd min_sv_sq_per_M;  // sigma_min^2(design) / M per agent
};

ZEstimates operator_regression(const TrajectoryData& data, const BasisSpec& basis,
                               const Regularizer& reg = Regularizer::min_norm());
ZEstimates operator_regression(const SensingStats& stats,
                               const Regularizer& reg = Regularizer::min_norm());

// Joint rank-1 factorization of the Z estimates: c0 from the top right
// singular vector of the stacked matrix (sign resolved by the nonnegativity
// of a), then n_iter rounds of the closed-form alternating updates.
std::pair<WeightMatrix, KernelCoef> deterministic_als(const ZEstimates& z, int n_iter = 2);

// Operator regression followed by the deterministic factorization.
FitResult orals_fit(const TrajectoryData& data, const BasisSpec& basis,
                    const Regularizer& reg = Regularizer::min_norm());
FitResult orals_fit(const SensingStats& stats,
                    const Regularizer& reg = Regularizer::min_norm());

// Empirical check of the large-sample law of the operator-regression error:
// runs `reps` independent datasets of size M, forms the sample covariance of
// sqrt(M) (z_hat - z), and compares it with sigma^2 dt / L * Abar^{-1}, where
// Abar is estimated once from a dataset of size 100 M.
struct NormalityReport {
    VectorXd discrepancy;  // relative Frobenius discrepancy per agent
    double max_discrepancy = 0.0;
    double mean_discrepancy = 0.0;
};

NormalityReport normality_harness(const SystemSpec& spec, const WeightMatrix& a_true,
                                  const KernelCoef& c_true, const BasisSpec& basis, int m_per_rep,
                                  int reps, std::uint64_t seed);

}  // namespace netkernel
