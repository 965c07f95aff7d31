#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace netkernel {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Regularized least-squares policy shared by the estimators.
struct Regularizer {
    enum class Mode { None, PseudoInverse, MinNorm, TikhonovId, TikhonovGeneralized };

    Mode mode = Mode::None;
    double rcond = 1e-12;            // PseudoInverse truncation, relative to sigma_max
    double lambda = 0.0;             // Tikhonov strength; >= 0
    bool auto_lambda = false;        // pick lambda by L-curve corner when true
    std::optional<MatrixXd> penalty; // symmetric PSD matrix for TikhonovGeneralized

    static Regularizer none() { return {}; }
    static Regularizer pseudo_inverse(double rcond = 1e-12) {
        Regularizer r;
        r.mode = Mode::PseudoInverse;
        r.rcond = rcond;
        return r;
    }
    static Regularizer min_norm() {
        Regularizer r;
        r.mode = Mode::MinNorm;
        return r;
    }
    static Regularizer tikhonov_id(double lambda) {
        Regularizer r;
        r.mode = Mode::TikhonovId;
        r.lambda = lambda;
        return r;
    }
    static Regularizer tikhonov(double lambda, MatrixXd penalty) {
        Regularizer r;
        r.mode = Mode::TikhonovGeneralized;
        r.lambda = lambda;
        r.penalty = std::move(penalty);
        return r;
    }

    // throws ConfigError on a negative lambda or a non-symmetric / indefinite penalty
    void validate(int n_cols) const;
};

// argmin ||Ax-b||^2 (+ lambda x'Px for the Tikhonov modes). MinNorm returns
// the minimum-l2-norm minimizer; None throws SingularSystem when rank(A) < n.
VectorXd solve_ls(const MatrixXd& A, const VectorXd& b, const Regularizer& reg = {});

// Same solve given the normal equations G = A'A, h = A'b. `scale` should be
// a representative magnitude of G (defaults to its largest diagonal entry)
// used for rank decisions.
VectorXd solve_ls_normal(const MatrixXd& G, const VectorXd& h, const Regularizer& reg = {},
                         double scale = -1.0);

// L-curve corner scan for Tikhonov lambda: 20-point log grid on
// [1e-12, 1] * ||G||, maximum-curvature corner of (log residual, log penalty).
// `s` is ||b||^2 so the residual can be evaluated from normal data.
double lcurve_select(const MatrixXd& G, const VectorXd& h, double s,
                     const MatrixXd* penalty = nullptr);

// Lawson-Hanson nonnegative least squares. Outer iterations capped at 3n;
// dual feasibility tolerance 1e-10 relative to ||A'b||_inf.
VectorXd nnls(const MatrixXd& A, const VectorXd& b);
VectorXd nnls_normal(const MatrixXd& G, const VectorXd& h);

struct Rank1Factor {
    VectorXd u;
    double sigma = 0.0;
    VectorXd v;
};

// Top singular triple of Z with a deterministic sign: the largest-magnitude
// entry of v is positive (ties broken toward the lowest index).
Rank1Factor rank1_factor(const MatrixXd& Z);

// Frobenius-nearest column-orthonormal matrix: UW' from the SVD V = U S W'.
// Throws RankDeficient when sigma_min < 1e-12 * sigma_max.
MatrixXd procrustes_orthonormalize(const MatrixXd& V);

struct KmeansResult {
    std::vector<int> labels;
    std::vector<VectorXd> centroids;
    double wcss = 0.0;
};

// Lloyd's algorithm with k-means++ seeding, best of 10 restarts by WCSS,
// deterministic given seed. Empty clusters are re-seeded at the farthest point.
KmeansResult kmeans(const std::vector<VectorXd>& points, int k, std::uint64_t seed);

}  // namespace netkernel
