#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace netkernel {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Row-l2-normalized nonnegative weight matrix with zero diagonal. Rows that
// came out identically zero from an estimator are kept and flagged instead of
// being rejected.
struct WeightMatrix {
    MatrixXd entries;

    int size() const { return static_cast<int>(entries.rows()); }
    std::vector<bool> zero_rows() const;
    // throws DataError when the admissible-set invariants are violated
    void validate() const;

    // scales each row to unit l2 norm; zero rows are left untouched
    static WeightMatrix normalized(MatrixXd raw);
};

// Each row gets `degree` off-diagonal neighbors chosen uniformly without
// replacement; nonzero values are iid Uniform[0,1] before row normalization.
WeightMatrix sample_weight_matrix(int n, int degree, std::uint64_t seed);

// One scalar basis function of the interaction kernel.
struct BasisFunction {
    enum class Kind { PowerLaw, Indicator, Sin, Cos, Spline, Tabulated };

    Kind kind = Kind::Indicator;
    double exponent = 0.0;                 // PowerLaw
    double support_lo = 0.0;               // PowerLaw / Indicator, half-open [lo, hi)
    double support_hi = std::numeric_limits<double>::infinity();
    int frequency = 1;                     // Sin / Cos
    std::vector<double> knots;             // Spline / Tabulated abscissae (increasing)
    std::vector<double> coefs;             // values at the knots

    double operator()(double r) const;

    static BasisFunction power_law(double exponent, double lo, double hi);
    static BasisFunction indicator(double lo, double hi);
    static BasisFunction sin_fn(int frequency);
    static BasisFunction cos_fn(int frequency);
    static BasisFunction spline(std::vector<double> knots, std::vector<double> coefs);
    static BasisFunction tabulated(std::vector<double> grid, std::vector<double> values);
};

// Hypothesis space {psi_k}: either radial functions lifted to R^d along x/|x|,
// or scalar functions applied directly to a 1-d state difference.
struct BasisSpec {
    enum class Kind { RadialLift, DirectScalar };

    Kind kind = Kind::RadialLift;
    int dim = 1;
    double singular_cutoff = 1e-14;  // RadialLift returns 0 at or below this radius
    std::vector<BasisFunction> functions;

    int p() const { return static_cast<int>(functions.size()); }
    void validate() const;

    // value of psi_k at the state difference x (length dim)
    VectorXd eval(int k, const VectorXd& x) const;
    // values of all p functions at x, column k = psi_k(x), shape dim x p
    MatrixXd eval_all(const VectorXd& x) const;
    // scalar radial values psi~_k(r) for all k (RadialLift path)
    void eval_radial(double r, double* out) const;
};

struct KernelCoef {
    VectorXd c;
};

// Phi(x) = sum_k c_k psi_k(x)
VectorXd eval_kernel(const BasisSpec& basis, const KernelCoef& coef, const VectorXd& x);

// Initial-condition law and integrator parameters of the particle system.
struct SystemSpec {
    enum class Init { UniformBox, Gaussian };

    int n_agents = 2;
    int dim = 1;
    double sigma = 0.0;  // stochastic-force level
    double dt = 1e-3;
    int n_steps = 1;  // L
    Init init = Init::UniformBox;
    double init_a = 0.0;  // UniformBox lower bound, or Gaussian mean
    double init_b = 1.0;  // UniformBox upper bound, or Gaussian std
    std::uint64_t seed = 0;

    void validate() const;
};

// row i = sum_{j != i} a_ij Phi(X^j - X^i); X is N x d, result N x d
MatrixXd drift(const WeightMatrix& a, const BasisSpec& basis, const KernelCoef& coef,
               const MatrixXd& X);

// Multitype variant: column i of cmat (p x N) holds the coefficients of the
// kernel acting on agent i.
MatrixXd drift_multitype(const WeightMatrix& a, const BasisSpec& basis, const MatrixXd& cmat,
                         const MatrixXd& X);

// FNV-1a over raw matrix bytes; used for data provenance tags
std::uint64_t matrix_hash(const MatrixXd& m);

}  // namespace netkernel
