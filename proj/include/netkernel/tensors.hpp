#pragma once

#include <string>
#include <vector>

#include "netkernel/linsolve.hpp"
#include "netkernel/model.hpp"
#include "netkernel/simulate.hpp"

namespace netkernel {

// psi_k(X^j - X^i) for all ordered pairs; the j == i slice is zero-filled and
// never consumed. values[((j*N + i)*d + dim)*p + k]
struct BasisTensor {
    int n = 0, d = 0, p = 0;
    std::vector<double> values;

    double at(int j, int i, int dim, int k) const {
        return values[(((static_cast<std::size_t>(j) * n + i) * d + dim)) * p + k];
    }
};

BasisTensor build_basis_tensor(const BasisSpec& basis, const MatrixXd& X);

// (X_{t_{l+1}} - X_{t_l}) / dt, indexed [m][l] as N x d
std::vector<std::vector<MatrixXd>> increments(const TrajectoryData& data);

// One least-squares subproblem, as an explicit design/response pair, its
// normal-equation form, or both. normal_mat = design'design / rows and
// normal_vec = design'response / rows whenever both representations exist.
struct RegressionBlock {
    MatrixXd design;
    VectorXd response;
    bool has_normal = false;
    MatrixXd normal_mat;
    VectorXd normal_vec;
    double response_sq = 0.0;  // sum response^2 (kept in normal-only form)
    long rows = 0;
    int samples_m = 0;  // trajectory count M behind the block
    std::string row_index_map;
};

struct AssemblyOptions {
    enum class Path { Auto, LongMatrix, Normal, Both };
    Path path = Path::Auto;
};

// Graph-row regression for agent i at fixed kernel coefficients: design
// column jj (j skipping i, ascending) stacks Phi_c(X^j - X^i) over rows
// (m outer, l middle, dim inner); response stacks (dX/dt)_i the same way.
RegressionBlock assemble_graph_block(int i, const TrajectoryData& data, const BasisSpec& basis,
                                     const KernelCoef& coef, AssemblyOptions opt = {});

// Kernel regression at fixed weights: row (m, l, i, dim) has entries
// sum_{j != i} a_ij psi_k(r_ij)[dim].
RegressionBlock assemble_kernel_block(const TrajectoryData& data, const BasisSpec& basis,
                                      const WeightMatrix& a, AssemblyOptions opt = {});

// Sensing regression for agent i over the vectorized product z_i = vec(a_i c'):
// column (jj*p + k), i.e. j-major / k-minor with j skipping i.
RegressionBlock assemble_sensing_block(int i, const TrajectoryData& data,
                                       const BasisSpec& basis, AssemblyOptions opt = {});

struct BpsiMatrix {
    MatrixXd B;  // p x p, symmetric PSD
};

// B[k,l] = average over (m, t, i != j) of <psi_k(r_ij), psi_l(r_ij)> with the
// 1/((N-1) N L M) normalization.
BpsiMatrix bpsi_matrix(const TrajectoryData& data, const BasisSpec& basis);

// Unnormalized per-agent sensing sufficient statistics shared by the
// estimators: G = design'design, h = design'response, s = ||response||^2.
// Everything ALS, ORALS, and the three-fold solver need contracts from these.
struct SensingNormal {
    MatrixXd G;
    VectorXd h;
    double s = 0.0;
};

struct SensingStats {
    std::vector<SensingNormal> per_agent;
    int n = 0, d = 0, p = 0, L = 0, M = 0;
    double dt = 0.0;
    long rows_per_agent() const { return static_cast<long>(d) * L * M; }
};

SensingStats assemble_sensing_stats(const TrajectoryData& data, const BasisSpec& basis);

// Contractions of the sensing statistics onto the ALS subproblems.
// Graph row-i normal system at fixed c: Gram[jj,jj'] = c' G_blk(jj,jj') c.
void graph_normal_from_sensing(const SensingNormal& sn, const VectorXd& c, MatrixXd& gram,
                               VectorXd& cross);
// Kernel normal contribution of agent i at fixed row a_i (length N-1):
// gram[k,k'] += sum_{jj,jj'} a_jj a_jj' G[(jj,k),(jj',k')], likewise cross.
void add_kernel_normal_from_sensing(const SensingNormal& sn, const VectorXd& a_row,
                                    MatrixXd& gram, VectorXd& cross);

// Streaming counterparts used when (N-1)*p is too large for the shared
// statistics; one pass over the data per call.
struct GraphNormalSet {
    std::vector<MatrixXd> gram;   // per i, (N-1) x (N-1)
    std::vector<VectorXd> cross;  // per i, (N-1)
    std::vector<double> s;        // per i, sum response^2
};

GraphNormalSet stream_graph_normals(const TrajectoryData& data, const BasisSpec& basis,
                                    const VectorXd& c);
void stream_kernel_normal(const TrajectoryData& data, const BasisSpec& basis,
                          const WeightMatrix& a, MatrixXd& gram, VectorXd& cross, double& s);

// Heuristic switch between the shared-statistics path and streaming path.
bool sensing_stats_affordable(int n, int p);

}  // namespace netkernel
