#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netkernel/model.hpp"

namespace netkernel {

// Multi-trajectory observations: M trajectories, L+1 time slices each
// (including t0), N agents in d dimensions.
struct TrajectoryData {
    // states[m][l] is the N x d state at time t_l of trajectory m
    std::vector<std::vector<MatrixXd>> states;
    double dt = 0.0;
    SystemSpec spec;
    double sigma_obs = 0.0;
    std::uint64_t a_hash = 0;
    std::uint64_t c_hash = 0;

    int n_traj() const { return static_cast<int>(states.size()); }
    int n_steps() const { return states.empty() ? 0 : static_cast<int>(states[0].size()) - 1; }
    int n_agents() const { return spec.n_agents; }
    int dim() const { return spec.dim; }
    void validate() const;
};

// Euler-Maruyama synthesis. Trajectory m draws from counter streams keyed by
// (spec.seed, m, ...), so outputs are independent of M, threading, and batch
// order; simulate(M=10) equals the first 10 trajectories of simulate(M=100).
TrajectoryData simulate(const SystemSpec& spec, const WeightMatrix& a, const BasisSpec& basis,
                        const KernelCoef& coef, int n_traj);

// Same integrator with one kernel column per target agent (cmat is p x N).
TrajectoryData simulate_multitype(const SystemSpec& spec, const WeightMatrix& a,
                                  const BasisSpec& basis, const MatrixXd& cmat, int n_traj);

// Integration from caller-supplied initial states. The noise streams are the
// same as simulate() at equal (spec.seed, m), which is what ties predicted
// paths to reference paths driven by the same realization.
TrajectoryData simulate_with_ics(const SystemSpec& spec, const WeightMatrix& a,
                                 const BasisSpec& basis, const KernelCoef& coef,
                                 const std::vector<MatrixXd>& initial_states);
TrajectoryData simulate_multitype_with_ics(const SystemSpec& spec, const WeightMatrix& a,
                                           const BasisSpec& basis, const MatrixXd& cmat,
                                           const std::vector<MatrixXd>& initial_states);

// Adds iid N(0, sigma_obs^2) to every state entry; sigma_obs = 0 returns a
// bit-identical copy.
TrajectoryData add_observation_noise(const TrajectoryData& data, double sigma_obs,
                                     std::uint64_t seed);

// r(i,j) = X^j - X^i as an N x N array of d-vectors, flattened row-major:
// out[(i*N + j)*d + dim]
std::vector<double> pairwise_diffs(const MatrixXd& X);

// Binary trajectory format: 32-byte header {magic "IPSTRAJ1", u32 M, u32 L+1,
// u32 N, u32 d, f64 dt} followed by row-major little-endian f64 states, plus
// a JSON sidecar (path + ".json") carrying the SystemSpec and provenance.
// Round-trips are bit-exact.
void save_trajectories(const TrajectoryData& data, const std::string& path);
TrajectoryData load_trajectories(const std::string& path);

}  // namespace netkernel
