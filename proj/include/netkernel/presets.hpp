#pragma once

#include "netkernel/diagnostics.hpp"

namespace netkernel {
namespace presets {

// ---- truncated Lennard-Jones system ----------------------------------------
// Radial kernel -x^{-9}/3 + 4 x^{-3}/3 above the cutoff, constant -160 below,
// expressed on truncated power-law / indicator bases.

// the full misspecified 10-function basis, or the well-specified 3-function
// sub-basis {x^-9 above 0.5, x^-3 above 0.5, 1 below 0.5}
BasisSpec lj_basis(bool full, int dim = 2);
VectorXd lj_coef(bool full);
SystemSpec lj_spec(int n_agents = 6, int n_steps = 50, std::uint64_t seed = 1);
VecFn lj_true_kernel(int dim = 2);

// ---- coupled-oscillator system ---------------------------------------------
// Scalar phase states, true kernel sin(x).

// hypothesis space {cos x, sin 2x, cos 2x, ..., sin 7x, cos 7x}; with
// include_truth it is extended by sin(x) as the last element
BasisSpec kuramoto_basis(bool include_truth);
SystemSpec kuramoto_spec(std::uint64_t seed = 1);
VecFn kuramoto_true_kernel();

// ---- random Fourier radial kernel ------------------------------------------
// psi_k(r) = sin(2 pi k r) / (r + 0.1) tabulated on [0, r_max]; the true
// coefficients are w_k / k with w_k iid standard normal.
BasisSpec fourier_radial_basis(int p, double r_max = 4.0);
VectorXd fourier_radial_coef(int p, std::uint64_t seed);

// ---- leader-follower network -----------------------------------------------
// Two hub agents with dense rows; every follower row has a single edge to its
// hub. Scalar states, short-range repulsive indicator kernel.
WeightMatrix leader_follower_matrix(int n_agents, const std::vector<int>& leaders,
                                    std::uint64_t seed);
BasisSpec leader_follower_basis();
VectorXd leader_follower_coef();
SystemSpec leader_follower_spec(int n_agents = 20, std::uint64_t seed = 1);

// ---- multitype spline kernels ----------------------------------------------
// Piecewise-linear bump basis on [0, 5]; type 1 is short range, type 2 long
// range. kappa(i) = 1 for the first half of the agents, 2 for the rest.
BasisSpec multitype_basis();
MatrixXd multitype_cmat(int n_agents, int n_types);  // p x N
std::vector<int> multitype_labels(int n_agents, int n_types);
SystemSpec multitype_spec(int n_agents = 10, std::uint64_t seed = 1);

// ---- sensing bases for isometry scans --------------------------------------
BasisSpec fourier_pair_basis();   // {sin x, cos x}
BasisSpec hermite_pair_basis();   // {x^4 - 6x^2 + 3, x^5 - 10x^3 + 15x}, tabulated
BasisSpec lj_pair_basis();        // {x^-9 above 0.75, x^-3 above 0.25}

// random radial spline on [0, 6] for the coercivity Monte-Carlo checks
BasisFunction random_radial_spline(std::uint64_t seed);

}  // namespace presets
}  // namespace netkernel
