#include "netkernel/presets.hpp"

#include <cmath>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {
namespace presets {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BasisSpec lj_basis(bool full, int dim) {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = dim;
    if (full) {
        for (int k = 0; k < 3; ++k)
            b.functions.push_back(BasisFunction::power_law(-9.0, 0.25 * k + 0.5, kInf));
        for (int k = 0; k < 3; ++k)
            b.functions.push_back(BasisFunction::power_law(-3.0, 0.25 * k + 0.5, kInf));
        for (int k = 0; k < 4; ++k)
            b.functions.push_back(BasisFunction::indicator(0.0, 0.25 * k + 0.5));
    } else {
        b.functions.push_back(BasisFunction::power_law(-9.0, 0.5, kInf));
        b.functions.push_back(BasisFunction::power_law(-3.0, 0.5, kInf));
        b.functions.push_back(BasisFunction::indicator(0.0, 0.5));
    }
    return b;
}

VectorXd lj_coef(bool full) {
    VectorXd c = VectorXd::Zero(full ? 10 : 3);
    if (full) {
        c(0) = -1.0 / 3.0;
        c(3) = 4.0 / 3.0;
        c(6) = -160.0;
    } else {
        c(0) = -1.0 / 3.0;
        c(1) = 4.0 / 3.0;
        c(2) = -160.0;
    }
    return c;
}

SystemSpec lj_spec(int n_agents, int n_steps, std::uint64_t seed) {
    SystemSpec s;
    s.n_agents = n_agents;
    s.dim = 2;
    s.sigma = 1e-3;
    s.dt = 1e-4;
    s.n_steps = n_steps;
    s.init = SystemSpec::Init::UniformBox;
    s.init_a = 0.0;
    s.init_b = 1.5;
    s.seed = seed;
    return s;
}

VecFn lj_true_kernel(int dim) {
    return [dim](const VectorXd& x) -> VectorXd {
        const double r = x.norm();
        if (r <= 1e-14) return VectorXd::Zero(dim);
        const double phi = r >= 0.5 ? -std::pow(r, -9.0) / 3.0 + 4.0 * std::pow(r, -3.0) / 3.0
                                    : -160.0;
        return (phi / r) * x;
    };
}

BasisSpec kuramoto_basis(bool include_truth) {
    BasisSpec b;
    b.kind = BasisSpec::Kind::DirectScalar;
    b.dim = 1;
    b.functions.push_back(BasisFunction::cos_fn(1));
    for (int k = 2; k <= 7; ++k) {
        b.functions.push_back(BasisFunction::sin_fn(k));
        b.functions.push_back(BasisFunction::cos_fn(k));
    }
    if (include_truth) b.functions.push_back(BasisFunction::sin_fn(1));
    return b;
}

SystemSpec kuramoto_spec(std::uint64_t seed) {
    SystemSpec s;
    s.n_agents = 10;
    s.dim = 1;
    s.sigma = 1e-4;
    s.dt = 1e-3;
    s.n_steps = 100;
    s.init = SystemSpec::Init::UniformBox;
    s.init_a = -2.0;
    s.init_b = 2.0;
    s.seed = seed;
    return s;
}

VecFn kuramoto_true_kernel() {
    return [](const VectorXd& x) -> VectorXd {
        VectorXd out(1);
        out(0) = std::sin(x(0));
        return out;
    };
}

BasisSpec fourier_radial_basis(int p, double r_max) {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = 1;
    const int grid_n = 2048;
    std::vector<double> grid(grid_n), values(grid_n);
    for (int k = 1; k <= p; ++k) {
        for (int g = 0; g < grid_n; ++g) {
            const double r = r_max * g / (grid_n - 1.0);
            grid[g] = r;
            values[g] = std::sin(2.0 * M_PI * k * r) / (r + 0.1);
        }
        b.functions.push_back(BasisFunction::tabulated(grid, values));
    }
    return b;
}

VectorXd fourier_radial_coef(int p, std::uint64_t seed) {
    CounterRng rng(mix64(seed) ^ 0x666f7572ull);
    VectorXd c(p);
    for (int k = 0; k < p; ++k) c(k) = rng.normal(k) / (k + 1.0);
    return c;
}

WeightMatrix leader_follower_matrix(int n_agents, const std::vector<int>& leaders,
                                    std::uint64_t seed) {
    if (leaders.empty()) throw ConfigError("need at least one leader");
    CounterRng rng(mix64(seed) ^ 0x6c656164ull);
    std::vector<int> hub_of(n_agents, -1);
    for (std::size_t k = 0; k < leaders.size(); ++k) hub_of[leaders[k]] = static_cast<int>(k);

    // followers split round-robin between the hubs
    std::vector<int> follower_hub(n_agents, -1);
    int next = 0;
    for (int j = 0; j < n_agents; ++j) {
        if (hub_of[j] >= 0) continue;
        follower_hub[j] = static_cast<int>(next % leaders.size());
        ++next;
    }

    MatrixXd a = MatrixXd::Zero(n_agents, n_agents);
    // hub rows are dense over the members of their group
    for (int j = 0; j < n_agents; ++j) {
        if (follower_hub[j] < 0) continue;
        const int hub = leaders[follower_hub[j]];
        a(hub, j) = rng.uniform_in(0.5, 1.0, hub, j);
        a(j, hub) = 1.0;  // each follower has a single edge, to its hub
    }
    return WeightMatrix::normalized(std::move(a));
}

BasisSpec leader_follower_basis() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = 1;
    b.functions.push_back(BasisFunction::indicator(0.0, 1.0));
    b.functions.push_back(BasisFunction::indicator(1.0, 1.5));
    return b;
}

VectorXd leader_follower_coef() {
    VectorXd c(2);
    c(0) = -1.0;
    c(1) = -0.1;
    return c;
}

SystemSpec leader_follower_spec(int n_agents, std::uint64_t seed) {
    SystemSpec s;
    s.n_agents = n_agents;
    s.dim = 1;
    s.sigma = 1e-3;
    s.dt = 2e-3;
    s.n_steps = 50;
    s.init = SystemSpec::Init::UniformBox;
    s.init_a = 0.0;
    s.init_b = 2.0;
    s.seed = seed;
    return s;
}

BasisSpec multitype_basis() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = 1;
    // piecewise-linear bumps covering [0, 5]
    auto bump = [](std::vector<double> k, std::vector<double> v) {
        return BasisFunction::tabulated(std::move(k), std::move(v));
    };
    b.functions.push_back(bump({0.0, 0.8, 1.6}, {0.0, 1.0, 0.0}));
    b.functions.push_back(bump({0.8, 1.8, 2.8}, {0.0, 1.0, 0.0}));
    b.functions.push_back(bump({1.8, 2.8, 3.8}, {0.0, 1.0, 0.0}));
    b.functions.push_back(bump({2.8, 4.0, 5.2}, {0.0, 1.0, 0.0}));
    return b;
}

std::vector<int> multitype_labels(int n_agents, int n_types) {
    std::vector<int> kappa(n_agents);
    for (int i = 0; i < n_agents; ++i) kappa[i] = n_types == 1 ? 0 : (i < n_agents / 2 ? 0 : 1);
    return kappa;
}

MatrixXd multitype_cmat(int n_agents, int n_types) {
    const int p = 4;
    MatrixXd types(p, 2);
    types.col(0) << 1.2, 0.3, 0.0, 0.0;  // short range
    types.col(1) << 0.0, 0.2, 0.8, 1.0;  // long range
    const std::vector<int> kappa = multitype_labels(n_agents, n_types);
    MatrixXd cmat(p, n_agents);
    for (int i = 0; i < n_agents; ++i) cmat.col(i) = types.col(kappa[i]);
    return cmat;
}

SystemSpec multitype_spec(int n_agents, std::uint64_t seed) {
    SystemSpec s;
    s.n_agents = n_agents;
    s.dim = 1;
    s.sigma = 1e-3;
    s.dt = 1e-3;
    s.n_steps = 50;
    s.init = SystemSpec::Init::UniformBox;
    s.init_a = 0.0;
    s.init_b = 5.0;
    s.seed = seed;
    return s;
}

BasisSpec fourier_pair_basis() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::DirectScalar;
    b.dim = 1;
    b.functions.push_back(BasisFunction::sin_fn(1));
    b.functions.push_back(BasisFunction::cos_fn(1));
    return b;
}

BasisSpec hermite_pair_basis() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::DirectScalar;
    b.dim = 1;
    const int grid_n = 4801;
    std::vector<double> grid(grid_n), h4(grid_n), h5(grid_n);
    for (int g = 0; g < grid_n; ++g) {
        const double x = -12.0 + 24.0 * g / (grid_n - 1.0);
        grid[g] = x;
        h4[g] = x * x * x * x - 6.0 * x * x + 3.0;
        h5[g] = x * x * x * x * x - 10.0 * x * x * x + 15.0 * x;
    }
    b.functions.push_back(BasisFunction::tabulated(grid, h4));
    b.functions.push_back(BasisFunction::tabulated(grid, h5));
    return b;
}

BasisSpec lj_pair_basis() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::DirectScalar;
    b.dim = 1;
    b.functions.push_back(BasisFunction::power_law(-9.0, 0.75, kInf));
    b.functions.push_back(BasisFunction::power_law(-3.0, 0.25, kInf));
    return b;
}

BasisFunction random_radial_spline(std::uint64_t seed) {
    CounterRng rng(mix64(seed) ^ 0x73706c6eull);
    std::vector<double> knots = {0.0, 1.0, 2.0, 3.0, 4.5, 6.0};
    std::vector<double> values(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i)
        values[i] = rng.uniform_in(-1.0, 1.0, i);
    return BasisFunction::spline(std::move(knots), std::move(values));
}

}  // namespace presets
}  // namespace netkernel
