#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "netkernel/errors.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/presets.hpp"
#include "netkernel/rng.hpp"
#include "netkernel/simulate.hpp"

using namespace netkernel;

namespace {

BasisSpec identity_basis_1d() {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = 1;
    b.functions.push_back(
        BasisFunction::power_law(1.0, 0.0, std::numeric_limits<double>::infinity()));
    return b;
}

bool states_equal(const TrajectoryData& a, const TrajectoryData& b) {
    if (a.n_traj() != b.n_traj() || a.n_steps() != b.n_steps()) return false;
    for (int m = 0; m < a.n_traj(); ++m)
        for (std::size_t l = 0; l < a.states[m].size(); ++l)
            if (a.states[m][l] != b.states[m][l]) return false;
    return true;
}

}  // namespace

TEST_CASE("zero kernel and zero noise freeze the states") {
    SystemSpec spec = presets::lj_spec(4, 10, 3);
    spec.sigma = 0.0;
    const BasisSpec basis = presets::lj_basis(false, 2);
    const WeightMatrix a = sample_weight_matrix(4, 2, 4);
    const TrajectoryData data = simulate(spec, a, basis, KernelCoef{VectorXd::Zero(3)}, 3);
    for (int m = 0; m < 3; ++m)
        for (int l = 1; l <= 10; ++l) CHECK(data.states[m][l] == data.states[m][0]);
}

TEST_CASE("deterministic two-agent linear system matches the scalar recursion") {
    SystemSpec spec;
    spec.n_agents = 2;
    spec.dim = 1;
    spec.sigma = 0.0;
    spec.dt = 0.05;
    spec.n_steps = 40;
    spec.init = SystemSpec::Init::UniformBox;
    spec.init_a = 0.0;
    spec.init_b = 1.0;
    spec.seed = 11;
    MatrixXd aw = MatrixXd::Zero(2, 2);
    aw(0, 1) = 1.0;
    aw(1, 0) = 1.0;
    const TrajectoryData data =
        simulate(spec, WeightMatrix{aw}, identity_basis_1d(), KernelCoef{VectorXd::Ones(1)}, 1);

    // scalar Euler oracle: x' += dt (y - x), y' += dt (x - y)
    double x = data.states[0][0](0, 0);
    double y = data.states[0][0](1, 0);
    for (int l = 1; l <= 40; ++l) {
        const double nx = x + spec.dt * (y - x);
        const double ny = y + spec.dt * (x - y);
        x = nx;
        y = ny;
        CHECK(std::abs(data.states[0][l](0, 0) - x) <= 1e-12);
        CHECK(std::abs(data.states[0][l](1, 0) - y) <= 1e-12);
    }
}

TEST_CASE("attractive pairwise forces shrink the typical distance") {
    SystemSpec spec = presets::lj_spec(6, 2000, 7);
    const BasisSpec basis = presets::lj_basis(true, 2);
    const KernelCoef coef{presets::lj_coef(true)};
    const WeightMatrix a = sample_weight_matrix(6, 2, 8);
    const TrajectoryData data = simulate(spec, a, basis, coef, 4);

    auto median_dist = [&](int l) {
        std::vector<double> d;
        for (int m = 0; m < data.n_traj(); ++m)
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j)
                    d.push_back((data.states[m][l].row(i) - data.states[m][l].row(j)).norm());
        std::sort(d.begin(), d.end());
        return d[d.size() / 2];
    };
    CHECK(median_dist(2000) < median_dist(0));
}

TEST_CASE("simulation is reproducible and independent of the thread count") {
    SystemSpec spec = presets::lj_spec(6, 20, 9);
    const BasisSpec basis = presets::lj_basis(false, 2);
    const KernelCoef coef{presets::lj_coef(false)};
    const WeightMatrix a = sample_weight_matrix(6, 2, 10);
    const int saved = num_threads();
    set_num_threads(1);
    const TrajectoryData d1 = simulate(spec, a, basis, coef, 40);
    set_num_threads(4);
    const TrajectoryData d2 = simulate(spec, a, basis, coef, 40);
    set_num_threads(saved);
    CHECK(states_equal(d1, d2));
}

TEST_CASE("small batches are prefixes of larger batches") {
    SystemSpec spec = presets::lj_spec(6, 10, 13);
    const BasisSpec basis = presets::lj_basis(false, 2);
    const KernelCoef coef{presets::lj_coef(false)};
    const WeightMatrix a = sample_weight_matrix(6, 2, 14);
    const TrajectoryData d10 = simulate(spec, a, basis, coef, 10);
    const TrajectoryData d100 = simulate(spec, a, basis, coef, 100);
    for (int m = 0; m < 10; ++m)
        for (std::size_t l = 0; l < d10.states[m].size(); ++l)
            CHECK(d10.states[m][l] == d100.states[m][l]);
}

TEST_CASE("blow-up is reported as a tagged error") {
    SystemSpec spec;
    spec.n_agents = 2;
    spec.dim = 1;
    spec.sigma = 0.0;
    spec.dt = 1.0;
    spec.n_steps = 50;
    spec.init = SystemSpec::Init::UniformBox;
    spec.init_a = 1.0;
    spec.init_b = 2.0;
    spec.seed = 15;
    BasisSpec cubic;
    cubic.kind = BasisSpec::Kind::RadialLift;
    cubic.dim = 1;
    cubic.functions.push_back(
        BasisFunction::power_law(3.0, 0.0, std::numeric_limits<double>::infinity()));
    MatrixXd aw = MatrixXd::Zero(2, 2);
    aw(0, 1) = 1.0;
    aw(1, 0) = 1.0;
    VectorXd c(1);
    c << -1e6;  // strong repulsion between the pair: distances explode
    CHECK_THROWS_AS(simulate(spec, WeightMatrix{aw}, cubic, KernelCoef{c}, 1), NonFiniteState);
}

TEST_CASE("observation noise with zero strength is the identity") {
    SystemSpec spec = presets::lj_spec(4, 5, 17);
    const BasisSpec basis = presets::lj_basis(false, 2);
    const WeightMatrix a = sample_weight_matrix(4, 2, 18);
    const TrajectoryData data = simulate(spec, a, basis, KernelCoef{presets::lj_coef(false)}, 3);
    const TrajectoryData noisy = add_observation_noise(data, 0.0, 123);
    CHECK(states_equal(data, noisy));
}

TEST_CASE("observation noise has the requested standard deviation") {
    SystemSpec spec;
    spec.n_agents = 10;
    spec.dim = 2;
    spec.sigma = 0.0;
    spec.dt = 1.0;
    spec.n_steps = 99;
    spec.seed = 19;
    const WeightMatrix a{MatrixXd::Zero(10, 10)};
    BasisSpec basis = presets::lj_basis(false, 2);
    const TrajectoryData data = simulate(spec, a, basis, KernelCoef{VectorXd::Zero(3)}, 500);
    const TrajectoryData noisy = add_observation_noise(data, 1.0, 77);

    // 500 * 100 * 10 * 2 = 1e6 samples
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    for (int m = 0; m < 500; ++m)
        for (int l = 0; l <= 99; ++l) {
            const MatrixXd diff = noisy.states[m][l] - data.states[m][l];
            sum += diff.sum();
            sum_sq += diff.squaredNorm();
            count += diff.size();
        }
    const double mean = sum / count;
    const double std_dev = std::sqrt(sum_sq / count - mean * mean);
    CHECK(std_dev >= 0.997);
    CHECK(std_dev <= 1.003);
}

TEST_CASE("observation noise is deterministic in the seed") {
    SystemSpec spec = presets::lj_spec(4, 5, 21);
    const BasisSpec basis = presets::lj_basis(false, 2);
    const WeightMatrix a = sample_weight_matrix(4, 2, 22);
    const TrajectoryData data = simulate(spec, a, basis, KernelCoef{presets::lj_coef(false)}, 3);
    const TrajectoryData n1 = add_observation_noise(data, 0.1, 5);
    const TrajectoryData n2 = add_observation_noise(data, 0.1, 5);
    CHECK(states_equal(n1, n2));
    const TrajectoryData n3 = add_observation_noise(data, 0.1, 6);
    CHECK_FALSE(states_equal(n1, n3));
}

TEST_CASE("pairwise differences are antisymmetric with a zero diagonal") {
    MatrixXd x(2, 1);
    x << 0.0, 3.0;
    const auto r = pairwise_diffs(x);
    CHECK(r[(0 * 2 + 1) * 1 + 0] == 3.0);
    CHECK(r[(1 * 2 + 0) * 1 + 0] == -3.0);
    CHECK(r[0] == 0.0);
    CHECK(r[3] == 0.0);
}

TEST_CASE("pairwise differences match a double loop") {
    CounterRng rng(23);
    MatrixXd x(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 2; ++k) x(i, k) = rng.normal(i, k);
    const auto r = pairwise_diffs(x);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(r[(i * 4 + j) * 2 + k] == x(j, k) - x(i, k));
}

TEST_CASE("trajectory files round-trip bit exactly") {
    SystemSpec spec = presets::lj_spec(5, 7, 29);
    const BasisSpec basis = presets::lj_basis(false, 2);
    const WeightMatrix a = sample_weight_matrix(5, 2, 30);
    TrajectoryData data = simulate(spec, a, basis, KernelCoef{presets::lj_coef(false)}, 6);
    data = add_observation_noise(data, 1e-3, 31);

    const std::string path = "/tmp/netkernel_test_traj.bin";
    save_trajectories(data, path);
    const TrajectoryData loaded = load_trajectories(path);
    CHECK(states_equal(data, loaded));
    CHECK(loaded.dt == data.dt);
    CHECK(loaded.sigma_obs == data.sigma_obs);
    CHECK(loaded.a_hash == data.a_hash);
    CHECK(loaded.c_hash == data.c_hash);
    CHECK(loaded.spec.seed == spec.seed);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("corrupt trajectory files are rejected") {
    const std::string path = "/tmp/netkernel_bad_traj.bin";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a trajectory", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_trajectories(path), DataError);
    std::remove(path.c_str());
}
