#include "netkernel/simulate.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "netkernel/errors.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

namespace {

constexpr std::uint64_t kInitTag = 0xffffffffffffffffull;
constexpr double kBlowupLimit = 1e12;

MatrixXd draw_initial(const SystemSpec& spec, const CounterRng& rng, std::uint64_t m) {
    MatrixXd x(spec.n_agents, spec.dim);
    for (int i = 0; i < spec.n_agents; ++i) {
        for (int k = 0; k < spec.dim; ++k) {
            if (spec.init == SystemSpec::Init::UniformBox)
                x(i, k) = rng.uniform_in(spec.init_a, spec.init_b, m, kInitTag, i, k);
            else
                x(i, k) = spec.init_a + spec.init_b * rng.normal(m, kInitTag, i, k);
        }
    }
    return x;
}

template <typename DriftFn>
TrajectoryData simulate_impl(const SystemSpec& spec, int n_traj, DriftFn drift_at,
                             std::uint64_t a_hash, std::uint64_t c_hash,
                             const std::vector<MatrixXd>* ics = nullptr) {
    spec.validate();
    if (n_traj < 1) throw ConfigError("need at least one trajectory");

    TrajectoryData data;
    data.dt = spec.dt;
    data.spec = spec;
    data.a_hash = a_hash;
    data.c_hash = c_hash;
    data.states.resize(n_traj);

    const CounterRng rng(spec.seed);
    const double root_dt = std::sqrt(spec.dt);

    parallel_blocks(n_traj, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            auto& traj = data.states[m];
            traj.reserve(spec.n_steps + 1);
            traj.push_back(ics ? (*ics)[m] : draw_initial(spec, rng, m));
            for (int l = 0; l < spec.n_steps; ++l) {
                MatrixXd next = traj.back() + spec.dt * drift_at(traj.back());
                if (spec.sigma > 0.0) {
                    for (int i = 0; i < spec.n_agents; ++i)
                        for (int k = 0; k < spec.dim; ++k)
                            next(i, k) += spec.sigma * root_dt * rng.normal(m, l, i, k);
                }
                if (next.cwiseAbs().maxCoeff() > kBlowupLimit)
                    throw NonFiniteState("trajectory " + std::to_string(m) +
                                         " blew up at step " + std::to_string(l));
                traj.push_back(std::move(next));
            }
        }
    });
    return data;
}

}  // namespace

void TrajectoryData::validate() const {
    if (states.empty()) throw DataError("no trajectories");
    const std::size_t slices = states[0].size();
    if (slices < 2) throw DataError("need at least two time slices");
    for (const auto& traj : states) {
        if (traj.size() != slices) throw DataError("ragged trajectory lengths");
        for (const auto& x : traj)
            if (!x.allFinite()) throw DataError("non-finite state entries");
    }
    if (dt <= 0.0) throw DataError("dt must be positive");
}

TrajectoryData simulate(const SystemSpec& spec, const WeightMatrix& a, const BasisSpec& basis,
                        const KernelCoef& coef, int n_traj) {
    basis.validate();
    if (a.size() != spec.n_agents) throw DimensionMismatch("weight matrix size != N");
    if (basis.dim != spec.dim) throw DimensionMismatch("basis dim != system dim");
    return simulate_impl(
        spec, n_traj, [&](const MatrixXd& x) { return drift(a, basis, coef, x); },
        matrix_hash(a.entries), matrix_hash(coef.c));
}

TrajectoryData simulate_multitype(const SystemSpec& spec, const WeightMatrix& a,
                                  const BasisSpec& basis, const MatrixXd& cmat, int n_traj) {
    basis.validate();
    if (a.size() != spec.n_agents) throw DimensionMismatch("weight matrix size != N");
    if (basis.dim != spec.dim) throw DimensionMismatch("basis dim != system dim");
    return simulate_impl(
        spec, n_traj, [&](const MatrixXd& x) { return drift_multitype(a, basis, cmat, x); },
        matrix_hash(a.entries), matrix_hash(cmat));
}

TrajectoryData simulate_with_ics(const SystemSpec& spec, const WeightMatrix& a,
                                 const BasisSpec& basis, const KernelCoef& coef,
                                 const std::vector<MatrixXd>& initial_states) {
    basis.validate();
    if (initial_states.empty()) throw ConfigError("need at least one initial state");
    return simulate_impl(
        spec, static_cast<int>(initial_states.size()),
        [&](const MatrixXd& x) { return drift(a, basis, coef, x); }, matrix_hash(a.entries),
        matrix_hash(coef.c), &initial_states);
}

TrajectoryData simulate_multitype_with_ics(const SystemSpec& spec, const WeightMatrix& a,
                                           const BasisSpec& basis, const MatrixXd& cmat,
                                           const std::vector<MatrixXd>& initial_states) {
    basis.validate();
    if (initial_states.empty()) throw ConfigError("need at least one initial state");
    return simulate_impl(
        spec, static_cast<int>(initial_states.size()),
        [&](const MatrixXd& x) { return drift_multitype(a, basis, cmat, x); },
        matrix_hash(a.entries), matrix_hash(cmat), &initial_states);
}

TrajectoryData add_observation_noise(const TrajectoryData& data, double sigma_obs,
                                     std::uint64_t seed) {
    if (sigma_obs < 0.0) throw ConfigError("sigma_obs must be >= 0");
    TrajectoryData out = data;
    out.sigma_obs = sigma_obs;
    if (sigma_obs == 0.0) return out;
    const CounterRng rng(mix64(seed) ^ 0x6f62736e6f697365ull);
    for (std::size_t m = 0; m < out.states.size(); ++m) {
        auto& traj = out.states[m];
        for (std::size_t l = 0; l < traj.size(); ++l)
            for (int i = 0; i < traj[l].rows(); ++i)
                for (int k = 0; k < traj[l].cols(); ++k)
                    traj[l](i, k) += sigma_obs * rng.normal(m, l, i, k);
    }
    return out;
}

std::vector<double> pairwise_diffs(const MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    std::vector<double> out(static_cast<std::size_t>(n) * n * d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < d; ++k)
                out[(static_cast<std::size_t>(i) * n + j) * d + k] = X(j, k) - X(i, k);
    return out;
}

namespace {

constexpr char kMagic[8] = {'I', 'P', 'S', 'T', 'R', 'A', 'J', '1'};

void put_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ofstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

// Sidecar JSON serialization lives in jsonio.cpp; these two only handle the
// binary payload and delegate the sidecar.
void save_trajectory_sidecar(const TrajectoryData& data, const std::string& path);
void load_trajectory_sidecar(TrajectoryData& data, const std::string& path);

void save_trajectories(const TrajectoryData& data, const std::string& path) {
    data.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os.write(kMagic, 8);
    put_u32(os, static_cast<std::uint32_t>(data.n_traj()));
    put_u32(os, static_cast<std::uint32_t>(data.n_steps() + 1));
    put_u32(os, static_cast<std::uint32_t>(data.n_agents()));
    put_u32(os, static_cast<std::uint32_t>(data.dim()));
    put_f64(os, data.dt);
    for (const auto& traj : data.states)
        for (const auto& x : traj)
            for (int i = 0; i < x.rows(); ++i)
                for (int k = 0; k < x.cols(); ++k) put_f64(os, x(i, k));
    if (!os) throw DataError("write failed for " + path);
    os.close();
    save_trajectory_sidecar(data, path + ".json");
}

TrajectoryData load_trajectories(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw DataError(path + " is not a trajectory file");
    const std::uint32_t m = get_u32(is);
    const std::uint32_t slices = get_u32(is);
    const std::uint32_t n = get_u32(is);
    const std::uint32_t d = get_u32(is);
    const double dt = get_f64(is);
    if (m == 0 || slices < 2 || n == 0 || d == 0) throw DataError("corrupt header in " + path);

    TrajectoryData data;
    data.dt = dt;
    data.spec.n_agents = static_cast<int>(n);
    data.spec.dim = static_cast<int>(d);
    data.spec.dt = dt;
    data.spec.n_steps = static_cast<int>(slices) - 1;
    data.states.assign(m, {});
    for (auto& traj : data.states) {
        traj.reserve(slices);
        for (std::uint32_t l = 0; l < slices; ++l) {
            MatrixXd x(n, d);
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t k = 0; k < d; ++k) x(i, k) = get_f64(is);
            traj.push_back(std::move(x));
        }
    }
    if (!is) throw DataError("truncated trajectory payload in " + path);
    load_trajectory_sidecar(data, path + ".json");
    return data;
}

}  // namespace netkernel
