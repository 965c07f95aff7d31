#include "netkernel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

double graph_error(const WeightMatrix& a_true, const WeightMatrix& a_hat) {
    if (a_true.entries.rows() != a_hat.entries.rows())
        throw ShapeMismatch("weight matrices differ in size");
    const double denom = a_true.entries.norm();
    if (denom == 0.0) throw ZeroTrueKernel("true weight matrix is zero");
    return (a_true.entries - a_hat.entries).norm() / denom;
}

double kernel_error(const VecFn& true_kernel, const BasisSpec& basis, const VectorXd& c_hat,
                    const EmpiricalMeasure& measure) {
    if (measure.samples.empty()) throw EmptyMeasure("exploration measure has no samples");
    const KernelCoef kc{c_hat};
    double num = 0.0, den = 0.0;
    for (const auto& r : measure.samples) {
        const VectorXd t = true_kernel(r);
        den += t.squaredNorm();
        num += (t - eval_kernel(basis, kc, r)).squaredNorm();
    }
    if (den == 0.0) throw ZeroTrueKernel("true kernel vanishes on the measure");
    return std::sqrt(num / den);
}

double kernel_error(const BasisSpec& basis, const VectorXd& c_true, const VectorXd& c_hat,
                    const EmpiricalMeasure& measure) {
    const KernelCoef kt{c_true};
    return kernel_error([&](const VectorXd& r) { return eval_kernel(basis, kt, r); }, basis,
                        c_hat, measure);
}

double kernel_error_multitype(const BasisSpec& basis, const MatrixXd& cmat_true,
                              const MatrixXd& cmat_hat, const EmpiricalMeasure& measure) {
    if (cmat_true.cols() != cmat_hat.cols() || cmat_true.rows() != cmat_hat.rows())
        throw ShapeMismatch("coefficient matrices differ in shape");
    double acc = 0.0;
    for (int i = 0; i < cmat_true.cols(); ++i)
        acc += kernel_error(basis, cmat_true.col(i), cmat_hat.col(i), measure);
    return acc / cmat_true.cols();
}

double trajectory_error(const TrajectoryData& truth, const TrajectoryData& pred) {
    if (truth.n_traj() != pred.n_traj()) throw ShapeMismatch("trajectory counts differ");
    if (truth.n_steps() != pred.n_steps()) throw ShapeMismatch("trajectory lengths differ");
    double acc = 0.0;
    for (int m = 0; m < truth.n_traj(); ++m) {
        double num = 0.0, den = 0.0;
        for (std::size_t l = 0; l < truth.states[m].size(); ++l) {
            num += (truth.states[m][l] - pred.states[m][l]).squaredNorm();
            den += truth.states[m][l].squaredNorm();
        }
        if (den == 0.0) throw ZeroTrueKernel("reference trajectory is identically zero");
        acc += std::sqrt(num / den);
    }
    return acc / truth.n_traj();
}

double trajectory_bound(const WeightMatrix& a, const WeightMatrix& a_hat, const VectorXd& c,
                        const VectorXd& c_hat, double c0_bound, double t_final) {
    const double p = static_cast<double>(c.size());
    const double c1 = 2.0 * p * c0_bound * c0_bound;
    const double c2 = c.squaredNorm() + c_hat.squaredNorm();
    const double gap =
        c2 * (a.entries - a_hat.entries).squaredNorm() + (c - c_hat).squaredNorm();
    return c1 * t_final * t_final * std::exp(2.0 * c1 * c2 * t_final) * gap;
}

double empirical_traj_deviation(const SystemSpec& spec, const WeightMatrix& a,
                                const KernelCoef& c, const WeightMatrix& a_hat,
                                const KernelCoef& c_hat, const BasisSpec& basis, int n_paths) {
    const TrajectoryData truth = simulate(spec, a, basis, c, n_paths);
    // same spec (and seed): identical initial conditions and noise increments
    const TrajectoryData fitted = simulate(spec, a_hat, basis, c_hat, n_paths);
    double sup = 0.0;
    for (int l = 0; l <= spec.n_steps; ++l) {
        double mean_sq = 0.0;
        for (int m = 0; m < n_paths; ++m)
            mean_sq += (truth.states[m][l] - fitted.states[m][l]).squaredNorm();
        sup = std::max(sup, mean_sq / n_paths);
    }
    return sup;
}

double basis_c0_bound(const BasisSpec& basis, const EmpiricalMeasure& measure) {
    if (measure.samples.empty()) throw EmptyMeasure("exploration measure has no samples");
    const double h = 1e-5;
    const int d = basis.dim;
    double sup = 0.0;
    VectorXd rp(d), rm(d);
    for (const auto& r : measure.samples) {
        const MatrixXd vals = basis.eval_all(r);
        for (int k = 0; k < basis.p(); ++k) {
            double grad_sq = 0.0;
            for (int axis = 0; axis < d; ++axis) {
                rp = r;
                rm = r;
                rp(axis) += h;
                rm(axis) -= h;
                grad_sq += (basis.eval(k, rp) - basis.eval(k, rm)).squaredNorm() / (4.0 * h * h);
            }
            sup = std::max(sup, vals.col(k).norm() + std::sqrt(grad_sq));
        }
    }
    return sup;
}

void LeadershipConfig::validate() const {
    if (std::abs(alpha + beta - 1.0) > 1e-12)
        throw ConfigError("leadership weights must satisfy alpha + beta = 1");
    if (!(alpha > beta)) throw ConfigError("leadership needs alpha > beta");
}

VectorXd leadership_features(const WeightMatrix& a, const LeadershipConfig& cfg) {
    cfg.validate();
    const int n = a.size();
    VectorXd f(n);
    for (int i = 0; i < n; ++i)
        f(i) = cfg.alpha * a.entries.row(i).cwiseAbs().sum() +
               cfg.beta * a.entries.col(i).cwiseAbs().sum();
    return f;
}

LeaderGroups classify_leaders_followers(const WeightMatrix& a, const LeadershipConfig& cfg,
                                        std::optional<int> n_leaders_hint, std::uint64_t seed,
                                        FollowerAssignOrder order) {
    const int n = a.size();
    const VectorXd features = leadership_features(a, cfg);

    std::vector<int> leaders;
    if (n_leaders_hint) {
        if (*n_leaders_hint < 1 || *n_leaders_hint >= n)
            throw ConfigError("leader count hint out of range");
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int x, int y) { return features(x) > features(y); });
        leaders.assign(idx.begin(), idx.begin() + *n_leaders_hint);
        std::sort(leaders.begin(), leaders.end());
    } else {
        std::vector<VectorXd> pts(n);
        for (int i = 0; i < n; ++i) {
            pts[i] = VectorXd(1);
            pts[i](0) = features(i);
        }
        const KmeansResult km = kmeans(pts, 2, seed);
        const double gap = std::abs(km.centroids[0](0) - km.centroids[1](0));
        if (gap < 1e-9) throw NoLeaders("leadership features form a single cluster");
        const int leader_cluster = km.centroids[0](0) > km.centroids[1](0) ? 0 : 1;
        for (int i = 0; i < n; ++i)
            if (km.labels[i] == leader_cluster) leaders.push_back(i);
    }

    LeaderGroups out;
    out.leaders = leaders;
    out.groups.resize(leaders.size());
    std::vector<int> group_of(n, -1);
    for (std::size_t k = 0; k < leaders.size(); ++k) {
        out.groups[k].push_back(leaders[k]);
        group_of[leaders[k]] = static_cast<int>(k);
    }

    auto affinity = [&](int j, std::size_t k) {
        double s = 0.0;
        for (int i : out.groups[k])
            s += cfg.alpha * std::abs(a.entries(i, j)) + cfg.beta * std::abs(a.entries(j, i));
        return s;
    };

    std::vector<int> unassigned;
    for (int j = 0; j < n; ++j)
        if (group_of[j] < 0) unassigned.push_back(j);

    if (order == FollowerAssignOrder::GreedyGlobal) {
        while (!unassigned.empty()) {
            int best_j = -1, best_pos = -1;
            std::size_t best_k = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t pos = 0; pos < unassigned.size(); ++pos) {
                const int j = unassigned[pos];
                for (std::size_t k = 0; k < out.groups.size(); ++k) {
                    const double s = affinity(j, k);
                    if (s > best) {  // ties keep the earliest (lowest j, then lowest k)
                        best = s;
                        best_j = j;
                        best_k = k;
                        best_pos = static_cast<int>(pos);
                    }
                }
            }
            out.groups[best_k].push_back(best_j);
            group_of[best_j] = static_cast<int>(best_k);
            unassigned.erase(unassigned.begin() + best_pos);
        }
    } else {
        for (int j : unassigned) {
            std::size_t best_k = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < out.groups.size(); ++k) {
                const double s = affinity(j, k);
                if (s > best) {
                    best = s;
                    best_k = k;
                }
            }
            out.groups[best_k].push_back(j);
            group_of[j] = static_cast<int>(best_k);
        }
    }
    for (auto& g : out.groups) std::sort(g.begin(), g.end());
    return out;
}

}  // namespace netkernel
