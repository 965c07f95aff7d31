#include "netkernel/als.hpp"

#include <cmath>
#include <limits>

#include "netkernel/errors.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

VectorXd default_c0(int p, std::uint64_t seed) {
    CounterRng rng(mix64(seed) ^ 0x63305f696e6974ull);
    VectorXd c(p);
    for (int k = 0; k < p; ++k) c(k) = rng.normal(k);
    const double nrm = c.norm();
    return nrm > 0.0 ? VectorXd(c / nrm) : VectorXd::Ones(p).normalized();
}

namespace {

struct AStepResult {
    MatrixXd a;
    bool any_nonzero = false;
};

AStepResult rows_from_normals(int n, const std::vector<MatrixXd>& gram,
                              const std::vector<VectorXd>& cross) {
    AStepResult r;
    r.a = MatrixXd::Zero(n, n);
    std::vector<VectorXd> rows(n);
    parallel_for(n, [&](std::size_t i) { rows[i] = nnls_normal(gram[i], cross[i]); });
    for (int i = 0; i < n; ++i) {
        const double nrm = rows[i].norm();
        if (nrm > 0.0) {
            r.any_nonzero = true;
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                r.a(i, j) = rows[i](jj++) / nrm;
            }
        }
    }
    return r;
}

double rel_change(const MatrixXd& now, const MatrixXd& prev) {
    const double denom = prev.norm();
    if (denom == 0.0) return now.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (now - prev).norm() / denom;
}

// One engine for both assembly modes; the lambdas hide where normals come from.
template <typename AStep, typename CStep, typename Loss>
FitResult als_loop(int n, int p, const AlsOptions& opts, AStep a_step, CStep c_step,
                   Loss loss_fn) {
    if (opts.tol <= 0.0) throw ConfigError("als tol must be positive");
    if (opts.max_iter < 1) throw ConfigError("als max_iter must be >= 1");
    VectorXd c = opts.c0 ? *opts.c0 : default_c0(p, opts.c0_seed);
    if (c.size() != p) throw DimensionMismatch("c0 length != basis size");

    FitResult result;
    MatrixXd a_prev;
    VectorXd c_prev = c;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        AStepResult astep = a_step(c);
        if (!astep.any_nonzero)
            throw AllRowsDegenerate("every NNLS row came back zero");
        c = c_step(astep.a);

        IterationRecord rec;
        rec.iter = iter;
        rec.rel_change_a = a_prev.size() == 0 ? std::numeric_limits<double>::infinity()
                                              : rel_change(astep.a, a_prev);
        rec.rel_change_c = rel_change(c, c_prev);
        rec.loss = loss_fn(astep.a, c);
        if (!std::isfinite(rec.loss)) throw NonFiniteLoss("loss is not finite");
        result.history.push_back(rec);

        a_prev = astep.a;
        c_prev = c;
        if (rec.rel_change_a <= opts.tol && rec.rel_change_c <= opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.a_hat = WeightMatrix{std::move(a_prev)};
    result.c_hat = KernelCoef{std::move(c_prev)};
    return result;
}

}  // namespace

double loss_from_stats(const SensingStats& stats, const WeightMatrix& a, const VectorXd& c) {
    const int n = stats.n;
    const int p = stats.p;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const SensingNormal& sn = stats.per_agent[i];
        VectorXd z((n - 1) * p);
        int jj = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            z.segment(jj * p, p) = a.entries(i, j) * c;
            ++jj;
        }
        total += sn.s - 2.0 * z.dot(sn.h) + z.dot(sn.G * z);
    }
    return total * stats.dt / (static_cast<double>(stats.M) * stats.L);
}

double loss(const TrajectoryData& data, const BasisSpec& basis, const WeightMatrix& a,
            const KernelCoef& coef) {
    data.validate();
    const int M = data.n_traj();
    const int L = data.n_steps();
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            const MatrixXd pred = drift(a, basis, coef, data.states[m][l]) * data.dt;
            total += (data.states[m][l + 1] - data.states[m][l] - pred).squaredNorm();
        }
    }
    return total / (static_cast<double>(M) * L * data.dt);
}

FitResult als_fit(const SensingStats& stats, const AlsOptions& opts) {
    const int n = stats.n;
    const int p = stats.p;

    auto a_step = [&](const VectorXd& c) {
        std::vector<MatrixXd> gram(n);
        std::vector<VectorXd> cross(n);
        parallel_for(n, [&](std::size_t i) {
            graph_normal_from_sensing(stats.per_agent[i], c, gram[i], cross[i]);
        });
        return rows_from_normals(n, gram, cross);
    };
    auto c_step = [&](const MatrixXd& a) {
        MatrixXd gram = MatrixXd::Zero(p, p);
        VectorXd cross = VectorXd::Zero(p);
        for (int i = 0; i < n; ++i) {
            VectorXd row(n - 1);
            int jj = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) row(jj++) = a(i, j);
            add_kernel_normal_from_sensing(stats.per_agent[i], row, gram, cross);
        }
        return solve_ls_normal(gram, cross, opts.reg);
    };
    auto loss_fn = [&](const MatrixXd& a, const VectorXd& c) {
        return loss_from_stats(stats, WeightMatrix{a}, c);
    };
    return als_loop(n, p, opts, a_step, c_step, loss_fn);
}

FitResult als_fit(const TrajectoryData& data, const BasisSpec& basis, const AlsOptions& opts) {
    data.validate();
    basis.validate();
    const int n = data.n_agents();
    const int p = basis.p();

    const bool shared = opts.assembly == AlsOptions::Assembly::SharedStats ||
                        (opts.assembly == AlsOptions::Assembly::Auto &&
                         sensing_stats_affordable(n, p));
    if (shared) {
        const SensingStats stats = assemble_sensing_stats(data, basis);
        return als_fit(stats, opts);
    }

    auto a_step = [&](const VectorXd& c) {
        GraphNormalSet gn = stream_graph_normals(data, basis, c);
        return rows_from_normals(n, gn.gram, gn.cross);
    };
    auto c_step = [&](const MatrixXd& a) {
        MatrixXd gram;
        VectorXd cross;
        double s = 0.0;
        stream_kernel_normal(data, basis, WeightMatrix{a}, gram, cross, s);
        return solve_ls_normal(gram, cross, opts.reg);
    };
    auto loss_fn = [&](const MatrixXd& a, const VectorXd& c) {
        return loss(data, basis, WeightMatrix{a}, KernelCoef{c});
    };
    return als_loop(n, p, opts, a_step, c_step, loss_fn);
}

}  // namespace netkernel
