#include "netkernel/multitype.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "netkernel/errors.hpp"
#include "netkernel/metrics.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

namespace {

// per-agent kernel-level contraction of the sensing statistics at fixed row:
// K[k,k'] = sum_{jj,jj'} a_jj a_jj' G[(jj,k),(jj',k')], g[k] = sum_jj a_jj h[(jj,k)]
void agent_kernel_normal(const SensingNormal& sn, const VectorXd& a_row, int p, MatrixXd& K,
                         VectorXd& g) {
    K.setZero(p, p);
    g.setZero(p);
    add_kernel_normal_from_sensing(sn, a_row, K, g);
}

VectorXd row_of(const MatrixXd& a, int i) {
    const int n = static_cast<int>(a.rows());
    VectorXd row(n - 1);
    int jj = 0;
    for (int j = 0; j < n; ++j)
        if (j != i) row(jj++) = a(i, j);
    return row;
}

double rel_change(const MatrixXd& now, const MatrixXd& prev) {
    const double denom = prev.norm();
    if (denom == 0.0) return now.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (now - prev).norm() / denom;
}

// descending ||u col||, sign fixed by the largest-|entry| of the v column
void fix_gauge(MatrixXd& u, MatrixXd& v) {
    const int q = static_cast<int>(u.cols());
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return u.col(a).norm() > u.col(b).norm(); });
    MatrixXd u2(u.rows(), q), v2(v.rows(), q);
    for (int c = 0; c < q; ++c) {
        u2.col(c) = u.col(order[c]);
        v2.col(c) = v.col(order[c]);
        Eigen::Index arg = 0;
        v2.col(c).cwiseAbs().maxCoeff(&arg);
        if (v2(arg, c) < 0.0) {
            v2.col(c) = -v2.col(c);
            u2.col(c) = -u2.col(c);
        }
    }
    u = std::move(u2);
    v = std::move(v2);
}

}  // namespace

double loss_from_stats_multitype(const SensingStats& stats, const WeightMatrix& a,
                                 const MatrixXd& cmat) {
    const int n = stats.n;
    const int p = stats.p;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const SensingNormal& sn = stats.per_agent[i];
        VectorXd z((n - 1) * p);
        int jj = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            z.segment(jj * p, p) = a.entries(i, j) * cmat.col(i);
            ++jj;
        }
        total += sn.s - 2.0 * z.dot(sn.h) + z.dot(sn.G * z);
    }
    return total * stats.dt / (static_cast<double>(stats.M) * stats.L);
}

MultitypeFactors threefold_fit(const SensingStats& stats, const BasisSpec& basis, int n_types,
                               const ThreefoldOptions& opts) {
    const int n = stats.n;
    const int p = stats.p;
    const int q = n_types;
    if (q < 1 || q > std::min(p, n))
        throw ConfigError("need 1 <= Q <= min(p, N)");
    if (opts.tol <= 0.0 || opts.max_iter < 1) throw ConfigError("bad threefold options");

    // seeded Gaussian start, v orthonormalized
    CounterRng rng(mix64(opts.seed) ^ 0x3f414c53ull);
    MatrixXd u(p, q), v(n, q);
    for (int k = 0; k < p; ++k)
        for (int c = 0; c < q; ++c) u(k, c) = rng.normal(0, k, c);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < q; ++c) v(i, c) = rng.normal(1, i, c);
    v = procrustes_orthonormalize(v);

    MultitypeFactors out;
    MatrixXd a = MatrixXd::Zero(n, n);
    MatrixXd a_prev, u_prev, v_prev;
    std::vector<int> labels;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        // a-step: per-row NNLS at kernel coefficients u v_i'
        bool any_nonzero = false;
        std::vector<VectorXd> rows(n);
        parallel_for(n, [&](std::size_t ui) {
            const int i = static_cast<int>(ui);
            const VectorXd ci = u * v.row(i).transpose();
            if (ci.norm() == 0.0) {
                rows[i] = VectorXd::Zero(n - 1);
                return;
            }
            MatrixXd gram;
            VectorXd cross;
            graph_normal_from_sensing(stats.per_agent[i], ci, gram, cross);
            rows[i] = nnls_normal(gram, cross);
        });
        a.setZero();
        for (int i = 0; i < n; ++i) {
            const double nrm = rows[i].norm();
            if (nrm == 0.0) continue;
            any_nonzero = true;
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                a(i, j) = rows[i](jj++) / nrm;
            }
        }
        if (!any_nonzero) throw AllRowsDegenerate("every NNLS row came back zero");

        // per-agent kernel contractions reused by the u- and v-steps
        std::vector<MatrixXd> K(n);
        std::vector<VectorXd> g(n);
        parallel_for(n, [&](std::size_t ui) {
            const int i = static_cast<int>(ui);
            agent_kernel_normal(stats.per_agent[i], row_of(a, i), p, K[i], g[i]);
        });

        // u-step: vectorized least squares over (k, c) with k-major ordering
        MatrixXd gram_u = MatrixXd::Zero(p * q, p * q);
        VectorXd cross_u = VectorXd::Zero(p * q);
        for (int i = 0; i < n; ++i) {
            for (int c1 = 0; c1 < q; ++c1) {
                for (int c2 = 0; c2 < q; ++c2) {
                    const double w = v(i, c1) * v(i, c2);
                    if (w == 0.0) continue;
                    for (int k1 = 0; k1 < p; ++k1)
                        for (int k2 = 0; k2 < p; ++k2)
                            gram_u(k1 * q + c1, k2 * q + c2) += w * K[i](k1, k2);
                }
                for (int k1 = 0; k1 < p; ++k1) cross_u(k1 * q + c1) += v(i, c1) * g[i](k1);
            }
        }
        const VectorXd u_vec = solve_ls_normal(gram_u, cross_u, opts.reg);
        for (int k = 0; k < p; ++k)
            for (int c = 0; c < q; ++c) u(k, c) = u_vec(k * q + c);

        // v-step: per-row least squares, then orthonormalization
        MatrixXd v_raw(n, q);
        parallel_for(n, [&](std::size_t ui) {
            const int i = static_cast<int>(ui);
            const MatrixXd gram_v = u.transpose() * K[i] * u;
            const VectorXd cross_v = u.transpose() * g[i];
            v_raw.row(i) = solve_ls_normal(gram_v, cross_v, opts.reg).transpose();
        });
        try {
            v = procrustes_orthonormalize(v_raw);
        } catch (const RankDeficient& e) {
            throw RankDeficientV(e.what());
        }

        if (opts.use_kmeans) {
            std::vector<VectorXd> pts(n);
            for (int i = 0; i < n; ++i) pts[i] = v.row(i).transpose();
            KmeansResult km = kmeans(pts, q, opts.seed);
            labels = km.labels;
            if (!opts.kmeans_labels_only) {
                MatrixXd v_centered(n, q);
                for (int i = 0; i < n; ++i)
                    v_centered.row(i) = km.centroids[km.labels[i]].transpose();
                // right-multiplying keeps equal rows equal, so cmat still has
                // at most Q distinct columns after re-orthonormalization
                try {
                    v = procrustes_orthonormalize(v_centered);
                } catch (const RankDeficient&) {
                    // collinear centroids: keep the un-clustered v this round
                }
            }
        }

        ThreefoldRecord rec;
        rec.iter = iter;
        rec.rel_change_a =
            a_prev.size() == 0 ? std::numeric_limits<double>::infinity() : rel_change(a, a_prev);
        rec.rel_change_u =
            u_prev.size() == 0 ? std::numeric_limits<double>::infinity() : rel_change(u, u_prev);
        rec.rel_change_v =
            v_prev.size() == 0 ? std::numeric_limits<double>::infinity() : rel_change(v, v_prev);
        rec.loss = loss_from_stats_multitype(stats, WeightMatrix{a}, u * v.transpose());
        if (!std::isfinite(rec.loss)) throw NonFiniteLoss("threefold loss is not finite");
        out.history.push_back(rec);
        a_prev = a;
        u_prev = u;
        v_prev = v;
        if (rec.rel_change_a <= opts.tol && rec.rel_change_u <= opts.tol &&
            rec.rel_change_v <= opts.tol) {
            out.converged = true;
            break;
        }
    }

    fix_gauge(u, v);
    out.a = WeightMatrix{std::move(a)};
    out.u = u;
    out.v = v;
    out.cmat = out.u * out.v.transpose();
    out.labels = std::move(labels);
    return out;
}

MultitypeFactors threefold_fit(const TrajectoryData& data, const BasisSpec& basis, int n_types,
                               const ThreefoldOptions& opts) {
    return threefold_fit(assemble_sensing_stats(data, basis), basis, n_types, opts);
}

ModelSelectResult model_select(const TrajectoryData& data_train, const TrajectoryData& data_test,
                               const BasisSpec& basis, const std::vector<int>& q_candidates,
                               double horizon_dt, int horizon_steps,
                               const ThreefoldOptions& opts) {
    if (q_candidates.empty()) throw ConfigError("need at least one candidate Q");
    if (data_test.n_steps() < horizon_steps)
        throw ConfigError("test data shorter than the requested horizon");
    if (std::abs(data_test.dt - horizon_dt) > 1e-12 * std::max(1.0, horizon_dt))
        throw ConfigError("test data dt differs from the requested horizon dt");

    // truth over the horizon
    TrajectoryData truth = data_test;
    for (auto& traj : truth.states) traj.resize(horizon_steps + 1);

    std::vector<MatrixXd> ics;
    ics.reserve(data_test.n_traj());
    for (const auto& traj : data_test.states) ics.push_back(traj[0]);

    SystemSpec pred_spec = data_test.spec;
    pred_spec.dt = horizon_dt;
    pred_spec.n_steps = horizon_steps;

    const SensingStats train_stats = assemble_sensing_stats(data_train, basis);

    ModelSelectResult result;
    for (int q : q_candidates) {
        ThreefoldOptions o = opts;
        const MultitypeFactors fit = threefold_fit(train_stats, basis, q, o);
        const TrajectoryData pred =
            simulate_multitype_with_ics(pred_spec, fit.a, basis, fit.cmat, ics);
        result.table.push_back({q, trajectory_error(truth, pred)});
    }

    // smallest candidate within 5% of the best error
    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& e : result.table) best_err = std::min(best_err, e.traj_error);
    std::vector<ModelSelectEntry> sorted = result.table;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.n_types < b.n_types; });
    for (const auto& e : sorted) {
        if (e.traj_error <= best_err * 1.05) {
            result.best = e.n_types;
            break;
        }
    }
    return result;
}

}  // namespace netkernel
