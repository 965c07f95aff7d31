#include "netkernel/orals.hpp"

#include <cmath>

#include "netkernel/errors.hpp"
#include "netkernel/parallel.hpp"
#include "netkernel/rng.hpp"
#include "netkernel/simulate.hpp"

namespace netkernel {

ZEstimates operator_regression(const SensingStats& stats, const Regularizer& reg) {
    const int n = stats.n;
    const int p = stats.p;
    const double rows = static_cast<double>(stats.rows_per_agent());

    ZEstimates out;
    out.Z.assign(n, MatrixXd::Zero(n - 1, p));
    out.residuals.resize(n);
    out.min_sv_sq_per_M.resize(n);

    parallel_for(n, [&](std::size_t ui) {
        const int i = static_cast<int>(ui);
        const SensingNormal& sn = stats.per_agent[i];
        const VectorXd z = solve_ls_normal(sn.G, sn.h, reg);
        for (int jj = 0; jj < n - 1; ++jj) out.Z[i].row(jj) = z.segment(jj * p, p).transpose();
        const double res_sq = std::max(0.0, sn.s - 2.0 * z.dot(sn.h) + z.dot(sn.G * z));
        out.residuals(i) = std::sqrt(res_sq / rows);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(sn.G, Eigen::EigenvaluesOnly);
        out.min_sv_sq_per_M(i) = std::max(0.0, es.eigenvalues().minCoeff()) / stats.M;
    });
    return out;
}

ZEstimates operator_regression(const TrajectoryData& data, const BasisSpec& basis,
                               const Regularizer& reg) {
    return operator_regression(assemble_sensing_stats(data, basis), reg);
}

std::pair<WeightMatrix, KernelCoef> deterministic_als(const ZEstimates& zs, int n_iter) {
    const int n = static_cast<int>(zs.Z.size());
    if (n == 0) throw AllZero("no Z estimates");
    const int p = static_cast<int>(zs.Z[0].cols());

    double total = 0.0;
    MatrixXd stacked(n * (n - 1), p);
    for (int i = 0; i < n; ++i) {
        stacked.middleRows(i * (n - 1), n - 1) = zs.Z[i];
        total += zs.Z[i].squaredNorm();
    }
    if (total == 0.0) throw AllZero("all Z estimates are zero");

    VectorXd c = rank1_factor(stacked).v;
    // the nonnegativity of a fixes the overall sign: keep the direction that
    // leaves more positive mass in the row projections
    double pos = 0.0, neg = 0.0;
    for (int i = 0; i < n; ++i) {
        const VectorXd proj = zs.Z[i] * c;
        pos += proj.cwiseMax(0.0).squaredNorm();
        neg += (-proj).cwiseMax(0.0).squaredNorm();
    }
    if (neg > pos) c = -c;

    MatrixXd a = MatrixXd::Zero(n, n);
    for (int iter = 0; iter < n_iter; ++iter) {
        const double c_sq = c.squaredNorm();
        if (c_sq == 0.0) throw AllZero("kernel coefficient collapsed to zero");
        a.setZero();
        for (int i = 0; i < n; ++i) {
            VectorXd row = (zs.Z[i] * c / c_sq).cwiseMax(0.0);
            const double nrm = row.norm();
            if (nrm == 0.0) continue;
            row /= nrm;
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                a(i, j) = row(jj++);
            }
        }
        VectorXd c_next = VectorXd::Zero(p);
        for (int i = 0; i < n; ++i) {
            int jj = 0;
            VectorXd row(n - 1);
            for (int j = 0; j < n; ++j)
                if (j != i) row(jj++) = a(i, j);
            c_next.noalias() += zs.Z[i].transpose() * row;
        }
        c = c_next / n;
    }
    return {WeightMatrix{std::move(a)}, KernelCoef{std::move(c)}};
}

namespace {

FitResult orals_from_z(const ZEstimates& z) {
    FitResult result;
    IterationRecord rec0;
    rec0.iter = 0;
    rec0.loss = z.residuals.size() > 0 ? z.residuals.mean() : 0.0;
    result.history.push_back(rec0);

    auto [a1, c1] = deterministic_als(z, 1);
    auto [a2, c2] = deterministic_als(z, 2);
    IterationRecord rec1;
    rec1.iter = 1;
    rec1.rel_change_a = a1.entries.norm();
    rec1.rel_change_c = c1.c.norm();
    rec1.loss = rec0.loss;
    IterationRecord rec2;
    rec2.iter = 2;
    rec2.rel_change_a =
        a1.entries.norm() > 0.0 ? (a2.entries - a1.entries).norm() / a1.entries.norm() : 0.0;
    rec2.rel_change_c = c1.c.norm() > 0.0 ? (c2.c - c1.c).norm() / c1.c.norm() : 0.0;
    rec2.loss = rec0.loss;
    result.history.push_back(rec1);
    result.history.push_back(rec2);

    result.a_hat = std::move(a2);
    result.c_hat = std::move(c2);
    result.converged = true;
    return result;
}

}  // namespace

FitResult orals_fit(const SensingStats& stats, const Regularizer& reg) {
    return orals_from_z(operator_regression(stats, reg));
}

FitResult orals_fit(const TrajectoryData& data, const BasisSpec& basis, const Regularizer& reg) {
    return orals_from_z(operator_regression(data, basis, reg));
}

NormalityReport normality_harness(const SystemSpec& spec, const WeightMatrix& a_true,
                                  const KernelCoef& c_true, const BasisSpec& basis, int m_per_rep,
                                  int reps, std::uint64_t seed) {
    const int n = spec.n_agents;
    const int p = basis.p();
    const int q = (n - 1) * p;
    const int L = spec.n_steps;

    // reference normal matrix from one large dataset
    SystemSpec big = spec;
    big.seed = mix64(seed) ^ 0x626967u;
    const TrajectoryData big_data = simulate(big, a_true, basis, c_true, 100 * m_per_rep);
    const SensingStats big_stats = assemble_sensing_stats(big_data, basis);

    // true products z_i = vec(a_i' c'), j-major
    std::vector<VectorXd> z_true(n, VectorXd::Zero(q));
    for (int i = 0; i < n; ++i) {
        int jj = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            z_true[i].segment(jj * p, p) = a_true.entries(i, j) * c_true.c;
            ++jj;
        }
    }

    std::vector<MatrixXd> xi(n, MatrixXd(reps, q));
    for (int r = 0; r < reps; ++r) {
        SystemSpec rep_spec = spec;
        rep_spec.seed = mix64(seed) ^ mix64(r + 1);
        const TrajectoryData data = simulate(rep_spec, a_true, basis, c_true, m_per_rep);
        const ZEstimates z = operator_regression(data, basis);
        for (int i = 0; i < n; ++i) {
            int jj = 0;
            VectorXd zi(q);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                zi.segment(jj * p, p) = z.Z[i].row(jj).transpose();
                ++jj;
            }
            xi[i].row(r) = std::sqrt(static_cast<double>(m_per_rep)) *
                           (zi - z_true[i]).transpose();
        }
    }

    NormalityReport report;
    report.discrepancy.resize(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd mean = xi[i].colwise().mean();
        const MatrixXd centered = xi[i].rowwise() - mean;
        const MatrixXd cov = centered.transpose() * centered / (reps - 1.0);

        // Abar with the dt-scaled sensing convention; the reference covariance
        // sigma^2 dt / L * Abar^{-1} is then convention-free
        const MatrixXd abar = (spec.dt * spec.dt) * big_stats.per_agent[i].G /
                              (100.0 * m_per_rep * static_cast<double>(L));
        const MatrixXd ref = (spec.sigma * spec.sigma * spec.dt / L) *
                             abar.llt().solve(MatrixXd::Identity(q, q));
        const double denom = ref.norm();
        report.discrepancy(i) = denom > 0.0 ? (cov - ref).norm() / denom : cov.norm();
    }
    report.max_discrepancy = report.discrepancy.maxCoeff();
    report.mean_discrepancy = report.discrepancy.mean();
    return report;
}

}  // namespace netkernel
