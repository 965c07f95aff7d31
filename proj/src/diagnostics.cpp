#include "netkernel/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

EmpiricalMeasure exploration_measure(const TrajectoryData& data) {
    data.validate();
    const int n = data.n_agents();
    const int d = data.dim();
    const int L = data.n_steps();
    const int M = data.n_traj();
    EmpiricalMeasure out;
    out.samples.reserve(static_cast<std::size_t>(n) * (n - 1) * L * M);
    VectorXd diff(d);
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            const MatrixXd& X = data.states[m][l];
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    diff = X.row(j) - X.row(i);
                    out.samples.push_back(diff);
                }
            }
        }
    }
    return out;
}

double l2rho_norm(const VecFn& kernel, const EmpiricalMeasure& measure) {
    if (measure.samples.empty()) throw EmptyMeasure("exploration measure has no samples");
    double acc = 0.0;
    for (const auto& r : measure.samples) acc += kernel(r).squaredNorm();
    return std::sqrt(acc / measure.samples.size());
}

double l2rho_norm(const BasisSpec& basis, const VectorXd& coef, const EmpiricalMeasure& measure) {
    if (measure.samples.empty()) throw EmptyMeasure("exploration measure has no samples");
    if (coef.size() != basis.p()) throw DimensionMismatch("coefficient length != basis size");
    const KernelCoef kc{coef};
    double acc = 0.0;
    for (const auto& r : measure.samples) acc += eval_kernel(basis, kc, r).squaredNorm();
    return std::sqrt(acc / measure.samples.size());
}

MinSingvalReport min_singval_sq(const RegressionBlock& block) {
    MinSingvalReport rep;
    if (block.samples_m <= 0) throw DataError("regression block lacks the trajectory count");
    double smin_sq = 0.0, smax_sq = 0.0;
    if (block.design.size() > 0) {
        Eigen::BDCSVD<MatrixXd> svd(block.design);
        const auto& sv = svd.singularValues();
        smax_sq = sv(0) * sv(0);
        smin_sq = sv(sv.size() - 1) * sv(sv.size() - 1);
    } else if (block.has_normal) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(block.normal_mat, Eigen::EigenvaluesOnly);
        smax_sq = std::max(0.0, es.eigenvalues().maxCoeff()) * block.rows;
        smin_sq = std::max(0.0, es.eigenvalues().minCoeff()) * block.rows;
    } else {
        throw DataError("regression block holds neither design nor normal form");
    }
    rep.min_sv_sq_per_m = smin_sq / block.samples_m;
    rep.cond = smin_sq > 0.0 ? std::sqrt(smax_sq / smin_sq)
                             : std::numeric_limits<double>::infinity();
    return rep;
}

RipReport rip_scan(const std::vector<MatrixXd>& sensing, int n_probe, std::uint64_t seed) {
    if (sensing.empty()) throw DataError("no sensing matrices");
    if (n_probe < 100) throw ConfigError("rip_scan needs n_probe >= 100");
    const int rows = static_cast<int>(sensing[0].rows());
    const int cols = static_cast<int>(sensing[0].cols());
    const double m_inv = 1.0 / sensing.size();

    CounterRng rng(mix64(seed) ^ 0x726970ull);
    RipReport rep;
    rep.ratios.resize(n_probe);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    VectorXd u(rows), v(cols);
    for (int t = 0; t < n_probe; ++t) {
        for (int i = 0; i < rows; ++i) u(i) = rng.normal(t, 0, i);
        for (int j = 0; j < cols; ++j) v(j) = rng.normal(t, 1, j);
        u.normalize();
        v.normalize();
        double r = 0.0;
        for (const auto& A : sensing) {
            const double s = u.dot(A * v);
            r += s * s;
        }
        r *= m_inv;
        rep.ratios[t] = r;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    rep.C = 0.5 * (hi + lo);
    rep.delta = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
    if (rep.C > 0.0)
        for (double& r : rep.ratios) r /= rep.C;
    return rep;
}

LandscapeScan landscape_scan(int theta_grid, const std::vector<MatrixXd>& sensing,
                             double theta1_true, double theta2_true) {
    if (sensing.empty()) throw DataError("no sensing matrices");
    if (sensing[0].rows() != 2 || sensing[0].cols() != 2)
        throw DimensionMismatch("landscape scan expects 2 x 2 sensing matrices");
    if (theta_grid < 8) throw ConfigError("landscape grid too coarse");

    const Eigen::Vector2d us(std::cos(theta1_true), std::sin(theta1_true));
    const Eigen::Vector2d vs(std::cos(theta2_true), std::sin(theta2_true));
    std::vector<double> truth(sensing.size());
    for (std::size_t m = 0; m < sensing.size(); ++m) truth[m] = us.dot(sensing[m] * vs);

    LandscapeScan scan;
    scan.grid = theta_grid;
    scan.loss.resize(theta_grid, theta_grid);
    const double step = 2.0 * M_PI / theta_grid;
    const double m_inv = 1.0 / sensing.size();
    // precompute the four bilinear terms per sample: loss is a quadratic in
    // (cos t1, sin t1) x (cos t2, sin t2)
    for (int i = 0; i < theta_grid; ++i) {
        const Eigen::Vector2d u(std::cos(i * step), std::sin(i * step));
        for (int j = 0; j < theta_grid; ++j) {
            const Eigen::Vector2d v(std::cos(j * step), std::sin(j * step));
            double acc = 0.0;
            for (std::size_t m = 0; m < sensing.size(); ++m) {
                const double e = truth[m] - u.dot(sensing[m] * v);
                acc += e * e;
            }
            scan.loss(i, j) = acc * m_inv;
        }
    }
    scan.max_loss = scan.loss.maxCoeff();

    const double slack = 1e-12;
    for (int i = 0; i < theta_grid; ++i) {
        for (int j = 0; j < theta_grid; ++j) {
            const double v0 = scan.loss(i, j);
            bool strict_min = true;
            for (int di = -1; di <= 1 && strict_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = (i + di + theta_grid) % theta_grid;
                    const int nj = (j + dj + theta_grid) % theta_grid;
                    if (scan.loss(ni, nj) <= v0 + slack) {
                        strict_min = false;
                        break;
                    }
                }
            }
            if (strict_min) scan.local_minima.emplace_back(i, j);
        }
    }
    return scan;
}

CoercivityMc gaussian_coercivity_mc(int dim, const BasisFunction& radial_fn, long n_mc,
                                    std::uint64_t seed) {
    if (dim < 1 || dim > 3) throw ConfigError("coercivity check supports d in {1,2,3}");
    if (n_mc < 1) throw ConfigError("n_mc must be positive");

    CoercivityMc out;
    out.bound = dim == 1 ? 0.5164 : dim == 2 ? 0.1269 : 0.2661;

    CounterRng rng(mix64(seed) ^ 0x636f6572ull);
    double num = 0.0, den = 0.0;
    VectorXd x1(dim), x2(dim), x3(dim);
    for (long t = 0; t < n_mc; ++t) {
        for (int k = 0; k < dim; ++k) {
            x1(k) = rng.normal(t, 0, k);
            x2(k) = rng.normal(t, 1, k);
            x3(k) = rng.normal(t, 2, k);
        }
        const VectorXd r12 = x2 - x1;
        const VectorXd r13 = x3 - x1;
        const double n12 = r12.norm();
        const double n13 = r13.norm();
        if (n12 == 0.0 || n13 == 0.0) continue;
        const double f12 = radial_fn(n12);
        const double f13 = radial_fn(n13);
        num += f12 * f13 * r12.dot(r13) / (n12 * n13);
        den += f12 * f12;
    }
    if (den / n_mc < 1e-14)
        throw DegenerateDenominator("test function has no mass under the sampling law");
    out.ratio = num / den;
    return out;
}

std::vector<MatrixXd> make_gaussian_sensing(int rows, int cols, int n_samples,
                                            std::uint64_t seed) {
    CounterRng rng(mix64(seed) ^ 0x67617573ull);
    std::vector<MatrixXd> out(n_samples);
    for (int m = 0; m < n_samples; ++m) {
        out[m].resize(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out[m](i, j) = rng.normal(m, i, j);
    }
    return out;
}

std::vector<MatrixXd> make_ips_sensing(const BasisSpec& basis, int n_agents, int n_samples,
                                       std::uint64_t seed) {
    basis.validate();
    if (basis.dim != 1) throw ConfigError("ips sensing uses scalar states");
    const int p = basis.p();
    CounterRng rng(mix64(seed) ^ 0x697073ull);
    std::vector<MatrixXd> out(n_samples);
    std::vector<double> x(n_agents);
    VectorXd diff(1);
    for (int m = 0; m < n_samples; ++m) {
        for (int i = 0; i < n_agents; ++i) x[i] = rng.normal(m, i);
        out[m].resize(n_agents - 1, p);
        for (int j = 1; j < n_agents; ++j) {
            diff(0) = x[j] - x[0];
            for (int k = 0; k < p; ++k) out[m](j - 1, k) = basis.eval(k, diff)(0);
        }
    }
    return out;
}

double basis_sup_bound(const BasisSpec& basis, const EmpiricalMeasure& measure) {
    if (measure.samples.empty()) throw EmptyMeasure("exploration measure has no samples");
    double sup = 0.0;
    for (const auto& r : measure.samples) {
        const MatrixXd vals = basis.eval_all(r);
        for (int k = 0; k < basis.p(); ++k) sup = std::max(sup, vals.col(k).norm());
    }
    return sup;
}

}  // namespace netkernel
