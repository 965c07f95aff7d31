#include "netkernel/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

namespace {

void require_finite(const MatrixXd& A, const char* what) {
    if (!A.allFinite()) throw NonFiniteInput(std::string(what) + " contains NaN or Inf");
}

// pinv solve of a symmetric PSD matrix via eigendecomposition
VectorXd psd_pinv_solve(const MatrixXd& G, const VectorXd& h, double rel_cut) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd& ev = es.eigenvalues();
    const double cut = std::max(ev.cwiseAbs().maxCoeff(), 0.0) * rel_cut;
    VectorXd y = es.eigenvectors().transpose() * h;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = ev(i) > cut ? y(i) / ev(i) : 0.0;
    return es.eigenvectors() * y;
}

VectorXd tikhonov_solve(const MatrixXd& G, const VectorXd& h, double lambda,
                        const MatrixXd* penalty) {
    MatrixXd M = G;
    if (penalty)
        M += lambda * (*penalty);
    else
        M.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) return llt.solve(h);
    // penalty is only PSD, so the shifted matrix can still be singular
    return psd_pinv_solve(M, h, 1e-13);
}

}  // namespace

void Regularizer::validate(int n_cols) const {
    if (lambda < 0.0) throw ConfigError("regularizer lambda must be >= 0");
    if (mode == Mode::TikhonovGeneralized) {
        if (!penalty) throw ConfigError("TikhonovGeneralized requires a penalty matrix");
        const MatrixXd& P = *penalty;
        if (P.rows() != n_cols || P.cols() != n_cols)
            throw ConfigError("penalty matrix shape does not match the unknown count");
        const double scale = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
        if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw ConfigError("penalty matrix must be symmetric");
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(P, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * scale)
            throw ConfigError("penalty matrix must be positive semidefinite");
    }
}

VectorXd solve_ls(const MatrixXd& A, const VectorXd& b, const Regularizer& reg) {
    require_finite(A, "design matrix");
    require_finite(b, "response");
    if (A.rows() != b.size()) throw DimensionMismatch("design rows != response length");
    if (A.rows() < 1 || A.cols() < 1) throw DimensionMismatch("empty least-squares system");
    reg.validate(static_cast<int>(A.cols()));

    switch (reg.mode) {
        case Regularizer::Mode::None: {
            Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
            if (qr.rank() < A.cols())
                throw SingularSystem("rank-deficient system with mode None");
            return qr.solve(b);
        }
        case Regularizer::Mode::PseudoInverse: {
            Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(reg.rcond);
            return svd.solve(b);
        }
        case Regularizer::Mode::MinNorm: {
            Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(
                std::numeric_limits<double>::epsilon() *
                static_cast<double>(std::max(A.rows(), A.cols())));
            return svd.solve(b);
        }
        case Regularizer::Mode::TikhonovId:
        case Regularizer::Mode::TikhonovGeneralized: {
            const MatrixXd G = A.transpose() * A;
            const VectorXd h = A.transpose() * b;
            double lambda = reg.lambda;
            const MatrixXd* P =
                reg.mode == Regularizer::Mode::TikhonovGeneralized ? &*reg.penalty : nullptr;
            if (reg.auto_lambda) lambda = lcurve_select(G, h, b.squaredNorm(), P);
            return tikhonov_solve(G, h, lambda, P);
        }
    }
    throw ConfigError("unknown regularizer mode");
}

VectorXd solve_ls_normal(const MatrixXd& G, const VectorXd& h, const Regularizer& reg,
                         double scale) {
    require_finite(G, "normal matrix");
    require_finite(h, "normal vector");
    if (G.rows() != G.cols() || G.rows() != h.size())
        throw DimensionMismatch("normal system shape mismatch");
    reg.validate(static_cast<int>(G.cols()));
    if (scale <= 0.0) scale = std::max(G.diagonal().maxCoeff(), 0.0);

    switch (reg.mode) {
        case Regularizer::Mode::None: {
            Eigen::LDLT<MatrixXd> ldlt(G);
            const VectorXd x = ldlt.solve(h);
            // LDLT does not expose rank; detect deficiency from the residual
            if (scale > 0.0 && (G * x - h).norm() > 1e-8 * (scale * x.norm() + h.norm()))
                throw SingularSystem("rank-deficient normal system with mode None");
            if (!x.allFinite()) throw SingularSystem("singular normal system with mode None");
            return x;
        }
        case Regularizer::Mode::PseudoInverse:
            return psd_pinv_solve(G, h, reg.rcond);
        case Regularizer::Mode::MinNorm:
            return psd_pinv_solve(
                G, h,
                std::numeric_limits<double>::epsilon() * static_cast<double>(G.rows()) * 8);
        case Regularizer::Mode::TikhonovId:
        case Regularizer::Mode::TikhonovGeneralized: {
            double lambda = reg.lambda;
            const MatrixXd* P =
                reg.mode == Regularizer::Mode::TikhonovGeneralized ? &*reg.penalty : nullptr;
            if (reg.auto_lambda) lambda = lcurve_select(G, h, -1.0, P);
            return tikhonov_solve(G, h, lambda, P);
        }
    }
    throw ConfigError("unknown regularizer mode");
}

double lcurve_select(const MatrixXd& G, const VectorXd& h, double s, const MatrixXd* penalty) {
    const double gnorm = std::max(G.cwiseAbs().maxCoeff(), 1e-300);
    constexpr int n_grid = 20;
    std::vector<double> lambdas(n_grid), lr(n_grid), lp(n_grid);
    for (int i = 0; i < n_grid; ++i)
        lambdas[i] = gnorm * std::pow(10.0, -12.0 + 12.0 * i / (n_grid - 1.0));

    // residual up to the constant ||b||^2 when s < 0; the corner location only
    // needs residual differences so the constant is optional
    double smin = 0.0;
    if (s < 0.0) {
        const VectorXd x0 = psd_pinv_solve(G, h, 1e-13);
        smin = -(x0.dot(G * x0) - 2.0 * h.dot(x0)) + 1e-30 * gnorm;
        s = 0.0;
    }
    for (int i = 0; i < n_grid; ++i) {
        const VectorXd x = tikhonov_solve(G, h, lambdas[i], penalty);
        const double res = std::max(s + smin + x.dot(G * x) - 2.0 * h.dot(x), 1e-300);
        const double pen = std::max(penalty ? x.dot(*penalty * x) : x.squaredNorm(), 1e-300);
        lr[i] = std::log(res);
        lp[i] = std::log(pen);
    }
    int best = n_grid / 2;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n_grid; ++i) {
        const double dx1 = lr[i] - lr[i - 1], dy1 = lp[i] - lp[i - 1];
        const double dx2 = lr[i + 1] - lr[i], dy2 = lp[i + 1] - lp[i];
        const double cross = dx1 * dy2 - dy1 * dx2;
        const double denom = std::pow(dx1 * dx1 + dy1 * dy1, 1.5) + 1e-300;
        const double curv = cross / denom;
        if (curv > best_curv) {
            best_curv = curv;
            best = i;
        }
    }
    return lambdas[best];
}

VectorXd nnls_normal(const MatrixXd& G, const VectorXd& h) {
    require_finite(G, "normal matrix");
    require_finite(h, "normal vector");
    const int n = static_cast<int>(G.cols());
    VectorXd x = VectorXd::Zero(n);
    if (h.size() == 0) return x;
    const double hscale = h.cwiseAbs().maxCoeff();
    if (hscale <= 0.0) return x;
    const double tol = 1e-10 * hscale;

    std::vector<bool> passive(n, false);
    VectorXd w = h;  // dual: h - Gx, x = 0 initially
    const int max_outer = 3 * n;

    for (int outer = 0; outer < max_outer; ++outer) {
        int j_best = -1;
        double w_best = tol;
        for (int j = 0; j < n; ++j) {
            if (!passive[j] && w(j) > w_best) {
                w_best = w(j);
                j_best = j;
            }
        }
        if (j_best < 0) return x;  // KKT satisfied
        passive[j_best] = true;

        // inner loop: restrict to the passive set, backtrack if infeasible
        for (;;) {
            std::vector<int> idx;
            for (int j = 0; j < n; ++j)
                if (passive[j]) idx.push_back(j);
            const int np = static_cast<int>(idx.size());
            MatrixXd Gp(np, np);
            VectorXd hp(np);
            for (int a = 0; a < np; ++a) {
                hp(a) = h(idx[a]);
                for (int b = 0; b < np; ++b) Gp(a, b) = G(idx[a], idx[b]);
            }
            Eigen::LDLT<MatrixXd> ldlt(Gp);
            VectorXd sp = ldlt.solve(hp);
            if (!sp.allFinite()) sp = psd_pinv_solve(Gp, hp, 1e-13);

            if (sp.minCoeff() > 0.0) {
                x.setZero();
                for (int a = 0; a < np; ++a) x(idx[a]) = sp(a);
                break;
            }
            double alpha = 1.0;
            for (int a = 0; a < np; ++a) {
                if (sp(a) <= 0.0) {
                    const double xa = x(idx[a]);
                    if (xa - sp(a) > 0.0) alpha = std::min(alpha, xa / (xa - sp(a)));
                }
            }
            for (int a = 0; a < np; ++a) {
                const int j = idx[a];
                x(j) += alpha * (sp(a) - x(j));
            }
            // drop variables pinned at zero
            for (int a = 0; a < np; ++a) {
                const int j = idx[a];
                if (x(j) < 1e-14 * hscale) {
                    x(j) = 0.0;
                    passive[j] = false;
                }
            }
        }
        w = h - G * x;
    }
    throw IterationLimit("nnls exceeded 3n outer iterations");
}

VectorXd nnls(const MatrixXd& A, const VectorXd& b) {
    require_finite(A, "design matrix");
    require_finite(b, "response");
    if (A.rows() != b.size()) throw DimensionMismatch("design rows != response length");
    return nnls_normal(A.transpose() * A, A.transpose() * b);
}

Rank1Factor rank1_factor(const MatrixXd& Z) {
    require_finite(Z, "matrix");
    if (Z.rows() < 1 || Z.cols() < 1) throw DimensionMismatch("empty matrix");
    Eigen::BDCSVD<MatrixXd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Rank1Factor f;
    f.sigma = svd.singularValues()(0);
    f.u = svd.matrixU().col(0);
    f.v = svd.matrixV().col(0);
    Eigen::Index arg = 0;
    f.v.cwiseAbs().maxCoeff(&arg);
    if (f.v(arg) < 0.0) {
        f.u = -f.u;
        f.v = -f.v;
    }
    return f;
}

MatrixXd procrustes_orthonormalize(const MatrixXd& V) {
    require_finite(V, "matrix");
    if (V.rows() < V.cols() || V.cols() < 1)
        throw DimensionMismatch("need N >= Q >= 1 for orthonormalization");
    Eigen::BDCSVD<MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-12 * sv(0))
        throw RankDeficient("matrix is numerically rank deficient");
    return svd.matrixU() * svd.matrixV().transpose();
}

namespace {

double sq_dist(const VectorXd& a, const VectorXd& b) { return (a - b).squaredNorm(); }

KmeansResult kmeans_once(const std::vector<VectorXd>& pts, int k, SeqRng& rng) {
    const int n = static_cast<int>(pts.size());
    std::vector<VectorXd> centroids;
    centroids.reserve(k);

    // k-means++ seeding
    centroids.push_back(pts[rng.below(n)]);
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = sq_dist(pts[i], centroids[0]);
            for (std::size_t j = 1; j < centroids.size(); ++j)
                best = std::min(best, sq_dist(pts[i], centroids[j]));
            d2[i] = best;
            total += best;
        }
        int pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total, acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.below(n));
        }
        centroids.push_back(pts[pick]);
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 200; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = sq_dist(pts[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(pts[i], centroids[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<int> counts(k, 0);
        std::vector<VectorXd> sums(k, VectorXd::Zero(pts[0].size()));
        for (int i = 0; i < n; ++i) {
            counts[labels[i]]++;
            sums[labels[i]] += pts[i];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centroids[c] = sums[c] / counts[c];
            } else {
                // re-seed an empty cluster at the farthest point
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = sq_dist(pts[i], centroids[labels[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centroids[c] = pts[far];
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
    }

    KmeansResult r;
    r.labels = std::move(labels);
    r.centroids = std::move(centroids);
    for (int i = 0; i < n; ++i) r.wcss += sq_dist(pts[i], r.centroids[r.labels[i]]);
    return r;
}

}  // namespace

KmeansResult kmeans(const std::vector<VectorXd>& points, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("kmeans needs k >= 1");
    if (static_cast<int>(points.size()) < k)
        throw ConfigError("kmeans needs at least k points");
    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 10; ++restart) {
        SeqRng rng(mix64(seed) ^ mix64(restart + 1));
        KmeansResult r = kmeans_once(points, k, rng);
        if (r.wcss < best.wcss) best = std::move(r);
    }
    return best;
}

}  // namespace netkernel
