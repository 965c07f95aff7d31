#include <doctest.h>

#include <cmath>
#include <map>

#include "netkernel/errors.hpp"
#include "netkernel/linsolve.hpp"
#include "netkernel/rng.hpp"

using namespace netkernel;

namespace {

MatrixXd seeded_matrix(int rows, int cols, std::uint64_t seed) {
    CounterRng rng(seed);
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal(i, j);
    return m;
}

VectorXd seeded_vector(int n, std::uint64_t seed) {
    CounterRng rng(seed ^ 0x76ull);
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal(i);
    return v;
}

}  // namespace

TEST_CASE("solve_ls identity system") {
    MatrixXd a = MatrixXd::Identity(2, 2);
    VectorXd b(2);
    b << 3, 4;
    const VectorXd x = solve_ls(a, b);
    CHECK(x(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(x(1) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("solve_ls min-norm splits an underdetermined row evenly") {
    MatrixXd a(1, 2);
    a << 1, 1;
    VectorXd b(1);
    b << 2;
    const VectorXd x = solve_ls(a, b, Regularizer::min_norm());
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_ls Tikhonov matches the hand-solved 2x2 normal equations") {
    MatrixXd a(3, 2);
    a << 1, 0, 0, 1, 1, 1;
    VectorXd b(3);
    b << 1, 1, 3;
    const double lambda = 0.1;
    // (A'A + 0.1 I) x = A'b solved by hand: A'A = [[2,1],[1,2]], A'b = (4,4)
    // => [[2.1,1],[1,2.1]] x = (4,4) => x = (4*1.1)/(2.1^2-1) ones
    const double expect = 4.0 * 1.1 / (2.1 * 2.1 - 1.0);
    const VectorXd x = solve_ls(a, b, Regularizer::tikhonov_id(lambda));
    CHECK(x(0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(x(1) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("solve_ls mode None rejects rank-deficient systems") {
    MatrixXd a(3, 2);
    a << 1, 1, 2, 2, 3, 3;
    VectorXd b(3);
    b << 1, 2, 3;
    CHECK_THROWS_AS(solve_ls(a, b), SingularSystem);
    CHECK_NOTHROW(solve_ls(a, b, Regularizer::min_norm()));
}

TEST_CASE("solve_ls rejects non-finite input") {
    MatrixXd a = MatrixXd::Identity(2, 2);
    VectorXd b(2);
    b << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_ls(a, b), NonFiniteInput);
}

TEST_CASE("Tikhonov solution approaches the min-norm solution as lambda -> 0") {
    // rank-deficient design: column 3 = column 1 + column 2
    MatrixXd a(6, 3);
    a.col(0) = seeded_vector(6, 1);
    a.col(1) = seeded_vector(6, 2);
    a.col(2) = a.col(0) + a.col(1);
    const VectorXd b = seeded_vector(6, 3);
    const VectorXd x_min = solve_ls(a, b, Regularizer::min_norm());
    for (double lambda : {1e-4, 1e-6, 1e-8}) {
        const VectorXd x = solve_ls(a, b, Regularizer::tikhonov_id(lambda));
        CHECK((x - x_min).norm() <= 10.0 * lambda * std::max(1.0, x_min.norm()));
    }
}

TEST_CASE("TikhonovGeneralized validates the penalty") {
    MatrixXd bad(2, 2);
    bad << 1, 0.5, -0.5, 1;  // not symmetric
    MatrixXd a = MatrixXd::Identity(2, 2);
    VectorXd b = VectorXd::Ones(2);
    CHECK_THROWS_AS(solve_ls(a, b, Regularizer::tikhonov(0.1, bad)), ConfigError);

    MatrixXd indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(solve_ls(a, b, Regularizer::tikhonov(0.1, indef)), ConfigError);

    MatrixXd psd(2, 2);
    psd << 1, 1, 1, 1;  // PSD with a zero eigenvalue: Cholesky fallback path
    CHECK_NOTHROW(solve_ls(a, b, Regularizer::tikhonov(0.1, psd)));
}

TEST_CASE("nnls clips the infeasible coordinate") {
    MatrixXd a = MatrixXd::Identity(2, 2);
    VectorXd b(2);
    b << 1, -1;
    const VectorXd x = nnls(a, b);
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x(1) == 0.0);
}

TEST_CASE("nnls returns the unconstrained optimum when it is feasible") {
    MatrixXd a = MatrixXd::Identity(3, 3);
    VectorXd b(3);
    b << 0.2, 0.5, 0.3;
    const VectorXd x = nnls(a, b);
    CHECK((x - b).norm() <= 1e-12);
}

TEST_CASE("nnls matches a brute-force grid search") {
    const MatrixXd a = seeded_matrix(3, 2, 42);
    const VectorXd b = seeded_vector(3, 43);
    const VectorXd x = nnls(a, b);

    // grid oracle over [0,2]^2 at step 1e-3
    double best = std::numeric_limits<double>::infinity();
    double bx = 0, by = 0;
    for (int i = 0; i <= 2000; ++i) {
        for (int j = 0; j <= 2000; ++j) {
            VectorXd cand(2);
            cand << i * 1e-3, j * 1e-3;
            const double r = (a * cand - b).squaredNorm();
            if (r < best) {
                best = r;
                bx = cand(0);
                by = cand(1);
            }
        }
    }
    CHECK(std::abs(x(0) - bx) <= 2e-3);
    CHECK(std::abs(x(1) - by) <= 2e-3);
}

TEST_CASE("nnls satisfies the active-set optimality conditions") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MatrixXd a = seeded_matrix(12, 5, 100 + seed);
        const VectorXd b = seeded_vector(12, 200 + seed);
        const VectorXd x = nnls(a, b);
        REQUIRE(x.minCoeff() >= 0.0);
        const VectorXd w = a.transpose() * (b - a * x);
        const double tol = 1e-8 * (a.transpose() * b).norm();
        for (int j = 0; j < 5; ++j) {
            if (x(j) > 0.0)
                CHECK(std::abs(w(j)) <= tol);
            else
                CHECK(w(j) <= tol);
        }
    }
}

TEST_CASE("nnls equals unconstrained LS when the optimum is interior") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MatrixXd a = seeded_matrix(10, 4, 300 + seed);
        VectorXd x_true(4);
        for (int k = 0; k < 4; ++k) x_true(k) = 0.5 + 0.1 * k;
        const VectorXd b = a * x_true;  // consistent, interior optimum
        const VectorXd x_nnls = nnls(a, b);
        const VectorXd x_ls = solve_ls(a, b);
        CHECK((x_nnls - x_ls).norm() <= 1e-10 * std::max(1.0, x_ls.norm()));
    }
}

TEST_CASE("rank1_factor on an axis-aligned rank-1 matrix") {
    MatrixXd z = MatrixXd::Zero(3, 3);
    z(0, 0) = 2.0;
    const Rank1Factor f = rank1_factor(z);
    CHECK(f.sigma == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(f.u(0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.v(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.u(0) > 0.0);  // sign fixed through v's largest entry
}

TEST_CASE("rank1_factor recovers an exact outer product") {
    VectorXd a(2), c(3);
    a << 0.6, 0.8;
    c << 1, 2, 2;
    const Rank1Factor f = rank1_factor(a * c.transpose());
    CHECK(f.sigma == doctest::Approx(3.0).epsilon(1e-13));
    CHECK((f.u - a).norm() <= 1e-12);
    CHECK((f.v - c / 3.0).norm() <= 1e-12);
}

TEST_CASE("rank1_factor is stable under a small perturbation") {
    const VectorXd a = seeded_vector(5, 7).normalized();
    const VectorXd c = seeded_vector(4, 8).normalized();
    MatrixXd z = 1.7 * a * c.transpose() + 1e-6 * seeded_matrix(5, 4, 9);
    const Rank1Factor f = rank1_factor(z);

    // full-SVD oracle
    Eigen::JacobiSVD<MatrixXd> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    CHECK(f.sigma == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
    const double angle_u = std::acos(std::min(1.0, std::abs(f.u.dot(a))));
    const double angle_v = std::acos(std::min(1.0, std::abs(f.v.dot(c))));
    CHECK(angle_u <= 1e-5);
    CHECK(angle_v <= 1e-5);
    // reconstruction error equals the second singular value
    CHECK((z - f.sigma * f.u * f.v.transpose()).operatorNorm() ==
          doctest::Approx(svd.singularValues()(1)).epsilon(1e-8));
}

TEST_CASE("rank1_factor reproduces sigma u v' exactly up to the sign convention") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        VectorXd u = seeded_vector(4, 500 + seed).normalized();
        VectorXd v = seeded_vector(6, 600 + seed).normalized();
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
            u = -u;
        }
        const double sigma = 0.5 + seed;
        const Rank1Factor f = rank1_factor(sigma * u * v.transpose());
        CHECK(f.sigma == doctest::Approx(sigma).epsilon(1e-12));
        CHECK((f.u - u).norm() <= 1e-10);
        CHECK((f.v - v).norm() <= 1e-10);
    }
}

TEST_CASE("procrustes keeps orthonormal input unchanged") {
    MatrixXd v = seeded_matrix(5, 2, 11);
    const MatrixXd q = procrustes_orthonormalize(v);
    const MatrixXd q2 = procrustes_orthonormalize(q);
    CHECK((q2 - q).norm() <= 1e-12);
    CHECK((q.transpose() * q - MatrixXd::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("procrustes removes pure column scaling") {
    MatrixXd v = MatrixXd::Zero(5, 2);
    v(0, 0) = 2.0;
    v(1, 1) = 2.0;
    const MatrixXd q = procrustes_orthonormalize(v);
    MatrixXd expect = MatrixXd::Zero(5, 2);
    expect(0, 0) = 1.0;
    expect(1, 1) = 1.0;
    CHECK((q - expect).norm() <= 1e-12);
}

TEST_CASE("procrustes output is the Frobenius-nearest frame (scan oracle)") {
    const MatrixXd v = seeded_matrix(4, 2, 12);
    const MatrixXd q = procrustes_orthonormalize(v);
    const double dist = (q - v).norm();

    // random frames plus 1e-2-step geodesic perturbations of the candidate
    CounterRng rng(13);
    double best_other = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20000; ++t) {
        MatrixXd g(4, 2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = rng.normal(t, i, j);
        const MatrixXd frame = procrustes_orthonormalize(g);
        best_other = std::min(best_other, (frame - v).norm());
    }
    for (int t = 0; t < 400; ++t) {
        MatrixXd dir(4, 2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) dir(i, j) = rng.normal(90000 + t, i, j);
        for (double step : {-1e-2, 1e-2}) {
            const MatrixXd frame = procrustes_orthonormalize(q + step * dir);
            best_other = std::min(best_other, (frame - v).norm());
        }
    }
    CHECK(dist <= best_other + 1e-8);
}

TEST_CASE("procrustes rejects rank-deficient input") {
    MatrixXd v(4, 2);
    v.col(0) = seeded_vector(4, 14);
    v.col(1) = 2.0 * v.col(0);
    CHECK_THROWS_AS(procrustes_orthonormalize(v), RankDeficient);
}

TEST_CASE("kmeans separates two well-spaced 1-d clusters") {
    std::vector<VectorXd> pts;
    for (double x : {0.0, 0.1, 10.0, 10.1}) {
        VectorXd v(1);
        v << x;
        pts.push_back(v);
    }
    const KmeansResult r = kmeans(pts, 2, 5);
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[2] == r.labels[3]);
    CHECK(r.labels[0] != r.labels[2]);
    std::vector<double> cents = {r.centroids[0](0), r.centroids[1](0)};
    std::sort(cents.begin(), cents.end());
    CHECK(cents[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(cents[1] == doctest::Approx(10.05).epsilon(1e-12));
}

TEST_CASE("kmeans with K equal to the point count gives zero WCSS") {
    std::vector<VectorXd> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(seeded_vector(2, 700 + i));
    const KmeansResult r = kmeans(pts, 5, 1);
    CHECK(r.wcss <= 1e-20);
    std::vector<bool> used(5, false);
    for (int lab : r.labels) used[lab] = true;
    for (bool u : used) CHECK(u);
}

TEST_CASE("kmeans K=2 matches the exhaustive two-partition minimizer") {
    std::vector<VectorXd> pts;
    CounterRng rng(21);
    for (int i = 0; i < 20; ++i) {
        VectorXd v(2);
        const double cx = i < 10 ? 0.0 : 2.2;
        v << cx + 0.7 * rng.normal(i, 0), 0.7 * rng.normal(i, 1);
        pts.push_back(v);
    }
    const KmeansResult r = kmeans(pts, 2, 3);

    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << 19); ++mask) {  // point 0 fixed in cluster 0
        VectorXd s0 = VectorXd::Zero(2), s1 = VectorXd::Zero(2);
        int n0 = 0, n1 = 0;
        for (int i = 0; i < 20; ++i) {
            const bool in1 = i > 0 && ((mask >> (i - 1)) & 1u);
            if (in1) {
                s1 += pts[i];
                ++n1;
            } else {
                s0 += pts[i];
                ++n0;
            }
        }
        if (n1 == 0) continue;
        const VectorXd c0 = s0 / n0, c1 = s1 / n1;
        double wcss = 0.0;
        for (int i = 0; i < 20; ++i) {
            const bool in1 = i > 0 && ((mask >> (i - 1)) & 1u);
            wcss += (pts[i] - (in1 ? c1 : c0)).squaredNorm();
        }
        best = std::min(best, wcss);
    }
    CHECK(r.wcss == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("kmeans labels are invariant to translation and positive scaling") {
    std::vector<VectorXd> pts, moved;
    CounterRng rng(31);
    VectorXd shift(3);
    shift << 5.0, -2.0, 1.0;
    for (int i = 0; i < 30; ++i) {
        VectorXd v(3);
        for (int k = 0; k < 3; ++k) v(k) = rng.normal(i, k) + (i % 3) * 4.0;
        pts.push_back(v);
        moved.push_back(3.7 * v + shift);
    }
    const KmeansResult r1 = kmeans(pts, 3, 9);
    const KmeansResult r2 = kmeans(moved, 3, 9);
    // same partition up to label permutation
    std::map<int, int> perm;
    for (int i = 0; i < 30; ++i) {
        auto it = perm.find(r1.labels[i]);
        if (it == perm.end())
            perm[r1.labels[i]] = r2.labels[i];
        else
            CHECK(it->second == r2.labels[i]);
    }
}

TEST_CASE("lcurve_select returns a grid lambda") {
    const MatrixXd a = seeded_matrix(20, 4, 51);
    const MatrixXd g = a.transpose() * a;
    const VectorXd h = a.transpose() * seeded_vector(20, 52);
    const double lambda = lcurve_select(g, h, seeded_vector(20, 52).squaredNorm());
    CHECK(lambda > 0.0);
    CHECK(lambda <= g.cwiseAbs().maxCoeff());
}
