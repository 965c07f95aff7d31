#include <doctest.h>

#include <cmath>

#include "netkernel/errors.hpp"
#include "netkernel/model.hpp"
#include "netkernel/presets.hpp"
#include "netkernel/rng.hpp"

using namespace netkernel;

namespace {

MatrixXd seeded_state(int n, int d, std::uint64_t seed, double lo = 0.2, double hi = 1.5) {
    CounterRng rng(seed);
    MatrixXd x(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) x(i, k) = rng.uniform_in(lo, hi, i, k);
    return x;
}

// identity-like radial kernel: psi(r) = r lifted along x/|x| gives Phi(x) = x
BasisSpec identity_basis(int d) {
    BasisSpec b;
    b.kind = BasisSpec::Kind::RadialLift;
    b.dim = d;
    b.functions.push_back(
        BasisFunction::power_law(1.0, 0.0, std::numeric_limits<double>::infinity()));
    return b;
}

}  // namespace

TEST_CASE("truncated power-law kernel hits 1 at unit radius") {
    const BasisSpec basis = presets::lj_basis(true, 2);
    const KernelCoef coef{presets::lj_coef(true)};
    VectorXd x(2);
    x << std::sqrt(0.5), std::sqrt(0.5);  // |x| = 1
    const VectorXd phi = eval_kernel(basis, coef, x);
    // -1/3 + 4/3 = 1, so the output is x itself
    CHECK((phi - x).norm() <= 1e-12);
}

TEST_CASE("zero coefficients give a zero kernel") {
    const BasisSpec basis = presets::lj_basis(true, 2);
    const KernelCoef coef{VectorXd::Zero(10)};
    VectorXd x(2);
    x << 0.3, -0.8;
    CHECK(eval_kernel(basis, coef, x).norm() == 0.0);
}

TEST_CASE("scalar sine kernel at pi/2") {
    BasisSpec b;
    b.kind = BasisSpec::Kind::DirectScalar;
    b.dim = 1;
    b.functions.push_back(BasisFunction::sin_fn(1));
    VectorXd x(1);
    x << M_PI / 2.0;
    const VectorXd v = eval_kernel(b, KernelCoef{VectorXd::Ones(1)}, x);
    CHECK(v(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kernel vanishes below the singular cutoff") {
    const BasisSpec basis = presets::lj_basis(false, 2);
    const KernelCoef coef{presets::lj_coef(false)};
    VectorXd x = VectorXd::Zero(2);
    CHECK(eval_kernel(basis, coef, x).norm() == 0.0);
    x << 1e-15, 0.0;
    CHECK(eval_kernel(basis, coef, x).norm() == 0.0);
}

TEST_CASE("drift is zero for a zero weight matrix") {
    const BasisSpec basis = presets::lj_basis(false, 2);
    const WeightMatrix a{MatrixXd::Zero(4, 4)};
    const MatrixXd x = seeded_state(4, 2, 5);
    CHECK(drift(a, basis, KernelCoef{presets::lj_coef(false)}, x).norm() == 0.0);
}

TEST_CASE("two-agent drift with the identity kernel is the state difference") {
    MatrixXd aw = MatrixXd::Zero(2, 2);
    aw(0, 1) = 1.0;
    const WeightMatrix a{aw};
    const BasisSpec basis = identity_basis(1);
    MatrixXd x(2, 1);
    x << 0.3, 1.1;
    const MatrixXd d = drift(a, basis, KernelCoef{VectorXd::Ones(1)}, x);
    CHECK(d(0, 0) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d(1, 0) == 0.0);
}

TEST_CASE("drift matches an independent double-loop evaluation") {
    const BasisSpec basis = presets::lj_basis(true, 2);
    const KernelCoef coef{presets::lj_coef(true)};
    const WeightMatrix a = sample_weight_matrix(3, 2, 17);
    const MatrixXd x = seeded_state(3, 2, 6);
    const MatrixXd got = drift(a, basis, coef, x);

    MatrixXd want = MatrixXd::Zero(3, 2);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            VectorXd diff = x.row(j) - x.row(i);
            const double r = diff.norm();
            double phi = 0.0;
            for (int k = 0; k < basis.p(); ++k)
                phi += coef.c(k) * basis.functions[k](r);
            want.row(i) += a.entries(i, j) * (phi / r) * diff.transpose();
        }
    }
    CHECK((got - want).norm() <= 1e-13 * want.norm());
}

TEST_CASE("sampled weight matrices satisfy the admissible-set invariants") {
    for (int degree : {1, 2, 5}) {
        const WeightMatrix a = sample_weight_matrix(6, degree, 99);
        a.validate();
        for (int i = 0; i < 6; ++i) {
            int nnz = 0;
            for (int j = 0; j < 6; ++j) nnz += a.entries(i, j) > 0.0;
            CHECK(nnz == degree);
        }
    }
}

TEST_CASE("full-degree sampling fills every off-diagonal slot") {
    const WeightMatrix a = sample_weight_matrix(5, 4, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) CHECK(a.entries(i, j) > 0.0);
}

TEST_CASE("weight sampling is reproducible bit for bit") {
    const WeightMatrix a1 = sample_weight_matrix(6, 2, 7);
    const WeightMatrix a2 = sample_weight_matrix(6, 2, 7);
    CHECK(a1.entries == a2.entries);
    const WeightMatrix a3 = sample_weight_matrix(6, 2, 8);
    CHECK(a1.entries != a3.entries);
}

TEST_CASE("weight sampling rejects out-of-range degrees") {
    CHECK_THROWS_AS(sample_weight_matrix(6, 0, 1), DegreeOutOfRange);
    CHECK_THROWS_AS(sample_weight_matrix(6, 6, 1), DegreeOutOfRange);
}

TEST_CASE("weight matrix validation catches broken invariants") {
    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(WeightMatrix{bad}.validate(), DataError);
    bad.setZero();
    bad(0, 1) = 0.5;  // row norm != 1
    CHECK_THROWS_AS(WeightMatrix{bad}.validate(), DataError);
    bad(0, 1) = 1.0;
    CHECK_NOTHROW(WeightMatrix{bad}.validate());  // zero second row is flagged, not an error
    CHECK(WeightMatrix{bad}.zero_rows()[1]);
    CHECK_FALSE(WeightMatrix{bad}.zero_rows()[0]);
}

TEST_CASE("kernel scaling commutes with the drift (identifiability gauge)") {
    const BasisSpec basis = presets::lj_basis(false, 2);
    const VectorXd c = presets::lj_coef(false);
    const WeightMatrix a = sample_weight_matrix(5, 2, 21);
    const MatrixXd x = seeded_state(5, 2, 22);
    for (double lambda : {0.5, 2.0, 13.7}) {
        const MatrixXd d1 = drift(a, basis, KernelCoef{VectorXd(lambda * c)}, x);
        const MatrixXd d2 = lambda * drift(a, basis, KernelCoef{c}, x);
        CHECK((d1 - d2).norm() <= 1e-14 * d2.norm());
    }
}

TEST_CASE("radial-lift kernels are odd") {
    const BasisSpec basis = presets::lj_basis(true, 2);
    const KernelCoef coef{presets::lj_coef(true)};
    CounterRng rng(31);
    for (int t = 0; t < 20; ++t) {
        VectorXd x(2);
        x << rng.uniform_in(0.1, 2.0, t, 0), rng.uniform_in(-1.0, 1.0, t, 1);
        const VectorXd plus = eval_kernel(basis, coef, x);
        const VectorXd minus = eval_kernel(basis, coef, VectorXd(-x));
        CHECK((plus + minus).norm() <= 1e-13 * (plus.norm() + 1e-300));
    }
}

TEST_CASE("drift is translation invariant") {
    const BasisSpec basis = presets::lj_basis(false, 2);
    const KernelCoef coef{presets::lj_coef(false)};
    const WeightMatrix a = sample_weight_matrix(4, 2, 41);
    const MatrixXd x = seeded_state(4, 2, 42);
    MatrixXd shifted = x;
    shifted.col(0).array() += 3.25;
    shifted.col(1).array() -= 1.5;
    const MatrixXd d1 = drift(a, basis, coef, x);
    const MatrixXd d2 = drift(a, basis, coef, shifted);
    CHECK((d1 - d2).norm() <= 1e-12 * (d1.norm() + 1e-300));
}

TEST_CASE("multitype drift reduces to the plain drift when all columns agree") {
    const BasisSpec basis = presets::lj_basis(false, 2);
    const VectorXd c = presets::lj_coef(false);
    const WeightMatrix a = sample_weight_matrix(4, 2, 51);
    const MatrixXd x = seeded_state(4, 2, 52);
    MatrixXd cmat(3, 4);
    for (int i = 0; i < 4; ++i) cmat.col(i) = c;
    const MatrixXd d1 = drift_multitype(a, basis, cmat, x);
    const MatrixXd d2 = drift(a, basis, KernelCoef{c}, x);
    CHECK((d1 - d2).norm() == 0.0);
}

TEST_CASE("spline and tabulated functions interpolate their knots") {
    const std::vector<double> vals = {0.0, 1.0, -1.0, 0.5};
    const auto spline = BasisFunction::spline({0.0, 1.0, 2.0, 3.0}, vals);
    const auto tab = BasisFunction::tabulated({0.0, 1.0, 2.0, 3.0}, vals);
    for (int k = 0; k < 4; ++k) {
        CHECK(spline(double(k)) == doctest::Approx(vals[k]).epsilon(1e-12));
        CHECK(tab(double(k)) == doctest::Approx(vals[k]).epsilon(1e-12));
    }
    CHECK(spline(-0.5) == 0.0);  // zero outside the knot range
    CHECK(tab(3.5) == 0.0);
    CHECK(tab(0.5) == doctest::Approx(0.5).epsilon(1e-12));  // linear between knots
}

TEST_CASE("indicator supports are half open") {
    const auto ind = BasisFunction::indicator(0.5, 1.0);
    CHECK(ind(0.5) == 1.0);
    CHECK(ind(1.0) == 0.0);
    CHECK(ind(0.999999) == 1.0);
}
