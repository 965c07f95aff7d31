#include "netkernel/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "netkernel/errors.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

std::vector<bool> WeightMatrix::zero_rows() const {
    std::vector<bool> out(size());
    for (int i = 0; i < size(); ++i) out[i] = entries.row(i).norm() == 0.0;
    return out;
}

void WeightMatrix::validate() const {
    const int n = size();
    if (entries.cols() != n) throw DataError("weight matrix must be square");
    if (!entries.allFinite()) throw DataError("weight matrix has non-finite entries");
    for (int i = 0; i < n; ++i) {
        if (entries(i, i) != 0.0) throw DataError("weight matrix diagonal must be zero");
        const double rn = entries.row(i).norm();
        if (rn != 0.0 && std::abs(rn - 1.0) > 1e-10)
            throw DataError("weight matrix rows must have unit l2 norm or be zero");
        for (int j = 0; j < n; ++j) {
            if (entries(i, j) < -1e-12 || entries(i, j) > 1.0 + 1e-12)
                throw DataError("weight matrix entries must lie in [0,1]");
        }
    }
}

WeightMatrix WeightMatrix::normalized(MatrixXd raw) {
    const int n = static_cast<int>(raw.rows());
    for (int i = 0; i < n; ++i) {
        raw(i, i) = 0.0;
        const double rn = raw.row(i).norm();
        if (rn > 0.0) raw.row(i) /= rn;
    }
    return WeightMatrix{std::move(raw)};
}

WeightMatrix sample_weight_matrix(int n, int degree, std::uint64_t seed) {
    if (degree < 1 || degree > n - 1)
        throw DegreeOutOfRange("degree must lie in [1, N-1]");
    CounterRng rng(seed);
    MatrixXd a = MatrixXd::Zero(n, n);
    std::vector<int> pool(n - 1);
    for (int i = 0; i < n; ++i) {
        int idx = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) pool[idx++] = j;
        // partial Fisher-Yates over the candidate neighbors
        for (int s = 0; s < degree; ++s) {
            const int pick = s + static_cast<int>(rng.below(n - 1 - s, i, s, 0));
            std::swap(pool[s], pool[pick]);
            a(i, pool[s]) = rng.uniform(i, s, 1);
        }
    }
    return WeightMatrix::normalized(std::move(a));
}

double BasisFunction::operator()(double r) const {
    switch (kind) {
        case Kind::PowerLaw:
            if (r < support_lo || r >= support_hi) return 0.0;
            return std::pow(r, exponent);
        case Kind::Indicator:
            return (r >= support_lo && r < support_hi) ? 1.0 : 0.0;
        case Kind::Sin:
            return std::sin(frequency * r);
        case Kind::Cos:
            return std::cos(frequency * r);
        case Kind::Spline: {
            // natural cubic interpolation through (knots, coefs), zero outside
            const std::size_t n = knots.size();
            if (n < 2 || r < knots.front() || r > knots.back()) return 0.0;
            // second derivatives by the classic tridiagonal sweep
            std::vector<double> m(n, 0.0), u(n, 0.0);
            std::vector<double> diag(n, 0.0);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double h0 = knots[i] - knots[i - 1];
                const double h1 = knots[i + 1] - knots[i];
                const double sig = h0 / (h0 + h1);
                const double pp = sig * m[i - 1] + 2.0;
                m[i] = (sig - 1.0) / pp;
                u[i] = (coefs[i + 1] - coefs[i]) / h1 - (coefs[i] - coefs[i - 1]) / h0;
                u[i] = (6.0 * u[i] / (h0 + h1) - sig * u[i - 1]) / pp;
            }
            diag[n - 1] = 0.0;
            for (std::size_t i = n - 1; i-- > 0;) diag[i] = m[i] * diag[i + 1] + u[i];
            auto it = std::upper_bound(knots.begin(), knots.end(), r);
            std::size_t hi = std::min<std::size_t>(it - knots.begin(), n - 1);
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            const double h = knots[hi] - knots[lo];
            const double a = (knots[hi] - r) / h;
            const double b = (r - knots[lo]) / h;
            return a * coefs[lo] + b * coefs[hi] +
                   ((a * a * a - a) * diag[lo] + (b * b * b - b) * diag[hi]) * (h * h) / 6.0;
        }
        case Kind::Tabulated: {
            const std::size_t n = knots.size();
            if (n < 2 || r < knots.front() || r > knots.back()) return 0.0;
            auto it = std::upper_bound(knots.begin(), knots.end(), r);
            std::size_t hi = std::min<std::size_t>(it - knots.begin(), n - 1);
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            const double t = (r - knots[lo]) / (knots[hi] - knots[lo]);
            return (1.0 - t) * coefs[lo] + t * coefs[hi];
        }
    }
    return 0.0;
}

BasisFunction BasisFunction::power_law(double exponent, double lo, double hi) {
    BasisFunction f;
    f.kind = Kind::PowerLaw;
    f.exponent = exponent;
    f.support_lo = lo;
    f.support_hi = hi;
    return f;
}

BasisFunction BasisFunction::indicator(double lo, double hi) {
    BasisFunction f;
    f.kind = Kind::Indicator;
    f.support_lo = lo;
    f.support_hi = hi;
    return f;
}

BasisFunction BasisFunction::sin_fn(int frequency) {
    BasisFunction f;
    f.kind = Kind::Sin;
    f.frequency = frequency;
    return f;
}

BasisFunction BasisFunction::cos_fn(int frequency) {
    BasisFunction f;
    f.kind = Kind::Cos;
    f.frequency = frequency;
    return f;
}

BasisFunction BasisFunction::spline(std::vector<double> knots, std::vector<double> coefs) {
    if (knots.size() != coefs.size() || knots.size() < 2)
        throw ConfigError("spline needs matching knots/coefs with at least 2 points");
    if (!std::is_sorted(knots.begin(), knots.end()))
        throw ConfigError("spline knots must be increasing");
    BasisFunction f;
    f.kind = Kind::Spline;
    f.knots = std::move(knots);
    f.coefs = std::move(coefs);
    return f;
}

BasisFunction BasisFunction::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw ConfigError("tabulated needs matching grid/values with at least 2 points");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ConfigError("tabulated grid must be increasing");
    BasisFunction f;
    f.kind = Kind::Tabulated;
    f.knots = std::move(grid);
    f.coefs = std::move(values);
    return f;
}

void BasisSpec::validate() const {
    if (functions.empty()) throw ConfigError("basis needs at least one function");
    if (singular_cutoff <= 0.0) throw ConfigError("singular_cutoff must be positive");
    if (kind == Kind::DirectScalar && dim != 1)
        throw ConfigError("DirectScalar basis requires dim = 1");
    if (kind == Kind::RadialLift && dim < 1)
        throw ConfigError("RadialLift basis requires dim >= 1");
}

VectorXd BasisSpec::eval(int k, const VectorXd& x) const {
    if (x.size() != dim) throw DimensionMismatch("state difference has wrong dimension");
    if (kind == Kind::DirectScalar) {
        VectorXd out(1);
        out(0) = functions[k](x(0));
        return out;
    }
    const double r = x.norm();
    if (r <= singular_cutoff) return VectorXd::Zero(dim);
    return (functions[k](r) / r) * x;
}

MatrixXd BasisSpec::eval_all(const VectorXd& x) const {
    if (x.size() != dim) throw DimensionMismatch("state difference has wrong dimension");
    MatrixXd out(dim, p());
    if (kind == Kind::DirectScalar) {
        for (int k = 0; k < p(); ++k) out(0, k) = functions[k](x(0));
        return out;
    }
    const double r = x.norm();
    if (r <= singular_cutoff) {
        out.setZero();
        return out;
    }
    const VectorXd dir = x / r;
    for (int k = 0; k < p(); ++k) out.col(k) = functions[k](r) * dir;
    return out;
}

void BasisSpec::eval_radial(double r, double* out) const {
    for (int k = 0; k < p(); ++k) out[k] = functions[k](r);
}

VectorXd eval_kernel(const BasisSpec& basis, const KernelCoef& coef, const VectorXd& x) {
    if (coef.c.size() != basis.p())
        throw DimensionMismatch("coefficient length != basis size");
    if (basis.kind == BasisSpec::Kind::DirectScalar) {
        if (x.size() != 1) throw DimensionMismatch("DirectScalar kernel expects dim 1");
        double v = 0.0;
        for (int k = 0; k < basis.p(); ++k) v += coef.c(k) * basis.functions[k](x(0));
        VectorXd out(1);
        out(0) = v;
        return out;
    }
    if (x.size() != basis.dim) throw DimensionMismatch("state difference has wrong dimension");
    const double r = x.norm();
    if (r <= basis.singular_cutoff) return VectorXd::Zero(basis.dim);
    double v = 0.0;
    for (int k = 0; k < basis.p(); ++k) v += coef.c(k) * basis.functions[k](r);
    return (v / r) * x;
}

namespace {

// shared pairwise accumulation: row i += sum_j a_ij * phi_i(X^j - X^i)
template <typename CoefForRow>
MatrixXd drift_impl(const WeightMatrix& a, const BasisSpec& basis, const MatrixXd& X,
                    CoefForRow coef_for_row) {
    const int n = a.size();
    const int d = static_cast<int>(X.cols());
    if (X.rows() != n) throw DimensionMismatch("state rows != number of agents");
    if (d != basis.dim) throw DimensionMismatch("state dim != basis dim");
    MatrixXd out = MatrixXd::Zero(n, d);
    std::vector<double> psi(basis.p());
    VectorXd diff(d);
    for (int i = 0; i < n; ++i) {
        const double* ci = coef_for_row(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double aij = a.entries(i, j);
            if (aij == 0.0) continue;
            diff = X.row(j) - X.row(i);
            if (basis.kind == BasisSpec::Kind::DirectScalar) {
                double v = 0.0;
                basis.eval_radial(diff(0), psi.data());
                for (int k = 0; k < basis.p(); ++k) v += ci[k] * psi[k];
                out(i, 0) += aij * v;
            } else {
                const double r = diff.norm();
                if (r <= basis.singular_cutoff) continue;
                basis.eval_radial(r, psi.data());
                double v = 0.0;
                for (int k = 0; k < basis.p(); ++k) v += ci[k] * psi[k];
                out.row(i) += (aij * v / r) * diff.transpose();
            }
        }
    }
    return out;
}

}  // namespace

MatrixXd drift(const WeightMatrix& a, const BasisSpec& basis, const KernelCoef& coef,
               const MatrixXd& X) {
    if (coef.c.size() != basis.p())
        throw DimensionMismatch("coefficient length != basis size");
    const double* c = coef.c.data();
    return drift_impl(a, basis, X, [c](int) { return c; });
}

MatrixXd drift_multitype(const WeightMatrix& a, const BasisSpec& basis, const MatrixXd& cmat,
                         const MatrixXd& X) {
    if (cmat.rows() != basis.p() || cmat.cols() != a.size())
        throw DimensionMismatch("coefficient matrix must be p x N");
    return drift_impl(a, basis, X, [&cmat](int i) { return cmat.col(i).data(); });
}

void SystemSpec::validate() const {
    if (n_agents < 2) throw ConfigError("system needs at least 2 agents");
    if (dim < 1) throw ConfigError("state dimension must be >= 1");
    if (n_steps < 1) throw ConfigError("need at least one time step");
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (init == Init::UniformBox && init_b < init_a)
        throw ConfigError("uniform init needs lo <= hi");
    if (init == Init::Gaussian && init_b < 0.0)
        throw ConfigError("gaussian init needs std >= 0");
}

std::uint64_t matrix_hash(const MatrixXd& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
    const std::size_t n = sizeof(double) * static_cast<std::size_t>(m.size());
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace netkernel
