#include "netkernel/tensors.hpp"

#include <cmath>

#include "netkernel/errors.hpp"
#include "netkernel/parallel.hpp"

namespace netkernel {

namespace {

// Evaluations of all basis functions at every ordered pair difference of one
// state slice, stored as column-major d x p blocks per (i, j). Radial bases
// are odd in the difference, so each unordered pair is evaluated once.
struct PairEvals {
    int n = 0, d = 0, p = 0;
    std::vector<double> buf;

    void reset(int n_, int d_, int p_) {
        n = n_;
        d = d_;
        p = p_;
        buf.assign(static_cast<std::size_t>(n) * n * d * p, 0.0);
    }
    double* block(int i, int j) {
        return buf.data() + (static_cast<std::size_t>(i) * n + j) * d * p;
    }
    const double* block(int i, int j) const {
        return buf.data() + (static_cast<std::size_t>(i) * n + j) * d * p;
    }
};

void fill_pair_evals(const BasisSpec& basis, const MatrixXd& X, PairEvals& pe,
                     std::vector<double>& psi_scratch) {
    const int n = static_cast<int>(X.rows());
    const int d = basis.dim;
    const int p = basis.p();
    pe.reset(n, d, p);
    psi_scratch.resize(p);
    const bool radial = basis.kind == BasisSpec::Kind::RadialLift;
    VectorXd diff(d);
    for (int i = 0; i < n; ++i) {
        for (int j = radial ? i + 1 : 0; j < n; ++j) {
            if (j == i) continue;
            diff = X.row(j) - X.row(i);
            double* blk = pe.block(i, j);
            if (radial) {
                const double r = diff.norm();
                double* blk_ji = pe.block(j, i);
                if (r <= basis.singular_cutoff) continue;  // both blocks stay zero
                basis.eval_radial(r, psi_scratch.data());
                for (int k = 0; k < p; ++k) {
                    const double scale = psi_scratch[k] / r;
                    for (int dim = 0; dim < d; ++dim) {
                        const double v = scale * diff(dim);
                        blk[k * d + dim] = v;
                        blk_ji[k * d + dim] = -v;  // psi(r_ji) = -psi(r_ij)
                    }
                }
            } else {
                basis.eval_radial(diff(0), psi_scratch.data());
                for (int k = 0; k < p; ++k) blk[k * d] = psi_scratch[k];
            }
        }
    }
}

void check_inputs(const TrajectoryData& data, const BasisSpec& basis) {
    data.validate();
    basis.validate();
    if (basis.dim != data.dim()) throw DimensionMismatch("basis dim != data dim");
}

}  // namespace

BasisTensor build_basis_tensor(const BasisSpec& basis, const MatrixXd& X) {
    basis.validate();
    const int n = static_cast<int>(X.rows());
    const int d = basis.dim;
    const int p = basis.p();
    if (X.cols() != d) throw DimensionMismatch("state dim != basis dim");
    BasisTensor t;
    t.n = n;
    t.d = d;
    t.p = p;
    t.values.assign(static_cast<std::size_t>(n) * n * d * p, 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (j == i) continue;
            const MatrixXd vals = basis.eval_all(X.row(j) - X.row(i));  // d x p
            for (int dim = 0; dim < d; ++dim)
                for (int k = 0; k < p; ++k)
                    t.values[((static_cast<std::size_t>(j) * n + i) * d + dim) * p + k] =
                        vals(dim, k);
        }
    }
    return t;
}

std::vector<std::vector<MatrixXd>> increments(const TrajectoryData& data) {
    data.validate();
    const int m_count = data.n_traj();
    const int steps = data.n_steps();
    std::vector<std::vector<MatrixXd>> out(m_count);
    for (int m = 0; m < m_count; ++m) {
        out[m].reserve(steps);
        for (int l = 0; l < steps; ++l)
            out[m].push_back((data.states[m][l + 1] - data.states[m][l]) / data.dt);
    }
    return out;
}

SensingStats assemble_sensing_stats(const TrajectoryData& data, const BasisSpec& basis) {
    check_inputs(data, basis);
    const int n = data.n_agents();
    const int d = data.dim();
    const int p = basis.p();
    const int L = data.n_steps();
    const int M = data.n_traj();
    const int q = (n - 1) * p;

    SensingStats st;
    st.n = n;
    st.d = d;
    st.p = p;
    st.L = L;
    st.M = M;
    st.dt = data.dt;
    st.per_agent.assign(n, SensingNormal{MatrixXd::Zero(q, q), VectorXd::Zero(q), 0.0});

    // Parallel over agents: each agent runs its own sequential (m, l) stream,
    // so the accumulation order never depends on the thread count.
    parallel_for(n, [&](std::size_t ui) {
        const int i = static_cast<int>(ui);
        SensingNormal& sn = st.per_agent[i];
        MatrixXd psi(d, q);  // row block of the sensing design at one (m, l)
        VectorXd y(d);
        std::vector<double> scratch(p);
        VectorXd diff(d);
        const bool radial = basis.kind == BasisSpec::Kind::RadialLift;
        for (int m = 0; m < M; ++m) {
            const auto& traj = data.states[m];
            for (int l = 0; l < L; ++l) {
                const MatrixXd& X = traj[l];
                psi.setZero();
                int jj = 0;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    diff = X.row(j) - X.row(i);
                    if (radial) {
                        const double r = diff.norm();
                        if (r > basis.singular_cutoff) {
                            basis.eval_radial(r, scratch.data());
                            for (int k = 0; k < p; ++k)
                                psi.col(jj * p + k) = (scratch[k] / r) * diff;
                        }
                    } else {
                        basis.eval_radial(diff(0), scratch.data());
                        for (int k = 0; k < p; ++k) psi(0, jj * p + k) = scratch[k];
                    }
                    ++jj;
                }
                y = (traj[l + 1].row(i) - X.row(i)).transpose() / data.dt;
                sn.G.selfadjointView<Eigen::Lower>().rankUpdate(psi.transpose(), 1.0);
                sn.h.noalias() += psi.transpose() * y;
                sn.s += y.squaredNorm();
            }
        }
        sn.G.triangularView<Eigen::Upper>() = sn.G.transpose();
    });
    return st;
}

void graph_normal_from_sensing(const SensingNormal& sn, const VectorXd& c, MatrixXd& gram,
                               VectorXd& cross) {
    const int p = static_cast<int>(c.size());
    const int nm1 = static_cast<int>(sn.h.size()) / p;
    gram.resize(nm1, nm1);
    cross.resize(nm1);
    for (int a = 0; a < nm1; ++a) {
        cross(a) = c.dot(sn.h.segment(a * p, p));
        for (int b = a; b < nm1; ++b) {
            const double v = c.dot(sn.G.block(a * p, b * p, p, p) * c);
            gram(a, b) = v;
            gram(b, a) = v;
        }
    }
}

void add_kernel_normal_from_sensing(const SensingNormal& sn, const VectorXd& a_row,
                                    MatrixXd& gram, VectorXd& cross) {
    const int p = static_cast<int>(gram.rows());
    const int nm1 = static_cast<int>(a_row.size());
    for (int a = 0; a < nm1; ++a) {
        if (a_row(a) == 0.0) continue;
        cross.noalias() += a_row(a) * sn.h.segment(a * p, p);
        for (int b = 0; b < nm1; ++b) {
            if (a_row(b) == 0.0) continue;
            gram.noalias() += (a_row(a) * a_row(b)) * sn.G.block(a * p, b * p, p, p);
        }
    }
}

GraphNormalSet stream_graph_normals(const TrajectoryData& data, const BasisSpec& basis,
                                    const VectorXd& c) {
    check_inputs(data, basis);
    if (c.size() != basis.p()) throw DimensionMismatch("coefficient length != basis size");
    const int n = data.n_agents();
    const int d = data.dim();
    const int L = data.n_steps();
    const int M = data.n_traj();

    GraphNormalSet out;
    out.gram.assign(n, MatrixXd::Zero(n - 1, n - 1));
    out.cross.assign(n, VectorXd::Zero(n - 1));
    out.s.assign(n, 0.0);

    parallel_for(n, [&](std::size_t ui) {
        const int i = static_cast<int>(ui);
        MatrixXd phi(d, n - 1);  // columns Phi_c(r_ij), j != i
        VectorXd y(d), diff(d);
        std::vector<double> scratch(basis.p());
        const bool radial = basis.kind == BasisSpec::Kind::RadialLift;
        KernelCoef coef{c};
        for (int m = 0; m < M; ++m) {
            const auto& traj = data.states[m];
            for (int l = 0; l < L; ++l) {
                const MatrixXd& X = traj[l];
                int jj = 0;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    diff = X.row(j) - X.row(i);
                    if (radial) {
                        const double r = diff.norm();
                        if (r <= basis.singular_cutoff) {
                            phi.col(jj).setZero();
                        } else {
                            basis.eval_radial(r, scratch.data());
                            double v = 0.0;
                            for (int k = 0; k < basis.p(); ++k) v += c(k) * scratch[k];
                            phi.col(jj) = (v / r) * diff;
                        }
                    } else {
                        basis.eval_radial(diff(0), scratch.data());
                        double v = 0.0;
                        for (int k = 0; k < basis.p(); ++k) v += c(k) * scratch[k];
                        phi(0, jj) = v;
                    }
                    ++jj;
                }
                y = (traj[l + 1].row(i) - X.row(i)).transpose() / data.dt;
                out.gram[i].selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose(), 1.0);
                out.cross[i].noalias() += phi.transpose() * y;
                out.s[i] += y.squaredNorm();
            }
        }
        out.gram[i].triangularView<Eigen::Upper>() = out.gram[i].transpose();
    });
    return out;
}

void stream_kernel_normal(const TrajectoryData& data, const BasisSpec& basis,
                          const WeightMatrix& a, MatrixXd& gram, VectorXd& cross, double& s) {
    check_inputs(data, basis);
    if (a.size() != data.n_agents()) throw DimensionMismatch("weight matrix size != N");
    const int n = data.n_agents();
    const int d = data.dim();
    const int p = basis.p();
    const int L = data.n_steps();
    const int M = data.n_traj();

    // fixed-size blocks over m; per-block partials reduced pairwise
    struct Partial {
        MatrixXd gram;
        VectorXd cross;
        double s;
    };
    const std::size_t block = 64;
    const std::size_t n_blocks = (static_cast<std::size_t>(M) + block - 1) / block;
    std::vector<Partial> parts(n_blocks, Partial{MatrixXd::Zero(p, p), VectorXd::Zero(p), 0.0});

    parallel_blocks(M, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        Partial& part = parts[b];
        PairEvals pe;
        std::vector<double> scratch;
        MatrixXd g(d, p);
        VectorXd y(d);
        for (std::size_t m = lo; m < hi; ++m) {
            const auto& traj = data.states[m];
            for (int l = 0; l < L; ++l) {
                fill_pair_evals(basis, traj[l], pe, scratch);
                for (int i = 0; i < n; ++i) {
                    g.setZero();
                    for (int j = 0; j < n; ++j) {
                        if (j == i) continue;
                        const double aij = a.entries(i, j);
                        if (aij == 0.0) continue;
                        Eigen::Map<const MatrixXd> blk(pe.block(i, j), d, p);
                        g.noalias() += aij * blk;
                    }
                    y = (traj[l + 1].row(i) - traj[l].row(i)).transpose() / data.dt;
                    part.gram.selfadjointView<Eigen::Lower>().rankUpdate(g.transpose(), 1.0);
                    part.cross.noalias() += g.transpose() * y;
                    part.s += y.squaredNorm();
                }
            }
        }
    });
    Partial total = reduce_pairwise(std::move(parts), [](Partial& dst, const Partial& src) {
        dst.gram += src.gram;
        dst.cross += src.cross;
        dst.s += src.s;
    });
    total.gram.triangularView<Eigen::Upper>() = total.gram.transpose();
    gram = std::move(total.gram);
    cross = std::move(total.cross);
    s = total.s;
}

bool sensing_stats_affordable(int n, int p) {
    // (N-1)p beyond a few hundred makes the per-agent Gram updates dominate
    return static_cast<long>(n - 1) * p <= 160;
}

namespace {

bool pick_normal_path(AssemblyOptions opt, long rows, long cols) {
    switch (opt.path) {
        case AssemblyOptions::Path::LongMatrix:
            return false;
        case AssemblyOptions::Path::Normal:
            return true;
        case AssemblyOptions::Path::Both:
            return false;  // build long form, then derive the normal form
        case AssemblyOptions::Path::Auto:
            return rows > cols;
    }
    return true;
}

void finish_block(RegressionBlock& blk, AssemblyOptions opt) {
    if (opt.path == AssemblyOptions::Path::Both && blk.design.size() > 0) {
        blk.has_normal = true;
        blk.normal_mat = blk.design.transpose() * blk.design / static_cast<double>(blk.rows);
        blk.normal_vec = blk.design.transpose() * blk.response / static_cast<double>(blk.rows);
        blk.response_sq = blk.response.squaredNorm();
    }
}

}  // namespace

RegressionBlock assemble_graph_block(int i, const TrajectoryData& data, const BasisSpec& basis,
                                     const KernelCoef& coef, AssemblyOptions opt) {
    check_inputs(data, basis);
    if (coef.c.size() != basis.p()) throw DimensionMismatch("coefficient length != basis size");
    if (coef.c.norm() == 0.0) throw ZeroCoefficient("graph block needs a nonzero kernel");
    const int n = data.n_agents();
    const int d = data.dim();
    const int L = data.n_steps();
    const int M = data.n_traj();
    const long rows = static_cast<long>(d) * L * M;

    RegressionBlock blk;
    blk.rows = rows;
    blk.samples_m = M;
    blk.row_index_map = "(m outer, l middle, dim inner); columns j ascending, skipping i";

    if (pick_normal_path(opt, rows, n - 1)) {
        GraphNormalSet gn = stream_graph_normals(data, basis, coef.c);
        blk.has_normal = true;
        blk.normal_mat = gn.gram[i] / static_cast<double>(rows);
        blk.normal_vec = gn.cross[i] / static_cast<double>(rows);
        blk.response_sq = gn.s[i];
        return blk;
    }

    blk.design.resize(rows, n - 1);
    blk.response.resize(rows);
    VectorXd diff(d);
    long row = 0;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            const MatrixXd& X = data.states[m][l];
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                diff = X.row(j) - X.row(i);
                const VectorXd phi = eval_kernel(basis, coef, diff);
                for (int dim = 0; dim < d; ++dim) blk.design(row + dim, jj) = phi(dim);
                ++jj;
            }
            for (int dim = 0; dim < d; ++dim)
                blk.response(row + dim) =
                    (data.states[m][l + 1](i, dim) - X(i, dim)) / data.dt;
            row += d;
        }
    }
    finish_block(blk, opt);
    return blk;
}

RegressionBlock assemble_kernel_block(const TrajectoryData& data, const BasisSpec& basis,
                                      const WeightMatrix& a, AssemblyOptions opt) {
    check_inputs(data, basis);
    if (a.size() != data.n_agents()) throw DimensionMismatch("weight matrix size != N");
    const int n = data.n_agents();
    const int d = data.dim();
    const int p = basis.p();
    const int L = data.n_steps();
    const int M = data.n_traj();
    const long rows = static_cast<long>(d) * L * M * n;

    RegressionBlock blk;
    blk.rows = rows;
    blk.samples_m = M;
    blk.row_index_map = "(m outer, l, i, dim inner); columns k = 1..p";

    if (pick_normal_path(opt, rows, p)) {
        blk.has_normal = true;
        MatrixXd gram;
        VectorXd cross;
        double s = 0.0;
        stream_kernel_normal(data, basis, a, gram, cross, s);
        blk.normal_mat = gram / static_cast<double>(rows);
        blk.normal_vec = cross / static_cast<double>(rows);
        blk.response_sq = s;
        return blk;
    }

    blk.design.resize(rows, p);
    blk.response.resize(rows);
    PairEvals pe;
    std::vector<double> scratch;
    long row = 0;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            fill_pair_evals(basis, data.states[m][l], pe, scratch);
            for (int i = 0; i < n; ++i) {
                MatrixXd g = MatrixXd::Zero(d, p);
                for (int j = 0; j < n; ++j) {
                    if (j == i || a.entries(i, j) == 0.0) continue;
                    Eigen::Map<const MatrixXd> blkic(pe.block(i, j), d, p);
                    g.noalias() += a.entries(i, j) * blkic;
                }
                for (int dim = 0; dim < d; ++dim) {
                    blk.design.row(row + dim) = g.row(dim);
                    blk.response(row + dim) =
                        (data.states[m][l + 1](i, dim) - data.states[m][l](i, dim)) / data.dt;
                }
                row += d;
            }
        }
    }
    finish_block(blk, opt);
    return blk;
}

RegressionBlock assemble_sensing_block(int i, const TrajectoryData& data,
                                       const BasisSpec& basis, AssemblyOptions opt) {
    check_inputs(data, basis);
    const int n = data.n_agents();
    const int d = data.dim();
    const int p = basis.p();
    const int L = data.n_steps();
    const int M = data.n_traj();
    const long rows = static_cast<long>(d) * L * M;
    const long cols = static_cast<long>(n - 1) * p;

    RegressionBlock blk;
    blk.rows = rows;
    blk.samples_m = M;
    blk.row_index_map =
        "(m outer, l middle, dim inner); columns (j, k) j-major skipping i, k minor";

    if (pick_normal_path(opt, rows, cols)) {
        // single-agent variant of assemble_sensing_stats
        SensingStats st = assemble_sensing_stats(data, basis);
        blk.has_normal = true;
        blk.normal_mat = st.per_agent[i].G / static_cast<double>(rows);
        blk.normal_vec = st.per_agent[i].h / static_cast<double>(rows);
        blk.response_sq = st.per_agent[i].s;
        return blk;
    }

    blk.design.resize(rows, cols);
    blk.response.resize(rows);
    VectorXd diff(d);
    std::vector<double> scratch(p);
    const bool radial = basis.kind == BasisSpec::Kind::RadialLift;
    long row = 0;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            const MatrixXd& X = data.states[m][l];
            int jj = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                diff = X.row(j) - X.row(i);
                if (radial) {
                    const double r = diff.norm();
                    if (r <= basis.singular_cutoff) {
                        blk.design.block(row, jj * p, d, p).setZero();
                    } else {
                        basis.eval_radial(r, scratch.data());
                        for (int k = 0; k < p; ++k)
                            blk.design.block(row, jj * p + k, d, 1) =
                                (scratch[k] / r) * diff;
                    }
                } else {
                    basis.eval_radial(diff(0), scratch.data());
                    for (int k = 0; k < p; ++k) blk.design(row, jj * p + k) = scratch[k];
                }
                ++jj;
            }
            for (int dim = 0; dim < d; ++dim)
                blk.response(row + dim) =
                    (data.states[m][l + 1](i, dim) - X(i, dim)) / data.dt;
            row += d;
        }
    }
    finish_block(blk, opt);
    return blk;
}

BpsiMatrix bpsi_matrix(const TrajectoryData& data, const BasisSpec& basis) {
    check_inputs(data, basis);
    const int n = data.n_agents();
    const int p = basis.p();
    const int L = data.n_steps();
    const int M = data.n_traj();

    MatrixXd B = MatrixXd::Zero(p, p);
    PairEvals pe;
    std::vector<double> scratch;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l) {
            fill_pair_evals(basis, data.states[m][l], pe, scratch);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    Eigen::Map<const MatrixXd> blk(pe.block(i, j), basis.dim, p);
                    B.selfadjointView<Eigen::Lower>().rankUpdate(blk.transpose(), 1.0);
                }
            }
        }
    }
    B.triangularView<Eigen::Upper>() = B.transpose();
    B /= static_cast<double>(n) * (n - 1) * L * M;
    return BpsiMatrix{std::move(B)};
}

}  // namespace netkernel
