// mcbf - worst-case robust multi-cell coordinated beamforming
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mcbf/conic/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

namespace mcbf::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PsdInfo {
    int block_id;
    int size;
    int offset; // into the coned coordinate vector
    int dim;
};

struct RowSlice {
    int row;
    std::vector<std::pair<int, double>> coeffs; // (local svec index, value)
};

struct NonnegCol {
    int block_id;
    int coned_index;
    std::vector<std::pair<int, double>> rows; // (row, value)
};

// Nesterov-Todd scaling state of one PSD block.
struct PsdScaling {
    Eigen::MatrixXd R;
    Eigen::MatrixXd Rinv;
    Eigen::MatrixXd T; // R * R^T
    Eigen::VectorXd lambda;
};

Eigen::MatrixXd smat_slice(const Eigen::VectorXd& u, int off, int s) {
    return smat(u.segment(off, svec_len(s)), s);
}

// Largest step alpha with X + alpha*D staying PSD (X assumed PD).
double psd_step_to_boundary(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    Eigen::MatrixXd Xr = X;
    double jitter = 1e-14 * (1.0 + X.trace() / static_cast<double>(X.rows()));
    while (llt.info() != Eigen::Success) {
        Xr += jitter * Eigen::MatrixXd::Identity(X.rows(), X.cols());
        llt.compute(Xr);
        jitter *= 100.0;
        if (jitter > 1.0)
            return 0.0;
    }
    Eigen::MatrixXd Y = llt.matrixL().solve(D);
    Y = llt.matrixL().solve(Y.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Y + Y.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0)
        return kInf;
    return -1.0 / lmin;
}

} // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
    }
    return "?";
}

Eigen::MatrixXcd ConicSolution::hermitian_value(const ConicProblem& p, int block) const {
    const BlockSpec& spec = p.block(block);
    if (spec.kind != BlockKind::psd || spec.complex_order <= 0)
        throw std::invalid_argument("hermitian_value: block is not a Hermitian embedding");
    return extract_hermitian(psd_values[static_cast<size_t>(block)]);
}

struct Solver::Impl {
    const ConicProblem& problem;

    // coordinate maps
    std::vector<PsdInfo> psd;
    std::vector<NonnegCol> nonneg;
    std::vector<int> free_blocks; // block ids of free scalars
    int dimK = 0;                 // coned coordinates
    int nfree = 0;
    double barrier_nu = 0.0;
    // orig coordinate -> (coned index) or (free index), -1 otherwise
    std::vector<int> coned_of_coord;
    std::vector<int> free_of_coord;

    // equilibration
    std::vector<double> row_scale;   // per original row
    std::vector<double> block_scale; // per block id
    std::vector<int> kept;           // kept original row ids (ascending)
    std::vector<int> removed;
    Eigen::MatrixXd a_keep_dense; // scaled, only kept when removed non-empty

    // scaled constraint data over kept rows
    std::vector<std::vector<RowSlice>> psd_slices; // parallel to psd
    Eigen::MatrixXd F;                             // m x nfree
    Eigen::SparseMatrix<double> AK;                // m x dimK
    int m = 0;

    explicit Impl(const ConicProblem& p) : problem(p) { assemble(); }

    void assemble() {
        const auto& blocks = problem.blocks();
        coned_of_coord.assign(static_cast<size_t>(problem.num_vars()), -1);
        free_of_coord.assign(static_cast<size_t>(problem.num_vars()), -1);
        block_scale.assign(blocks.size(), 1.0);
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            const BlockSpec& b = blocks[bi];
            if (b.kind == BlockKind::psd) {
                PsdInfo info{static_cast<int>(bi), b.size, dimK, b.dim};
                for (int k = 0; k < b.dim; ++k)
                    coned_of_coord[static_cast<size_t>(b.offset + k)] = dimK + k;
                dimK += b.dim;
                psd.push_back(info);
                barrier_nu += b.size;
            }
        }
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            const BlockSpec& b = blocks[bi];
            if (b.kind == BlockKind::nonneg) {
                NonnegCol col;
                col.block_id = static_cast<int>(bi);
                col.coned_index = dimK;
                coned_of_coord[static_cast<size_t>(b.offset)] = dimK;
                ++dimK;
                nonneg.push_back(col);
                barrier_nu += 1.0;
            } else if (b.kind == BlockKind::free_scalar) {
                free_of_coord[static_cast<size_t>(b.offset)] = nfree;
                free_blocks.push_back(static_cast<int>(bi));
                ++nfree;
            }
        }

        const int m_orig = problem.num_rows();
        row_scale.assign(static_cast<size_t>(m_orig), 1.0);

        // block id per original coordinate, for equilibration
        std::vector<int> block_of_coord(static_cast<size_t>(problem.num_vars()));
        for (size_t bi = 0; bi < blocks.size(); ++bi)
            for (int k = 0; k < blocks[bi].dim; ++k)
                block_of_coord[static_cast<size_t>(blocks[bi].offset + k)] = static_cast<int>(bi);

        // Ruiz equilibration with blockwise-uniform column scaling (a PSD
        // block must be scaled by a single positive factor to stay a cone
        // transformation).
        for (int pass = 0; pass < 8; ++pass) {
            std::vector<double> rmax(static_cast<size_t>(m_orig), 0.0);
            std::vector<double> cmax(blocks.size(), 0.0);
            for (const auto& t : problem.triplets()) {
                const double v = std::abs(t.value) * row_scale[static_cast<size_t>(t.row)] *
                                 block_scale[static_cast<size_t>(block_of_coord[static_cast<size_t>(t.col)])];
                rmax[static_cast<size_t>(t.row)] = std::max(rmax[static_cast<size_t>(t.row)], v);
                cmax[static_cast<size_t>(block_of_coord[static_cast<size_t>(t.col)])] =
                    std::max(cmax[static_cast<size_t>(block_of_coord[static_cast<size_t>(t.col)])], v);
            }
            for (int r = 0; r < m_orig; ++r)
                if (rmax[static_cast<size_t>(r)] > 0.0)
                    row_scale[static_cast<size_t>(r)] /= std::sqrt(rmax[static_cast<size_t>(r)]);
            for (size_t b = 0; b < blocks.size(); ++b)
                if (cmax[b] > 0.0)
                    block_scale[b] /= std::sqrt(cmax[b]);
        }
        for (double& v : row_scale)
            v = std::clamp(v, 1e-10, 1e10);
        for (double& v : block_scale)
            v = std::clamp(v, 1e-10, 1e10);

        // scaled dense matrix for the rank-revealing presolve
        const int ncols = dimK + nfree;
        Eigen::MatrixXd Ad = Eigen::MatrixXd::Zero(m_orig, ncols);
        for (const auto& t : problem.triplets()) {
            const double v = t.value * row_scale[static_cast<size_t>(t.row)] *
                             block_scale[static_cast<size_t>(block_of_coord[static_cast<size_t>(t.col)])];
            const int cc = coned_of_coord[static_cast<size_t>(t.col)];
            const int fc = free_of_coord[static_cast<size_t>(t.col)];
            Ad(t.row, cc >= 0 ? cc : dimK + fc) += v;
        }

        kept.clear();
        removed.clear();
        if (m_orig > 0) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ad.transpose());
            qr.setThreshold(1e-12);
            const int rank = static_cast<int>(qr.rank());
            const auto& perm = qr.colsPermutation().indices();
            std::vector<char> is_kept(static_cast<size_t>(m_orig), 0);
            for (int i = 0; i < rank; ++i)
                is_kept[static_cast<size_t>(perm[i])] = 1;
            for (int r = 0; r < m_orig; ++r)
                (is_kept[static_cast<size_t>(r)] ? kept : removed).push_back(r);
        }
        m = static_cast<int>(kept.size());
        if (!removed.empty())
            a_keep_dense = Ad; // keep the full scaled matrix for consistency checks

        // final structures over kept rows
        std::vector<int> new_row(static_cast<size_t>(m_orig), -1);
        for (int i = 0; i < m; ++i)
            new_row[static_cast<size_t>(kept[static_cast<size_t>(i)])] = i;

        psd_slices.assign(psd.size(), {});
        std::vector<std::vector<std::pair<int, double>>> acc; // per psd block: row -> coeffs
        F = Eigen::MatrixXd::Zero(m, nfree);
        std::vector<Eigen::Triplet<double>> ak_trip;
        // accumulate per (block,row) slices
        std::vector<std::map<int, std::map<int, double>>> slice_acc(psd.size());
        std::vector<std::map<int, double>> nn_acc(nonneg.size());
        std::vector<int> psd_index_of_block(blocks.size(), -1);
        for (size_t i = 0; i < psd.size(); ++i)
            psd_index_of_block[static_cast<size_t>(psd[i].block_id)] = static_cast<int>(i);
        std::vector<int> nn_index_of_block(blocks.size(), -1);
        for (size_t i = 0; i < nonneg.size(); ++i)
            nn_index_of_block[static_cast<size_t>(nonneg[i].block_id)] = static_cast<int>(i);

        for (const auto& t : problem.triplets()) {
            const int r = new_row[static_cast<size_t>(t.row)];
            if (r < 0)
                continue;
            const int bid = block_of_coord[static_cast<size_t>(t.col)];
            const double v = t.value * row_scale[static_cast<size_t>(t.row)] *
                             block_scale[static_cast<size_t>(bid)];
            const int cc = coned_of_coord[static_cast<size_t>(t.col)];
            if (cc >= 0) {
                ak_trip.emplace_back(r, cc, v);
                const int pi = psd_index_of_block[static_cast<size_t>(bid)];
                if (pi >= 0) {
                    const int local = cc - psd[static_cast<size_t>(pi)].offset;
                    slice_acc[static_cast<size_t>(pi)][r][local] += v;
                } else {
                    nn_acc[static_cast<size_t>(nn_index_of_block[static_cast<size_t>(bid)])][r] += v;
                }
            } else {
                F(r, free_of_coord[static_cast<size_t>(t.col)]) += v;
            }
        }
        for (size_t pi = 0; pi < psd.size(); ++pi) {
            for (auto& [row, cmap] : slice_acc[pi]) {
                RowSlice rs;
                rs.row = row;
                rs.coeffs.assign(cmap.begin(), cmap.end());
                psd_slices[pi].push_back(std::move(rs));
            }
        }
        for (size_t ni = 0; ni < nonneg.size(); ++ni)
            nonneg[ni].rows.assign(nn_acc[ni].begin(), nn_acc[ni].end());

        AK.resize(m, dimK);
        AK.setFromTriplets(ak_trip.begin(), ak_trip.end());
    }

    // ---- cone operations over the stacked coned vector --------------------

    Eigen::VectorXd cone_identity() const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dimK);
        for (const auto& p : psd)
            for (int i = 0; i < p.size; ++i)
                e[p.offset + svec_index(p.size, i, i)] = 1.0;
        for (const auto& n : nonneg)
            e[n.coned_index] = 1.0;
        return e;
    }

    void compute_scaling(const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                         std::vector<PsdScaling>& sc, Eigen::VectorXd& wnn,
                         Eigen::VectorXd& lnn) const {
        sc.resize(psd.size());
        for (size_t i = 0; i < psd.size(); ++i) {
            const PsdInfo& p = psd[i];
            Eigen::MatrixXd X = smat_slice(x, p.offset, p.size);
            Eigen::MatrixXd S = smat_slice(s, p.offset, p.size);
            Eigen::LLT<Eigen::MatrixXd> lx(X), ls(S);
            double jx = 1e-14 * (1.0 + X.trace());
            while (lx.info() != Eigen::Success) {
                X += jx * Eigen::MatrixXd::Identity(p.size, p.size);
                lx.compute(X);
                jx *= 100.0;
            }
            double js = 1e-14 * (1.0 + S.trace());
            while (ls.info() != Eigen::Success) {
                S += js * Eigen::MatrixXd::Identity(p.size, p.size);
                ls.compute(S);
                js *= 100.0;
            }
            Eigen::MatrixXd Lx = lx.matrixL();
            Eigen::MatrixXd Ls = ls.matrixL();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ls.transpose() * Lx,
                                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::VectorXd sig = svd.singularValues();
            sig = sig.cwiseMax(1e-150);
            const Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
            PsdScaling& out = sc[i];
            out.R = Lx * svd.matrixV() * isqrt.asDiagonal();
            out.Rinv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                       Lx.triangularView<Eigen::Lower>().solve(
                           Eigen::MatrixXd::Identity(p.size, p.size));
            out.T = out.R * out.R.transpose();
            out.lambda = sig;
        }
        wnn.resize(static_cast<Eigen::Index>(nonneg.size()));
        lnn.resize(static_cast<Eigen::Index>(nonneg.size()));
        for (size_t i = 0; i < nonneg.size(); ++i) {
            const double xv = x[nonneg[i].coned_index];
            const double sv = s[nonneg[i].coned_index];
            wnn[static_cast<Eigen::Index>(i)] = std::sqrt(xv / sv);
            lnn[static_cast<Eigen::Index>(i)] = std::sqrt(xv * sv);
        }
    }

    enum class Op { H, WT, W, WinvT };

    Eigen::VectorXd apply(Op op, const Eigen::VectorXd& u, const std::vector<PsdScaling>& sc,
                          const Eigen::VectorXd& wnn) const {
        Eigen::VectorXd out(dimK);
        for (size_t i = 0; i < psd.size(); ++i) {
            const PsdInfo& p = psd[i];
            const Eigen::MatrixXd U = smat_slice(u, p.offset, p.size);
            Eigen::MatrixXd V;
            switch (op) {
            case Op::H: V = sc[i].T * U * sc[i].T; break;
            case Op::WT: V = sc[i].R * U * sc[i].R.transpose(); break;
            case Op::W: V = sc[i].R.transpose() * U * sc[i].R; break;
            case Op::WinvT: V = sc[i].Rinv * U * sc[i].Rinv.transpose(); break;
            }
            out.segment(p.offset, p.dim) = svec(0.5 * (V + V.transpose()));
        }
        for (size_t i = 0; i < nonneg.size(); ++i) {
            const double w = wnn[static_cast<Eigen::Index>(i)];
            double f = 1.0;
            switch (op) {
            case Op::H: f = w * w; break;
            case Op::WT:
            case Op::W: f = w; break;
            case Op::WinvT: f = 1.0 / w; break;
            }
            out[nonneg[i].coned_index] = f * u[nonneg[i].coned_index];
        }
        return out;
    }

    Eigen::VectorXd lambda_sq(const std::vector<PsdScaling>& sc, const Eigen::VectorXd& lnn) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(dimK);
        for (size_t i = 0; i < psd.size(); ++i) {
            const PsdInfo& p = psd[i];
            for (int k = 0; k < p.size; ++k)
                out[p.offset + svec_index(p.size, k, k)] = sc[i].lambda[k] * sc[i].lambda[k];
        }
        for (size_t i = 0; i < nonneg.size(); ++i)
            out[nonneg[i].coned_index] =
                lnn[static_cast<Eigen::Index>(i)] * lnn[static_cast<Eigen::Index>(i)];
        return out;
    }

    // d -> lambda \ d  (inverse of u -> (Lambda*U + U*Lambda)/2 blockwise)
    Eigen::VectorXd lambda_div(const Eigen::VectorXd& d, const std::vector<PsdScaling>& sc,
                               const Eigen::VectorXd& lnn) const {
        Eigen::VectorXd out(dimK);
        for (size_t i = 0; i < psd.size(); ++i) {
            const PsdInfo& p = psd[i];
            Eigen::MatrixXd D = smat_slice(d, p.offset, p.size);
            for (int r = 0; r < p.size; ++r)
                for (int c = 0; c < p.size; ++c)
                    D(r, c) = 2.0 * D(r, c) / (sc[i].lambda[r] + sc[i].lambda[c]);
            out.segment(p.offset, p.dim) = svec(D);
        }
        for (size_t i = 0; i < nonneg.size(); ++i)
            out[nonneg[i].coned_index] =
                d[nonneg[i].coned_index] / lnn[static_cast<Eigen::Index>(i)];
        return out;
    }

    // symmetrized product p o q in the scaled space
    Eigen::VectorXd sym_prod(const Eigen::VectorXd& pvec, const Eigen::VectorXd& qvec) const {
        Eigen::VectorXd out(dimK);
        for (size_t i = 0; i < psd.size(); ++i) {
            const PsdInfo& p = psd[i];
            const Eigen::MatrixXd P = smat_slice(pvec, p.offset, p.size);
            const Eigen::MatrixXd Q = smat_slice(qvec, p.offset, p.size);
            const Eigen::MatrixXd V = 0.5 * (P * Q + Q * P);
            out.segment(p.offset, p.dim) = svec(0.5 * (V + V.transpose()));
        }
        for (const auto& n : nonneg)
            out[n.coned_index] = pvec[n.coned_index] * qvec[n.coned_index];
        return out;
    }

    double step_to_boundary(const Eigen::VectorXd& z, const Eigen::VectorXd& dz) const {
        double alpha = kInf;
        for (const auto& p : psd) {
            const Eigen::MatrixXd X = smat_slice(z, p.offset, p.size);
            const Eigen::MatrixXd D = smat_slice(dz, p.offset, p.size);
            alpha = std::min(alpha, psd_step_to_boundary(X, D));
        }
        for (const auto& n : nonneg) {
            if (dz[n.coned_index] < 0.0)
                alpha = std::min(alpha, -z[n.coned_index] / dz[n.coned_index]);
        }
        return alpha;
    }

    // G with rows g_i = svec-stacked scaled constraint matrices, so that the
    // Schur complement is the Gram matrix G G^T. Solving through a QR of G^T
    // halves the effective condition number compared with factoring G G^T.
    Eigen::MatrixXd form_scaled_rows(const std::vector<PsdScaling>& sc,
                                     const Eigen::VectorXd& wnn) const {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, dimK);
        for (size_t bi = 0; bi < psd.size(); ++bi) {
            const PsdInfo& p = psd[bi];
            Eigen::MatrixXd U(p.size, p.size);
            for (const auto& slice : psd_slices[bi]) {
                U.setZero();
                for (const auto& [loc, v] : slice.coeffs) {
                    int j = 0, rem = loc;
                    while (rem >= p.size - j) {
                        rem -= p.size - j;
                        ++j;
                    }
                    const int r = j + rem;
                    if (r == j)
                        U(r, j) += v;
                    else {
                        U(r, j) += v * 0.7071067811865475;
                        U(j, r) += v * 0.7071067811865475;
                    }
                }
                const Eigen::MatrixXd V = sc[bi].R.transpose() * U * sc[bi].R;
                G.row(slice.row).segment(p.offset, p.dim) =
                    svec(0.5 * (V + V.transpose())).transpose();
            }
        }
        for (size_t ni = 0; ni < nonneg.size(); ++ni)
            for (const auto& [row, v] : nonneg[ni].rows)
                G(row, nonneg[ni].coned_index) = wnn[static_cast<Eigen::Index>(ni)] * v;
        return G;
    }

    Eigen::MatrixXd form_schur(const std::vector<PsdScaling>& sc, const Eigen::VectorXd& wnn) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (size_t bi = 0; bi < psd.size(); ++bi) {
            const PsdInfo& p = psd[bi];
            const auto& slices = psd_slices[bi];
            Eigen::MatrixXd U(p.size, p.size);
            for (size_t i = 0; i < slices.size(); ++i) {
                U.setZero();
                for (const auto& [loc, v] : slices[i].coeffs) {
                    // decode local svec index back to (r,c)
                    // local index layout is column-major lower triangle
                    int j = 0, rem = loc;
                    while (rem >= p.size - j) {
                        rem -= p.size - j;
                        ++j;
                    }
                    const int r = j + rem;
                    if (r == j)
                        U(r, j) += v;
                    else {
                        U(r, j) += v * 0.7071067811865475;
                        U(j, r) += v * 0.7071067811865475;
                    }
                }
                const Eigen::MatrixXd V = sc[bi].T * U * sc[bi].T;
                const Eigen::VectorXd vv = svec(0.5 * (V + V.transpose()));
                for (size_t jj = 0; jj <= i; ++jj) {
                    double acc = 0.0;
                    for (const auto& [loc, v] : slices[jj].coeffs)
                        acc += v * vv[loc];
                    const int r1 = slices[i].row, r2 = slices[jj].row;
                    M(std::max(r1, r2), std::min(r1, r2)) += acc;
                }
            }
        }
        for (size_t ni = 0; ni < nonneg.size(); ++ni) {
            const double h = wnn[static_cast<Eigen::Index>(ni)] * wnn[static_cast<Eigen::Index>(ni)];
            const auto& rows = nonneg[ni].rows;
            for (size_t a = 0; a < rows.size(); ++a)
                for (size_t b2 = 0; b2 <= a; ++b2)
                    M(std::max(rows[a].first, rows[b2].first),
                      std::min(rows[a].first, rows[b2].first)) += h * rows[a].second * rows[b2].second;
        }
        M = M.selfadjointView<Eigen::Lower>();
        return M;
    }
};

Solver::Solver(const ConicProblem& problem) : impl_(std::make_unique<Impl>(problem)) {}
Solver::~Solver() = default;

int Solver::removed_rows() const { return static_cast<int>(impl_->removed.size()); }

ConicSolution Solver::solve(const SolveOptions& opts) {
    Impl& im = *impl_;
    const ConicProblem& prob = im.problem;
    const int m = im.m;
    const int dimK = im.dimK;
    const int q = im.nfree;
    if (dimK == 0)
        throw std::invalid_argument("conic solve: problem has no cone variables");

    // scaled b and c for this solve
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        const int orig = im.kept[static_cast<size_t>(i)];
        b[i] = prob.rhs_vector()[static_cast<size_t>(orig)] * im.row_scale[static_cast<size_t>(orig)];
    }
    Eigen::VectorXd cK = Eigen::VectorXd::Zero(dimK);
    Eigen::VectorXd cf = Eigen::VectorXd::Zero(q);
    {
        const auto& blocks = prob.blocks();
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            const BlockSpec& bl = blocks[bi];
            for (int k = 0; k < bl.dim; ++k) {
                const double v = prob.objective_vector()[static_cast<size_t>(bl.offset + k)];
                if (v == 0.0)
                    continue;
                const int cc = im.coned_of_coord[static_cast<size_t>(bl.offset + k)];
                // column scaling sigma_b multiplies c as well
                const double sv = v * im.block_scale[bi];
                if (cc >= 0)
                    cK[cc] += sv;
                else
                    cf[im.free_of_coord[static_cast<size_t>(bl.offset + k)]] += sv;
            }
        }
    }
    const double gamma_b = 1.0 / std::max(1.0, b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    double cmax = 0.0;
    if (dimK > 0)
        cmax = std::max(cmax, cK.cwiseAbs().maxCoeff());
    if (q > 0)
        cmax = std::max(cmax, cf.cwiseAbs().maxCoeff());
    const double gamma_c = 1.0 / std::max(1.0, cmax);
    b *= gamma_b;
    cK *= gamma_c;
    cf *= gamma_c;

    ConicSolution sol;
    sol.psd_values.resize(static_cast<size_t>(prob.num_blocks()));
    sol.psd_duals.resize(static_cast<size_t>(prob.num_blocks()));
    sol.scalar_values.assign(static_cast<size_t>(prob.num_blocks()), 0.0);
    sol.scalar_duals.assign(static_cast<size_t>(prob.num_blocks()), 0.0);
    sol.eq_duals = Eigen::VectorXd::Zero(prob.num_rows());

    // consistency of removed (dependent) rows under the current rhs
    if (!im.removed.empty()) {
        Eigen::MatrixXd Akeep(m, im.a_keep_dense.cols());
        for (int i = 0; i < m; ++i)
            Akeep.row(i) = im.a_keep_dense.row(im.kept[static_cast<size_t>(i)]);
        const Eigen::VectorXd z0 = (Akeep * Akeep.transpose()).ldlt().solve(b / gamma_b);
        const Eigen::VectorXd x0 = Akeep.transpose() * z0;
        for (int r : im.removed) {
            const double lhs = im.a_keep_dense.row(r).dot(x0);
            const double rhs = prob.rhs_vector()[static_cast<size_t>(r)] * im.row_scale[static_cast<size_t>(r)];
            if (std::abs(lhs - rhs) > 1e-7 * (1.0 + std::abs(rhs))) {
                sol.status = SolveStatus::infeasible;
                sol.message = "dependent equality rows are inconsistent";
                return sol;
            }
        }
    }

    // HSD iterate
    Eigen::VectorXd x = im.cone_identity();
    Eigen::VectorXd s = x;
    Eigen::VectorXd xf = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    double tau = 1.0, kappa = 1.0;
    const double nu1 = im.barrier_nu + 1.0;
    const double mu0 = (x.dot(s) + tau * kappa) / nu1;

    std::vector<PsdScaling> sc;
    Eigen::VectorXd wnn, lnn;
    bool qr_mode = false; // high-accuracy Schur backend for the endgame
    double last_pres = kInf;
    int no_progress = 0;

    struct Best {
        double merit = kInf;
        Eigen::VectorXd x, s, xf, y;
        double tau = 1.0, kappa = 1.0;
    } best;

    auto unscale_and_fill = [&](const Eigen::VectorXd& xs_, const Eigen::VectorXd& ss_,
                                const Eigen::VectorXd& xfs_, const Eigen::VectorXd& ys_,
                                double div_primal, double div_dual) {
        // div_primal/div_dual: tau for optimal points, certificate normalizers otherwise
        const auto& blocks = prob.blocks();
        std::vector<int> psd_index_of_block(blocks.size(), -1);
        for (size_t i = 0; i < im.psd.size(); ++i)
            psd_index_of_block[static_cast<size_t>(im.psd[i].block_id)] = static_cast<int>(i);
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            const BlockSpec& bl = blocks[bi];
            const double sigma = im.block_scale[bi];
            if (bl.kind == BlockKind::psd) {
                const PsdInfo& p = im.psd[static_cast<size_t>(psd_index_of_block[bi])];
                Eigen::MatrixXd X = smat_slice(xs_, p.offset, p.size) * (sigma / gamma_b / div_primal);
                Eigen::MatrixXd S = smat_slice(ss_, p.offset, p.size) / (sigma * gamma_c * div_dual);
                sol.psd_values[bi] = X;
                sol.psd_duals[bi] = S;
            } else if (bl.kind == BlockKind::nonneg) {
                int ci = im.coned_of_coord[static_cast<size_t>(bl.offset)];
                sol.scalar_values[bi] = xs_[ci] * sigma / gamma_b / div_primal;
                sol.scalar_duals[bi] = ss_[ci] / (sigma * gamma_c * div_dual);
            } else {
                int fi = im.free_of_coord[static_cast<size_t>(bl.offset)];
                sol.scalar_values[bi] = xfs_[fi] * sigma / gamma_b / div_primal;
            }
        }
        for (int i = 0; i < m; ++i) {
            const int orig = im.kept[static_cast<size_t>(i)];
            sol.eq_duals[orig] = ys_[i] * im.row_scale[static_cast<size_t>(orig)] / (gamma_c * div_dual);
        }
    };

    // true residuals on the original data, for reporting
    auto original_residuals = [&](double& pres, double& dres, double& pobj, double& dobj) {
        const int nvar = prob.num_vars();
        Eigen::VectorXd xorig(nvar);
        for (int bi = 0; bi < prob.num_blocks(); ++bi) {
            const BlockSpec& bl = prob.block(bi);
            if (bl.kind == BlockKind::psd) {
                const Eigen::VectorXd u = svec(sol.psd_values[static_cast<size_t>(bi)]);
                xorig.segment(bl.offset, bl.dim) = u;
            } else {
                xorig[bl.offset] = sol.scalar_values[static_cast<size_t>(bi)];
            }
        }
        Eigen::VectorXd resid = Eigen::VectorXd::Zero(prob.num_rows());
        Eigen::VectorXd aty = Eigen::VectorXd::Zero(nvar);
        for (const auto& t : prob.triplets()) {
            resid[t.row] += t.value * xorig[t.col];
            aty[t.col] += t.value * sol.eq_duals[t.row];
        }
        double bnorm = 1.0, pmax = 0.0;
        for (int r = 0; r < prob.num_rows(); ++r) {
            bnorm = std::max(bnorm, std::abs(prob.rhs_vector()[static_cast<size_t>(r)]));
            pmax = std::max(pmax, std::abs(resid[r] - prob.rhs_vector()[static_cast<size_t>(r)]));
        }
        pres = pmax / bnorm;
        // dual: c - A^T y - s per block
        double dmax = 0.0, cnorm = 1.0;
        for (int i = 0; i < nvar; ++i)
            cnorm = std::max(cnorm, std::abs(prob.objective_vector()[static_cast<size_t>(i)]));
        for (int bi = 0; bi < prob.num_blocks(); ++bi) {
            const BlockSpec& bl = prob.block(bi);
            for (int k = 0; k < bl.dim; ++k) {
                double sv = 0.0;
                if (bl.kind == BlockKind::psd)
                    sv = svec(sol.psd_duals[static_cast<size_t>(bi)])[k];
                else if (bl.kind == BlockKind::nonneg)
                    sv = sol.scalar_duals[static_cast<size_t>(bi)];
                dmax = std::max(dmax, std::abs(prob.objective_vector()[static_cast<size_t>(bl.offset + k)] -
                                               aty[bl.offset + k] - sv));
            }
        }
        dres = dmax / cnorm;
        pobj = prob.eval_objective(xorig);
        dobj = 0.0;
        for (int r = 0; r < prob.num_rows(); ++r)
            dobj += prob.rhs_vector()[static_cast<size_t>(r)] * sol.eq_duals[r];
        dobj += prob.obj_constant();
    };

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        // residuals of the homogeneous model
        Eigen::VectorXd res_P = im.AK * x - b * tau;
        if (q > 0)
            res_P += im.F * xf;
        Eigen::VectorXd res_D = -(im.AK.transpose() * y) + cK * tau - s;
        Eigen::VectorXd res_F = q > 0 ? Eigen::VectorXd(-(im.F.transpose() * y) + cf * tau)
                                      : Eigen::VectorXd();
        const double res_G = b.dot(y) - cK.dot(x) - (q > 0 ? cf.dot(xf) : 0.0) - kappa;
        const double mu = (x.dot(s) + tau * kappa) / nu1;

        const double pobj = (cK.dot(x) + (q > 0 ? cf.dot(xf) : 0.0)) / tau;
        const double dobj = b.dot(y) / tau;
        const double pres = res_P.norm() / tau / (1.0 + b.norm());
        double dn2 = res_D.squaredNorm();
        if (q > 0)
            dn2 += res_F.squaredNorm();
        const double dres = std::sqrt(dn2) / tau / (1.0 + std::sqrt(cK.squaredNorm() + cf.squaredNorm()));
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.trace.push_back({pobj, dobj, pres, dres, gap, mu, 0.0});

        const double merit = std::max({pres, dres, gap});
        if (merit < best.merit) {
            best = {merit, x, s, xf, y, tau, kappa};
        }

        if (opts.verbose)
            std::cerr << "it " << iter << " mu " << mu << " pres " << pres << " dres " << dres
                      << " gap " << gap << " tau " << tau << " kappa " << kappa << "\n";

        if (pres <= opts.feas_tol && dres <= opts.feas_tol && gap <= opts.gap_tol) {
            unscale_and_fill(x, s, xf, y, tau, tau);
            sol.status = SolveStatus::optimal;
            sol.iterations = iter;
            double tp, td, po, dobj2;
            original_residuals(tp, td, po, dobj2);
            sol.primal_residual = tp;
            sol.dual_residual = td;
            sol.obj_primal = po;
            sol.obj_dual = dobj2;
            sol.rel_gap = std::abs(po - dobj2) / (1.0 + std::abs(po) + std::abs(dobj2));
            return sol;
        }

        // infeasibility certificates
        const double by = b.dot(y);
        const double cx = cK.dot(x) + (q > 0 ? cf.dot(xf) : 0.0);
        if (tau <= 1e-3 || mu <= 1e-8 * mu0) {
            if (by > 0.0) {
                double cert = (im.AK.transpose() * y + s).cwiseAbs().maxCoeff();
                if (q > 0)
                    cert = std::max(cert, (im.F.transpose() * y).cwiseAbs().maxCoeff());
                if (cert <= opts.feas_tol * by) {
                    unscale_and_fill(x, s, xf, y, 1.0, by);
                    sol.status = SolveStatus::infeasible;
                    sol.is_certificate = true;
                    sol.message = "Farkas dual ray: A'y + s = 0, b'y = 1";
                    sol.iterations = iter;
                    return sol;
                }
            }
            if (cx < 0.0) {
                Eigen::VectorXd ax = im.AK * x;
                if (q > 0)
                    ax += im.F * xf;
                const double axmax = m > 0 ? ax.cwiseAbs().maxCoeff() : 0.0;
                if (axmax <= opts.feas_tol * (-cx)) {
                    unscale_and_fill(x, s, xf, y, -cx, 1.0);
                    sol.status = SolveStatus::unbounded;
                    sol.is_certificate = true;
                    sol.message = "improving ray: A x = 0, c'x = -1";
                    sol.iterations = iter;
                    return sol;
                }
            }
        }

        // backend switch: once the factored normal equations stop reducing
        // the primal residual, pay for the better-conditioned QR route
        if (pres > opts.feas_tol && pres > 0.7 * last_pres)
            ++no_progress;
        else
            no_progress = 0;
        last_pres = pres;
        if (no_progress >= 3 && mu < 1e-4 * mu0 && m > 0 && m <= im.dimK)
            qr_mode = true;

        // Nesterov-Todd scaling and Schur complement
        im.compute_scaling(x, s, sc, wnn, lnn);
        Eigen::LDLT<Eigen::MatrixXd> fact;
        Eigen::HouseholderQR<Eigen::MatrixXd> gqr;
        if (!qr_mode) {
            const Eigen::MatrixXd M = im.form_schur(sc, wnn);
            const double reg =
                1e-13 * (1.0 + (m > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 0.0));
            Eigen::MatrixXd Mreg = M;
            Mreg.diagonal().array() += reg;
            fact.compute(Mreg);
            if (m > 0 && fact.info() != Eigen::Success) {
                Mreg.diagonal().array() += 1e6 * reg;
                fact.compute(Mreg);
                if (fact.info() != Eigen::Success)
                    break;
            }
        } else {
            gqr.compute(im.form_scaled_rows(sc, wnn).transpose());
        }
        auto precond_solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
            if (!qr_mode)
                return fact.solve(rhs);
            // G^T = Q R  =>  G G^T = R^T R
            const auto R = gqr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            return R.solve(Eigen::VectorXd(R.transpose().solve(rhs)));
        };
        // The formed Schur matrix carries O(||H|| eps) rounding, which caps
        // attainable accuracy on ill-conditioned instances; refine against
        // the exact operator A H A^T evaluated through the scaling applies,
        // with the factorization as preconditioner.
        auto opM = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
            return im.AK *
                   im.apply(Impl::Op::H, Eigen::VectorXd(im.AK.transpose() * z), sc, wnn);
        };
        auto msolve_vec = [&](const Eigen::VectorXd& rhs) {
            Eigen::VectorXd z = precond_solve(rhs);
            Eigen::VectorXd res = rhs - opM(z);
            double rn = res.norm();
            for (int r = 0; r < 6 && rn > 1e-14 * (1.0 + rhs.norm()); ++r) {
                const Eigen::VectorXd z2 = z + precond_solve(res);
                const Eigen::VectorXd res2 = rhs - opM(z2);
                if (res2.norm() >= rn)
                    break; // preconditioner no longer contracts
                z = z2;
                res = res2;
                rn = res.norm();
            }
            return z;
        };
        auto msolve_mat = [&](const Eigen::MatrixXd& rhs) {
            Eigen::MatrixXd z(rhs.rows(), rhs.cols());
            for (Eigen::Index c = 0; c < rhs.cols(); ++c)
                z.col(c) = msolve_vec(rhs.col(c));
            return z;
        };

        const Eigen::VectorXd Hc = im.apply(Impl::Op::H, cK, sc, wnn);
        const Eigen::VectorXd AHc = im.AK * Hc;
        const double cHc = cK.dot(Hc);
        // M^{-1} [F, b + A H c]
        Eigen::MatrixXd rhs_cols(m, q + 1);
        if (q > 0)
            rhs_cols.leftCols(q) = im.F;
        rhs_cols.col(q) = b + AHc;
        const Eigen::MatrixXd Z = msolve_mat(rhs_cols);

        auto kkt_solve = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
                             const Eigen::VectorXd& r3, double r4, const Eigen::VectorXd& r5,
                             double r6, Eigen::VectorXd& dx, Eigen::VectorXd& dxf,
                             Eigen::VectorXd& dy, Eigen::VectorXd& ds, double& dtau,
                             double& dkappa) {
            const Eigen::VectorXd WTr5 = im.apply(Impl::Op::WT, r5, sc, wnn);
            const Eigen::VectorXd Hr2 = im.apply(Impl::Op::H, r2, sc, wnn);
            const Eigen::VectorXd g1 = r1 - im.AK * WTr5 - im.AK * Hr2;
            const double g3 = r4 + cK.dot(WTr5) + cK.dot(Hr2) + r6 / tau;
            const Eigen::VectorXd v = msolve_vec(g1);
            // small system in (dxf, dtau)
            Eigen::MatrixXd Ssys(q + 1, q + 1);
            Eigen::VectorXd srhs(q + 1);
            const Eigen::VectorXd bmh = b - AHc;
            if (q > 0) {
                Ssys.topLeftCorner(q, q) = im.F.transpose() * Z.leftCols(q);
                Ssys.block(0, q, q, 1) = cf - im.F.transpose() * Z.col(q);
                srhs.head(q) = r3 + im.F.transpose() * v;
            }
            Eigen::RowVectorXd brow(q + 1);
            if (q > 0)
                brow.head(q) = (-(bmh.transpose() * Z.leftCols(q)) - cf.transpose());
            brow[q] = bmh.dot(Z.col(q)) + cHc + kappa / tau;
            Ssys.row(q) = brow;
            srhs[q] = g3 - bmh.dot(v);
            const Eigen::VectorXd zsol = Ssys.partialPivLu().solve(srhs);
            dxf = q > 0 ? Eigen::VectorXd(zsol.head(q)) : Eigen::VectorXd();
            dtau = zsol[q];
            dy = v + Z.col(q) * dtau;
            if (q > 0)
                dy -= Z.leftCols(q) * dxf;
            ds = -(im.AK.transpose() * dy) + cK * dtau - r2;
            dx = WTr5 + im.apply(Impl::Op::H, Eigen::VectorXd(im.AK.transpose() * dy), sc, wnn) -
                 im.apply(Impl::Op::H, Eigen::VectorXd(cK * dtau), sc, wnn) + Hr2;
            dkappa = (r6 - kappa * dtau) / tau;
        };

        // affine (predictor) direction
        Eigen::VectorXd dx_a, dxf_a, dy_a, ds_a;
        double dtau_a, dkappa_a;
        {
            const Eigen::VectorXd d_s = -im.lambda_sq(sc, lnn);
            const Eigen::VectorXd r5 = im.lambda_div(d_s, sc, lnn);
            kkt_solve(-res_P, -res_D, q > 0 ? Eigen::VectorXd(-res_F) : Eigen::VectorXd(), -res_G,
                      r5, -tau * kappa, dx_a, dxf_a, dy_a, ds_a, dtau_a, dkappa_a);
        }
        double alpha_aff = 1.0;
        alpha_aff = std::min(alpha_aff, im.step_to_boundary(x, dx_a));
        alpha_aff = std::min(alpha_aff, im.step_to_boundary(s, ds_a));
        if (dtau_a < 0.0)
            alpha_aff = std::min(alpha_aff, -tau / dtau_a);
        if (dkappa_a < 0.0)
            alpha_aff = std::min(alpha_aff, -kappa / dkappa_a);
        const double mu_aff = ((x + alpha_aff * dx_a).dot(s + alpha_aff * ds_a) +
                               (tau + alpha_aff * dtau_a) * (kappa + alpha_aff * dkappa_a)) /
                              nu1;
        double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // combined (corrector) direction
        Eigen::VectorXd dx, dxf, dy, ds;
        double dtau, dkappa;
        {
            const Eigen::VectorXd px = im.apply(Impl::Op::WinvT, dx_a, sc, wnn);
            const Eigen::VectorXd qs = im.apply(Impl::Op::W, ds_a, sc, wnn);
            Eigen::VectorXd d_s = -im.lambda_sq(sc, lnn) - im.sym_prod(px, qs);
            for (const auto& p : im.psd)
                for (int k = 0; k < p.size; ++k)
                    d_s[p.offset + svec_index(p.size, k, k)] += sigma * mu;
            for (const auto& n : im.nonneg)
                d_s[n.coned_index] += sigma * mu;
            const Eigen::VectorXd r5 = im.lambda_div(d_s, sc, lnn);
            const double r6 = sigma * mu - tau * kappa - dtau_a * dkappa_a;
            kkt_solve(-res_P, -res_D, q > 0 ? Eigen::VectorXd(-res_F) : Eigen::VectorXd(), -res_G,
                      r5, r6, dx, dxf, dy, ds, dtau, dkappa);
        }

        if (opts.verbose) {
            Eigen::VectorXd e1 = im.AK * dx - b * dtau + res_P;
            if (q > 0)
                e1 += im.F * dxf;
            std::cerr << "   dir primal-row err " << e1.norm() << " vs rhs " << res_P.norm()
                      << "\n";
        }

        double alpha = kInf;
        alpha = std::min(alpha, im.step_to_boundary(x, dx));
        alpha = std::min(alpha, im.step_to_boundary(s, ds));
        if (dtau < 0.0)
            alpha = std::min(alpha, -tau / dtau);
        if (dkappa < 0.0)
            alpha = std::min(alpha, -kappa / dkappa);
        alpha = std::min(1.0, 0.99 * alpha);
        sol.trace.back().step = alpha;
        if (alpha < 1e-9)
            break;

        x += alpha * dx;
        s += alpha * ds;
        if (q > 0)
            xf += alpha * dxf;
        y += alpha * dy;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }

    // no convergence: report the best iterate
    unscale_and_fill(best.x, best.s, best.xf, best.y, best.tau, best.tau);
    sol.status = SolveStatus::numerical_failure;
    sol.message = "iteration limit or stalled step; best iterate attached";
    sol.iterations = iter;
    double tp, td, po, dobj2;
    original_residuals(tp, td, po, dobj2);
    sol.primal_residual = tp;
    sol.dual_residual = td;
    sol.obj_primal = po;
    sol.obj_dual = dobj2;
    sol.rel_gap = std::abs(po - dobj2) / (1.0 + std::abs(po) + std::abs(dobj2));
    return sol;
}

ConicSolution solve(const ConicProblem& problem, const SolveOptions& opts) {
    Solver s(problem);
    return s.solve(opts);
}

} // namespace mcbf::conic
