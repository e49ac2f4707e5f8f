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

#include "mcbf/sdr/builders.hpp"

#include <stdexcept>
#include <string>

#include "mcbf/sdr/extract.hpp"

namespace mcbf::sdr {

using conic::ConicProblem;
using conic::HermitianConstraint;
using model::BeamformerSolution;
using model::ChannelSet;
using model::ErrorModel;
using model::SystemConfig;

void add_quadform_coeff(ConicProblem& p, int row, int wblock, const Eigen::VectorXcd& h,
                        double coeff) {
    const int n = static_cast<int>(h.size());
    for (int a = 0; a < n; ++a) {
        p.add_herm_re_coeff(row, wblock, a, a, coeff * std::norm(h[a]));
        for (int b = a + 1; b < n; ++b) {
            const std::complex<double> c = std::conj(h[a]) * h[b];
            p.add_herm_re_coeff(row, wblock, a, b, 2.0 * coeff * c.real());
            p.add_herm_im_coeff(row, wblock, a, b, -2.0 * coeff * c.imag());
        }
    }
}

namespace {

Eigen::MatrixXcd multiplier_matrix(const Eigen::MatrixXcd& Q) {
    // diag(Q, -1): the S-lemma multiplier enters on the diagonal blocks only
    const int n = static_cast<int>(Q.rows());
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    C.topLeftCorner(n, n) = Q;
    C(n, n) = -1.0;
    return C;
}

struct Builder {
    const SystemConfig& cfg;
    const FoldedData folded;
    SdrProblem sp;

    Builder(const SystemConfig& c, const ChannelSet& ch, const ErrorModel& err)
        : cfg(c), folded(fold(c, ch, err)) {
        sp.cfg = c;
        const int nk = cfg.Nc * cfg.K;
        const int nl = cfg.Nc * cfg.L;
        sp.W_blocks.assign(static_cast<size_t>(nk), -1);
        sp.F_blocks.assign(static_cast<size_t>(nl), -1);
        sp.lambda_ids.assign(static_cast<size_t>(cfg.Nc * cfg.Nc * cfg.K), -1);
        sp.t_ids.assign(static_cast<size_t>(cfg.Nc * cfg.Nc * cfg.K), -1);
        sp.lambda_edge_ids.assign(static_cast<size_t>(nl), -1);
        sp.eta_ids.assign(static_cast<size_t>(nl), -1);
    }

    void add_variables(bool with_edge) {
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k)
                sp.W_blocks[static_cast<size_t>(cfg.nk(n, k))] = sp.problem.add_hermitian_block(
                    cfg.Nt, "W_" + std::to_string(n) + "_" + std::to_string(k));
        if (with_edge)
            for (int n = 0; n < cfg.Nc; ++n)
                for (int l = 0; l < cfg.L; ++l)
                    sp.F_blocks[static_cast<size_t>(cfg.elink(n, l))] =
                        sp.problem.add_hermitian_block(
                            cfg.Nt, "F_" + std::to_string(n) + "_" + std::to_string(l));
        for (int n = 0; n < cfg.Nc; ++n) {
            for (int k = 0; k < cfg.K; ++k)
                sp.problem.add_herm_trace_obj(sp.W_blocks[static_cast<size_t>(cfg.nk(n, k))],
                                              cfg.alpha[n]);
            if (with_edge)
                for (int l = 0; l < cfg.L; ++l)
                    sp.problem.add_herm_trace_obj(sp.F_blocks[static_cast<size_t>(cfg.elink(n, l))],
                                                  cfg.alpha[n]);
        }
    }

    // the desired-signal-side constraint of user (n,k); LMI for ellipsoidal
    // error, scalar inequality when the intra-cell link is exact
    void add_signal_constraint(int n, int k, bool with_edge) {
        const FoldedLink& link = folded.link(n, n, k);
        const double gamma = cfg.gamma[cfg.nk(n, k)];
        // t slacks of the incoming interferers (created beforehand)
        if (link.exact) {
            const int row = sp.problem.add_constraint(1.0); // normalized noise
            add_quadform_coeff(sp.problem, row, sp.W_blocks[static_cast<size_t>(cfg.nk(n, k))],
                               link.h, 1.0 / gamma);
            for (int i = 0; i < cfg.K; ++i)
                if (i != k)
                    add_quadform_coeff(sp.problem, row,
                                       sp.W_blocks[static_cast<size_t>(cfg.nk(n, i))], link.h,
                                       -1.0);
            if (with_edge)
                for (int j = 0; j < cfg.L; ++j)
                    add_quadform_coeff(sp.problem, row,
                                       sp.F_blocks[static_cast<size_t>(cfg.elink(n, j))], link.h,
                                       -1.0);
            for (int m = 0; m < cfg.Nc; ++m)
                if (m != n)
                    sp.problem.add_scalar_coeff(
                        row, sp.t_ids[static_cast<size_t>(cfg.link(m, n, k))], -1.0);
            const int slack = sp.problem.add_nonneg();
            sp.problem.add_scalar_coeff(row, slack, -1.0);
            return;
        }
        const int lam = sp.problem.add_nonneg("lam_" + std::to_string(n) + std::to_string(n) +
                                              std::to_string(k));
        sp.lambda_ids[static_cast<size_t>(cfg.link(n, n, k))] = lam;
        HermitianConstraint lmi(sp.problem, cfg.Nt + 1,
                                "Phi_" + std::to_string(n) + "_" + std::to_string(k));
        lmi.add_congruence(link.h, sp.W_blocks[static_cast<size_t>(cfg.nk(n, k))], 1.0 / gamma);
        for (int i = 0; i < cfg.K; ++i)
            if (i != k)
                lmi.add_congruence(link.h, sp.W_blocks[static_cast<size_t>(cfg.nk(n, i))], -1.0);
        if (with_edge)
            for (int j = 0; j < cfg.L; ++j)
                lmi.add_congruence(link.h, sp.F_blocks[static_cast<size_t>(cfg.elink(n, j))],
                                   -1.0);
        lmi.add_scalar_matrix_term(lam, multiplier_matrix(link.Q));
        for (int m = 0; m < cfg.Nc; ++m)
            if (m != n)
                lmi.add_scalar_term(sp.t_ids[static_cast<size_t>(cfg.link(m, n, k))], -1.0,
                                    cfg.Nt, cfg.Nt);
        lmi.add_const(-1.0, cfg.Nt, cfg.Nt); // normalized noise power
    }

    // worst-case ICI power of BS m at user (n,k) bounded by the slack t
    void add_ici_constraint(int m, int n, int k, bool with_edge) {
        const FoldedLink& link = folded.link(m, n, k);
        const int t = sp.t_ids[static_cast<size_t>(cfg.link(m, n, k))];
        if (link.exact) {
            const int row = sp.problem.add_constraint(0.0);
            sp.problem.add_scalar_coeff(row, t, 1.0);
            for (int i = 0; i < cfg.K; ++i)
                add_quadform_coeff(sp.problem, row, sp.W_blocks[static_cast<size_t>(cfg.nk(m, i))],
                                   link.h, -1.0);
            if (with_edge)
                for (int j = 0; j < cfg.L; ++j)
                    add_quadform_coeff(sp.problem, row,
                                       sp.F_blocks[static_cast<size_t>(cfg.elink(m, j))], link.h,
                                       -1.0);
            const int slack = sp.problem.add_nonneg();
            sp.problem.add_scalar_coeff(row, slack, -1.0);
            return;
        }
        const int lam = sp.problem.add_nonneg("lam_" + std::to_string(m) + std::to_string(n) +
                                              std::to_string(k));
        sp.lambda_ids[static_cast<size_t>(cfg.link(m, n, k))] = lam;
        HermitianConstraint lmi(sp.problem, cfg.Nt + 1,
                                "Psi_" + std::to_string(m) + "_" + std::to_string(n) + "_" +
                                    std::to_string(k));
        for (int i = 0; i < cfg.K; ++i)
            lmi.add_congruence(link.h, sp.W_blocks[static_cast<size_t>(cfg.nk(m, i))], -1.0);
        if (with_edge)
            for (int j = 0; j < cfg.L; ++j)
                lmi.add_congruence(link.h, sp.F_blocks[static_cast<size_t>(cfg.elink(m, j))],
                                   -1.0);
        lmi.add_scalar_matrix_term(lam, multiplier_matrix(link.Q));
        lmi.add_scalar_term(t, 1.0, cfg.Nt, cfg.Nt);
    }

    // per-BS edge-user constraint with its share of the noise threshold
    void add_edge_constraint(int m, int l) {
        const FoldedLink& link = folded.edge(m, l);
        const double gamma = cfg.gamma_edge[l];
        const int eta = sp.problem.add_free("eta_" + std::to_string(m) + "_" + std::to_string(l));
        sp.eta_ids[static_cast<size_t>(cfg.elink(m, l))] = eta;
        if (link.exact) {
            const int row = sp.problem.add_constraint(0.0);
            add_quadform_coeff(sp.problem, row, sp.F_blocks[static_cast<size_t>(cfg.elink(m, l))],
                               link.h, 1.0 / gamma);
            for (int i = 0; i < cfg.K; ++i)
                add_quadform_coeff(sp.problem, row, sp.W_blocks[static_cast<size_t>(cfg.nk(m, i))],
                                   link.h, -1.0);
            for (int j = 0; j < cfg.L; ++j)
                if (j != l)
                    add_quadform_coeff(sp.problem, row,
                                       sp.F_blocks[static_cast<size_t>(cfg.elink(m, j))], link.h,
                                       -1.0);
            sp.problem.add_scalar_coeff(row, eta, -1.0);
            const int slack = sp.problem.add_nonneg();
            sp.problem.add_scalar_coeff(row, slack, -1.0);
            return;
        }
        const int lam = sp.problem.add_nonneg("lam_edge_" + std::to_string(m) + "_" +
                                              std::to_string(l));
        sp.lambda_edge_ids[static_cast<size_t>(cfg.elink(m, l))] = lam;
        HermitianConstraint lmi(sp.problem, cfg.Nt + 1,
                                "Edge_" + std::to_string(m) + "_" + std::to_string(l));
        lmi.add_congruence(link.h, sp.F_blocks[static_cast<size_t>(cfg.elink(m, l))], 1.0 / gamma);
        for (int i = 0; i < cfg.K; ++i)
            lmi.add_congruence(link.h, sp.W_blocks[static_cast<size_t>(cfg.nk(m, i))], -1.0);
        for (int j = 0; j < cfg.L; ++j)
            if (j != l)
                lmi.add_congruence(link.h, sp.F_blocks[static_cast<size_t>(cfg.elink(m, j))],
                                   -1.0);
        lmi.add_scalar_matrix_term(lam, multiplier_matrix(link.Q));
        lmi.add_scalar_term(eta, -1.0, cfg.Nt, cfg.Nt); // corner carries -lambda - eta
    }

    void add_t_variables() {
        // kept nonnegative: the ICI LMI already forces t >= 0, declaring the
        // sign improves presolve conditioning
        for (int m = 0; m < cfg.Nc; ++m)
            for (int n = 0; n < cfg.Nc; ++n)
                if (m != n)
                    for (int k = 0; k < cfg.K; ++k)
                        sp.t_ids[static_cast<size_t>(cfg.link(m, n, k))] = sp.problem.add_nonneg(
                            "t_" + std::to_string(m) + std::to_string(n) + std::to_string(k));
    }

    void add_robust_core(bool with_edge) {
        add_t_variables();
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k)
                add_signal_constraint(n, k, with_edge);
        for (int m = 0; m < cfg.Nc; ++m)
            for (int n = 0; n < cfg.Nc; ++n)
                if (m != n)
                    for (int k = 0; k < cfg.K; ++k)
                        add_ici_constraint(m, n, k, with_edge);
    }
};

} // namespace

SdrProblem build_nonrobust(const SystemConfig& cfg, const ChannelSet& ch) {
    if (cfg.K < 1)
        throw std::invalid_argument("build_nonrobust: K >= 1 required");
    Builder b(cfg, ch, ErrorModel::exact_csi(cfg.Nc, cfg.K, cfg.Nt, cfg.L));
    b.add_variables(false);
    for (int n = 0; n < cfg.Nc; ++n)
        for (int k = 0; k < cfg.K; ++k) {
            ConicProblem& p = b.sp.problem;
            const FoldedLink& link = b.folded.link(n, n, k);
            const int row = p.add_constraint(1.0);
            add_quadform_coeff(p, row, b.sp.W_blocks[static_cast<size_t>(cfg.nk(n, k))], link.h,
                               1.0 / cfg.gamma[cfg.nk(n, k)]);
            for (int i = 0; i < cfg.K; ++i)
                if (i != k)
                    add_quadform_coeff(p, row, b.sp.W_blocks[static_cast<size_t>(cfg.nk(n, i))],
                                       link.h, -1.0);
            for (int m = 0; m < cfg.Nc; ++m)
                if (m != n) {
                    const FoldedLink& cross = b.folded.link(m, n, k);
                    for (int i = 0; i < cfg.K; ++i)
                        add_quadform_coeff(p, row,
                                           b.sp.W_blocks[static_cast<size_t>(cfg.nk(m, i))],
                                           cross.h, -1.0);
                }
            const int slack = p.add_nonneg();
            p.add_scalar_coeff(row, slack, -1.0);
        }
    return std::move(b.sp);
}

SdrProblem build_robust_sdr(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err) {
    if (cfg.K < 1)
        throw std::invalid_argument("build_robust_sdr: K >= 1 required");
    Builder b(cfg, ch, err);
    b.sp.robust = true;
    b.add_variables(false);
    b.add_robust_core(false);
    return std::move(b.sp);
}

SdrProblem build_full_coord(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err) {
    if (cfg.L < 1)
        throw std::invalid_argument("build_full_coord: L >= 1 required");
    Builder b(cfg, ch, err);
    b.sp.robust = true;
    b.add_variables(true);
    b.add_robust_core(true);
    for (int m = 0; m < cfg.Nc; ++m)
        for (int l = 0; l < cfg.L; ++l)
            b.add_edge_constraint(m, l);
    // each edge user's noise shares must cover the (normalized) noise power
    for (int l = 0; l < cfg.L; ++l) {
        ConicProblem& p = b.sp.problem;
        const int row = p.add_constraint(1.0);
        for (int m = 0; m < cfg.Nc; ++m)
            p.add_scalar_coeff(row, b.sp.eta_ids[static_cast<size_t>(cfg.elink(m, l))], 1.0);
        const int slack = p.add_nonneg();
        p.add_scalar_coeff(row, slack, -1.0);
    }
    return std::move(b.sp);
}

BeamformerSolution extract_solution(const SdrProblem& sp, const conic::ConicSolution& cs,
                                    double rank_tol) {
    const SystemConfig& cfg = sp.cfg;
    BeamformerSolution sol;
    sol.status = cs.status;
    sol.objective = cs.obj_primal;
    sol.rel_gap = cs.rel_gap;
    sol.primal_residual = cs.primal_residual;
    sol.dual_residual = cs.dual_residual;
    sol.iterations = cs.iterations;
    sol.message = cs.message;

    const int nk = cfg.Nc * cfg.K;
    const int nl = cfg.Nc * cfg.L;
    sol.W.resize(static_cast<size_t>(nk));
    sol.w.resize(static_cast<size_t>(nk));
    sol.eig_ratio.assign(static_cast<size_t>(nk), 0.0);
    sol.F.resize(static_cast<size_t>(nl));
    sol.f.resize(static_cast<size_t>(nl));
    sol.eig_ratio_edge.assign(static_cast<size_t>(nl), 0.0);
    sol.p = Eigen::VectorXd::Zero(cfg.Nc);
    sol.lambda.assign(static_cast<size_t>(cfg.Nc * cfg.Nc * cfg.K), 0.0);
    sol.t.assign(static_cast<size_t>(cfg.Nc * cfg.Nc * cfg.K), 0.0);
    sol.lambda_edge.assign(static_cast<size_t>(nl), 0.0);
    sol.eta.assign(static_cast<size_t>(nl), 0.0);

    for (int n = 0; n < cfg.Nc; ++n) {
        for (int k = 0; k < cfg.K; ++k) {
            const size_t i = static_cast<size_t>(cfg.nk(n, k));
            sol.W[i] = cs.hermitian_value(sp.problem, sp.W_blocks[i]);
            sol.p[n] += sol.W[i].real().trace();
        }
        for (int l = 0; l < cfg.L; ++l) {
            const size_t i = static_cast<size_t>(cfg.elink(n, l));
            sol.F[i] = cs.hermitian_value(sp.problem, sp.F_blocks[i]);
            sol.p[n] += sol.F[i].real().trace();
        }
    }
    // beams carrying less than ~1e-7 of the total power are switched off;
    // their eigenstructure is solver noise and their SINR contribution is
    // below every constraint tolerance
    const double zero_floor = 1e-7 * sol.p.sum();
    for (int n = 0; n < cfg.Nc; ++n) {
        for (int k = 0; k < cfg.K; ++k) {
            const size_t i = static_cast<size_t>(cfg.nk(n, k));
            const RankOneResult r = extract_rank_one(sol.W[i], rank_tol, zero_floor);
            sol.w[i] = r.w;
            sol.eig_ratio[i] = r.eig_ratio;
        }
        for (int l = 0; l < cfg.L; ++l) {
            const size_t i = static_cast<size_t>(cfg.elink(n, l));
            const RankOneResult r = extract_rank_one(sol.F[i], rank_tol, zero_floor);
            sol.f[i] = r.w;
            sol.eig_ratio_edge[i] = r.eig_ratio;
        }
    }
    for (int m = 0; m < cfg.Nc; ++m)
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k) {
                const size_t i = static_cast<size_t>(cfg.link(m, n, k));
                if (sp.lambda_ids[i] >= 0)
                    sol.lambda[i] = cs.scalar(sp.lambda_ids[i]);
                if (sp.t_ids[i] >= 0)
                    sol.t[i] = cs.scalar(sp.t_ids[i]) * cfg.sigma2[cfg.nk(n, k)];
            }
    for (int m = 0; m < cfg.Nc; ++m)
        for (int l = 0; l < cfg.L; ++l) {
            const size_t i = static_cast<size_t>(cfg.elink(m, l));
            if (sp.lambda_edge_ids[i] >= 0)
                sol.lambda_edge[i] = cs.scalar(sp.lambda_edge_ids[i]);
            if (sp.eta_ids[i] >= 0)
                sol.eta[i] = cs.scalar(sp.eta_ids[i]) * cfg.sigma2_edge[l];
        }
    return sol;
}

BeamformerSolution solve_beamformers(const SdrProblem& sp, const conic::SolveOptions& opts,
                                     double rank_tol) {
    const conic::ConicSolution cs = conic::solve(sp.problem, opts);
    return extract_solution(sp, cs, rank_tol);
}

} // namespace mcbf::sdr
