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

#ifndef MCBF_ADMM_SUBPROBLEM_HPP
#define MCBF_ADMM_SUBPROBLEM_HPP

#include <memory>

#include "mcbf/admm/consensus.hpp"
#include "mcbf/conic/solver.hpp"
#include "mcbf/sdr/fold.hpp"

namespace mcbf::admm {

/// Consensus state slice a BS sees in one round.
struct RoundInput {
    Eigen::VectorXd En_t; // E_n t(q)
    double rho = 0.0;     // rho_n(q)
    Eigen::VectorXd nu;   // nu_n(q)
    double mu = 0.0;      // mu_n(q)
    double c = 0.0;       // penalty c(q)
};

struct LocalResult {
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    Eigen::VectorXd t_local; // t_n(q+1), local ordering, receiver-noise units
    double p = 0.0;          // p_n(q+1), watts
    std::vector<Eigen::MatrixXcd> W; // K beamformer matrices, watts
    Eigen::VectorXd lambda;          // per outgoing link (m*K+k; own-cell rows hold Phi multipliers)
    double primal_residual = 0.0;
    int iterations = 0;
};

/// The per-BS beamforming subproblem of the distributed algorithm:
///   min  alpha_n p + (c/2)||E_n t(q) - t_n||^2 + (c/2)(rho_n(q) - p)^2
///        - nu_n(q)' t_n - mu_n(q) p
///   over the BS's worst-case constraint set (own-user LMIs with the
///   incoming totals T_nk, outgoing-interference LMIs with t_nmk caps,
///   p = sum_k tr W_nk).
///
/// The constraint structure is built once from the BS's own transmit row;
/// each round only rewrites objective coefficients and right-hand sides. The
/// quadratic penalties are carried by 2x2 PSD epigraph blocks.
class BsSubproblem {
  public:
    explicit BsSubproblem(const sdr::BsLocalData& local);
    ~BsSubproblem();
    BsSubproblem(const BsSubproblem&) = delete;
    BsSubproblem& operator=(const BsSubproblem&) = delete;

    LocalResult solve(const RoundInput& in, const conic::SolveOptions& opts = {});

    const sdr::BsLocalData& local() const { return local_; }
    const conic::ConicProblem& problem() const { return prob_; }

  private:
    void build();

    sdr::BsLocalData local_;
    IciIndex idx_;
    conic::ConicProblem prob_;
    std::unique_ptr<conic::Solver> solver_;
    std::vector<int> w_blocks_;   // K
    std::vector<int> t_ids_;      // Nc*K, local ordering
    std::vector<int> lambda_ids_; // Nc*K (target-major m*K+k), -1 for exact links
    int p_id_ = -1;
    std::vector<int> epi_rows_; // X12 + t_i = [E_n t]_i
    std::vector<int> epi_blocks_;
    int epi_p_row_ = -1;
    int epi_p_block_ = -1;
};

struct RestoreResult {
    bool feasible = false;
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    std::vector<Eigen::MatrixXcd> W;
    double p = 0.0;
};

/// The final per-BS power minimization with the consented ICI budgets frozen
/// (both the incoming totals and the outgoing caps come from E_n t). On
/// success the combined per-BS solutions are feasible for the centralized
/// relaxation; infeasibility is an expected outcome when consensus stopped
/// too early and is reported as a status, not an error.
RestoreResult restore_feasibility(const sdr::BsLocalData& local, const Eigen::VectorXd& En_t,
                                  const conic::SolveOptions& opts = {});

} // namespace mcbf::admm

#endif
