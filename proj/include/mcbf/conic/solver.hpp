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

#ifndef MCBF_CONIC_SOLVER_HPP
#define MCBF_CONIC_SOLVER_HPP

#include <memory>
#include <string>
#include <vector>

#include "mcbf/conic/hermitian.hpp"
#include "mcbf/conic/problem.hpp"

namespace mcbf::conic {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SolveStatus s);

struct SolveOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iters = 200;
    bool verbose = false;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    double obj_primal = 0.0;
    double obj_dual = 0.0;
    double rel_gap = 0.0;
    double primal_residual = 0.0; // max relative equality-constraint violation
    double dual_residual = 0.0;
    int iterations = 0;
    std::string message;

    // Primal block values (by block id; scalar blocks also mirrored in
    // scalar_values). For infeasible/unbounded statuses these hold the
    // certificate ray instead and is_certificate is set.
    std::vector<Eigen::MatrixXd> psd_values;
    std::vector<double> scalar_values;
    std::vector<Eigen::MatrixXd> psd_duals; // dual slack per psd block
    std::vector<double> scalar_duals;
    Eigen::VectorXd eq_duals; // y, original row indexing
    bool is_certificate = false;

    struct IterStat {
        double pobj, dobj, pres, dres, gap, mu, step;
    };
    std::vector<IterStat> trace;

    bool optimal() const { return status == SolveStatus::optimal; }
    Eigen::MatrixXcd hermitian_value(const ConicProblem& p, int block) const;
    double scalar(int block) const { return scalar_values[static_cast<size_t>(block)]; }
};

/// Primal-dual path-following interior-point method on the homogeneous
/// self-dual embedding, with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector steps. Free scalars are carried outside the cone and
/// handled directly in the KKT system. Construction assembles and
/// equilibrates the constraint matrix and performs the rank-revealing
/// presolve; solve() may then be called repeatedly after right-hand-side or
/// objective updates on the same ConicProblem.
class Solver {
  public:
    explicit Solver(const ConicProblem& problem);
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    ConicSolution solve(const SolveOptions& opts = {});

    int removed_rows() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ConicSolution solve(const ConicProblem& problem, const SolveOptions& opts = {});

} // namespace mcbf::conic

#endif
