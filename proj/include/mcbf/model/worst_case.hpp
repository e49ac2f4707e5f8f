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

#ifndef MCBF_MODEL_WORST_CASE_HPP
#define MCBF_MODEL_WORST_CASE_HPP

#include <Eigen/Dense>

namespace mcbf::model {

enum class Sense { minimize, maximize };

struct WorstCaseResult {
    double value = 0.0;
    Eigen::VectorXcd e_star;
    double multiplier = 0.0; // Lagrange multiplier of the ellipsoid constraint
    bool boundary = false;
};

/// Exact optimizer of (h+e)^H M (h+e) over the ellipsoid e^H Q e <= 1,
/// M Hermitian (indefinite allowed), Q Hermitian positive definite.
///
/// Whitens u = Q^{1/2} e and solves the trust-region subproblem on the unit
/// ball by eigendecomposition plus a monotone 1-D root-find on the Lagrange
/// multiplier; the hard case is resolved by adding the boundary null-space
/// component explicitly. The returned point is verified against feasibility
/// and the first-order conditions before returning.
WorstCaseResult worst_case_quadratic(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& M,
                                     const Eigen::MatrixXcd& Q, Sense sense);

/// Real trust-region subproblem: minimize u^T B u + 2 g^T u over ||u|| <= 1.
/// Exposed for independent testing.
struct TrsResult {
    Eigen::VectorXd u;
    double value = 0.0;
    double multiplier = 0.0;
    bool boundary = false;
    bool hard_case = false;
};
TrsResult trs_unit_ball(const Eigen::MatrixXd& B, const Eigen::VectorXd& g);

} // namespace mcbf::model

#endif
