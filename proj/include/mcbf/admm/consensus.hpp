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

#ifndef MCBF_ADMM_CONSENSUS_HPP
#define MCBF_ADMM_CONSENSUS_HPP

#include <Eigen/Dense>
#include <vector>

namespace mcbf::admm {

/// Canonical orderings of the interference-coordination variables.
/// Global vector t (dimension Nc*(Nc-1)*K): transmitter-major, then receiving
/// cell in ascending order, then user:
///   [t_{01.}, ..., t_{0,Nc-1,.}, t_{10.}, ...].
/// Local vector t_n (dimension Nc*K): the K incoming totals T_nk first, then
/// the outgoing t_{n,m,k} for m != n ascending.
struct IciIndex {
    int Nc = 0, K = 0;

    int global_dim() const { return Nc * (Nc - 1) * K; }
    int local_dim() const { return Nc * K; }

    int global_of(int m, int n, int k) const {
        // m: transmitter, n: receiving cell (m != n), k: user
        const int pos = (n < m) ? n : n - 1;
        return (m * (Nc - 1) + pos) * K + k;
    }
    int local_T(int k) const { return k; }
    int local_out(int n, int m, int k) const {
        const int pos = (m < n) ? m : m - 1;
        return K + pos * K + k;
    }
};

/// The 0/1 maps t_n = E_n t plus a closed-form pseudo-inverse applier. The
/// Gram matrix E^T E decomposes into per-(receiver, user) blocks I + 11^T of
/// size Nc-1, inverted as I - 11^T/Nc; no dense factorization is needed.
class ConsensusMap {
  public:
    ConsensusMap(int Nc, int K);

    const IciIndex& index() const { return idx_; }

    Eigen::VectorXd apply_En(int n, const Eigen::VectorXd& t_global) const;
    // E^dagger applied to a stack of local vectors [y_0; ...; y_{Nc-1}]
    Eigen::VectorXd apply_pinv(const std::vector<Eigen::VectorXd>& y_stack) const;

    Eigen::MatrixXd dense_En(int n) const; // reference implementation for tests

  private:
    IciIndex idx_;
};

/// Penalty growth rule with saturation at one: c(q+1) = min(1, (q+1) c(q)).
double penalty_schedule(int q, double c_q);

struct BackhaulCost {
    long long ours = 0;     // real scalars exchanged per iteration
    long long baseline = 0; // per-link exchange of incoming and outgoing ICI
    double ratio = 0.0;
};
BackhaulCost backhaul_cost(int Nc, int K);

double normalized_accuracy(double p_q, double p_star);

} // namespace mcbf::admm

#endif
