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

#ifndef MCBF_MODEL_VALIDATE_HPP
#define MCBF_MODEL_VALIDATE_HPP

#include <random>

#include "mcbf/model/sinr.hpp"
#include "mcbf/model/types.hpp"

namespace mcbf::model {

struct RobustnessReport {
    double violation_rate = 0.0; // fraction of (sample, user) pairs below target
    double min_achieved_sinr = 0.0; // linear, over all samples and users
    Eigen::MatrixXd sampled_sinr;   // (Nc*K + L) x n_samples, linear
    // exact (not sampled) per-user worst case over the error ellipsoids
    Eigen::VectorXd worst_case_sinr; // Nc*K + L, linear
    Eigen::VectorXd worst_ici;       // per link (m*Nc+n)*K+k, watts; 0 on m == n
    double min_constraint_slack = 0.0; // watts, min over users at the target SINRs
};

/// Monte-Carlo outage check plus the exact per-constraint worst case.
///
/// Draws n_samples error realizations per link, uniform over each solid
/// ellipsoid with a forced quota of boundary points (worst cases live on the
/// boundary), evaluates the achieved SINRs with h = scale*(hhat+e), and
/// reports the fraction below target. Independently, the exact worst-case
/// SINR of every user is computed with the trust-region oracle (bisection on
/// the target), which certifies the decomposed worst-case constraints.
RobustnessReport validate_robustness(const SystemConfig& cfg, const ChannelSet& ch,
                                     const ErrorModel& err, const BeamformerSolution& sol,
                                     int n_samples, std::mt19937_64& rng,
                                     double boundary_fraction = 0.5);

/// Exact worst-case SINR of intra-cell user (n,k) for given beamformer
/// matrices (PSD form), via bisection over the trust-region oracle.
double worst_case_sinr_user(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err,
                            const std::vector<Eigen::MatrixXcd>& W,
                            const std::vector<Eigen::MatrixXcd>& F, int n, int k);
double worst_case_sinr_edge_user(const SystemConfig& cfg, const ChannelSet& ch,
                                 const ErrorModel& err, const std::vector<Eigen::MatrixXcd>& W,
                                 const std::vector<Eigen::MatrixXcd>& F, int l);

/// Exact worst-case received interference power (watts) from BS m at user
/// (n,k), i.e. the tight value of the ICI slack for the given beamformers.
double worst_ici_power(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err,
                       const std::vector<Eigen::MatrixXcd>& W,
                       const std::vector<Eigen::MatrixXcd>& F, int m, int n, int k);

} // namespace mcbf::model

#endif
