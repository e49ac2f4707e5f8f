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

#ifndef MCBF_SDR_BUILDERS_HPP
#define MCBF_SDR_BUILDERS_HPP

#include "mcbf/conic/solver.hpp"
#include "mcbf/sdr/fold.hpp"

namespace mcbf::sdr {

/// A built optimization problem plus the bookkeeping to map conic blocks
/// back to beamformer quantities. t variables are kept in solver units
/// (receiver-noise-normalized); extract_solution converts them to watts.
struct SdrProblem {
    conic::ConicProblem problem;
    model::SystemConfig cfg;
    bool robust = false;
    std::vector<int> W_blocks;        // Nc*K
    std::vector<int> F_blocks;        // Nc*L
    std::vector<int> lambda_ids;      // Nc*Nc*K, -1 where no multiplier exists
    std::vector<int> t_ids;           // Nc*Nc*K, -1 on m == n
    std::vector<int> lambda_edge_ids; // Nc*L
    std::vector<int> eta_ids;         // Nc*L
};

// Sum-power minimization under nominal-CSI SINR constraints (the SDR of the
// perfect-CSI design; tight for this problem class).
SdrProblem build_nonrobust(const model::SystemConfig& cfg, const model::ChannelSet& ch);

// Worst-case robust design: S-lemma LMIs for the desired-signal side and one
// per-interferer LMI bounding the worst-case ICI power by a slack t. Exact
// (zero-error) links use the scalar form of the same constraint.
SdrProblem build_robust_sdr(const model::SystemConfig& cfg, const model::ChannelSet& ch,
                            const model::ErrorModel& err);

// Fully coordinated extension: cell-edge users receive a stream from every
// BS; adds per-BS edge LMIs with a free noise-share split and augments the
// intra-cell LMIs with the edge-beam interference.
SdrProblem build_full_coord(const model::SystemConfig& cfg, const model::ChannelSet& ch,
                            const model::ErrorModel& err);

model::BeamformerSolution extract_solution(const SdrProblem& sp, const conic::ConicSolution& cs,
                                           double rank_tol = 1e-6);

model::BeamformerSolution solve_beamformers(const SdrProblem& sp,
                                            const conic::SolveOptions& opts = {},
                                            double rank_tol = 1e-6);

// Adds coeff * h^H W h (a real functional of a Hermitian block) to a row.
void add_quadform_coeff(conic::ConicProblem& p, int row, int wblock, const Eigen::VectorXcd& h,
                        double coeff);

} // namespace mcbf::sdr

#endif
