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

#ifndef MCBF_SDR_EXTRACT_HPP
#define MCBF_SDR_EXTRACT_HPP

#include <Eigen/Dense>
#include <optional>

namespace mcbf::sdr {

struct RankOneResult {
    std::optional<Eigen::VectorXcd> w; // set when the eigenvalue ratio passes
    double eig_ratio = 0.0;            // lambda2 / lambda1
    bool zero = false;                 // tr(W) ~ 0 (returns the zero vector)
};

/// Rank-one decomposition W ~ w w^H. The returned vector is phase-normalized
/// so its largest-magnitude entry is real positive. W must be PSD up to
/// -rank_tol * I. A W with eigenvalue ratio above rank_tol yields only the
/// report (w unset); this deliberately surfaces relaxation failures instead
/// of approximating them away. A trace at or below zero_tol counts as a
/// switched-off beam and extracts to the zero vector (callers pass a floor
/// relative to the solution's power scale).
RankOneResult extract_rank_one(const Eigen::MatrixXcd& W, double rank_tol = 1e-6,
                               double zero_tol = 0.0);

} // namespace mcbf::sdr

#endif
