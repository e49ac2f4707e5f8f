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

#ifndef MCBF_SDR_FOLD_HPP
#define MCBF_SDR_FOLD_HPP

#include "mcbf/model/types.hpp"

namespace mcbf::sdr {

/// Per-link data in solver units. The CSI error lives on the small-scale
/// term (effective channel = scale*(hhat+e)), so the large-scale amplitude
/// folds into both the presumed channel and the ellipsoid:
///   h_eff = (scale/sigma) * hhat,   Q_eff = sigma^2/scale^2 * Q,
/// with the receiving user's noise normalized to one. Beamformer matrices
/// stay in watts. A link with zero large-scale amplitude degenerates to an
/// exact link with zero channel.
struct FoldedLink {
    Eigen::VectorXcd h;
    bool exact = false;
    Eigen::MatrixXcd Q; // valid when !exact
};

struct FoldedData {
    int Nc = 0, K = 0, Nt = 0, L = 0;
    std::vector<FoldedLink> links;      // (m*Nc+n)*K+k
    std::vector<FoldedLink> edge_links; // m*L+l

    const FoldedLink& link(int m, int n, int k) const {
        return links[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    const FoldedLink& edge(int m, int l) const {
        return edge_links[static_cast<size_t>(m * L + l)];
    }
};

FoldedData fold(const model::SystemConfig& cfg, const model::ChannelSet& ch,
                const model::ErrorModel& err);

/// The slice of folded data a single BS is allowed to see: only its own
/// transmit row {h_(n,m,k)}_{m,k}, plus the public design constants.
struct BsLocalData {
    int n = 0;
    int Nc = 0, K = 0, Nt = 0;
    std::vector<FoldedLink> to; // target user (m,k) at index m*K+k
    Eigen::VectorXd gamma_own;  // K targets of the BS's own users
    double alpha = 1.0;

    const FoldedLink& link_to(int m, int k) const {
        return to[static_cast<size_t>(m * K + k)];
    }
};

BsLocalData fold_bs_row(int n, const model::SystemConfig& cfg, const model::ChannelSet& ch,
                        const model::ErrorModel& err);

} // namespace mcbf::sdr

#endif
