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

#ifndef MCBF_MODEL_SINR_HPP
#define MCBF_MODEL_SINR_HPP

#include "mcbf/model/types.hpp"

namespace mcbf::model {

/// True-CSI channel vectors for SINR evaluation, indexed like ChannelSet
/// links. Typically built as scale*(hhat+e) for some error draw.
struct TrueChannels {
    int Nc = 0, K = 0, Nt = 0, L = 0;
    std::vector<Eigen::VectorXcd> h; // (m*Nc+n)*K+k
    std::vector<Eigen::VectorXcd> g; // m*L+l

    const Eigen::VectorXcd& at(int m, int n, int k) const {
        return h[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    const Eigen::VectorXcd& at_edge(int m, int l) const {
        return g[static_cast<size_t>(m * L + l)];
    }

    static TrueChannels nominal(const ChannelSet& ch); // scale * hhat, zero error
};

using BeamVectors = std::vector<Eigen::VectorXcd>; // n*K+k
using EdgeBeamVectors = std::vector<Eigen::VectorXcd>; // n*L+l

// Received SINR of user (n,k) when only per-cell streams exist.
double sinr(const SystemConfig& cfg, int n, int k, const BeamVectors& w, const TrueChannels& ch);

// Received SINRs when edge users are served coherently by all BSs.
double sinr_intra_full(const SystemConfig& cfg, int n, int k, const BeamVectors& w,
                       const EdgeBeamVectors& f, const TrueChannels& ch);
double sinr_edge(const SystemConfig& cfg, int l, const BeamVectors& w, const EdgeBeamVectors& f,
                 const TrueChannels& ch);

} // namespace mcbf::model

#endif
