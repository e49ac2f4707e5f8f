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

#include "mcbf/model/sinr.hpp"

#include <stdexcept>

namespace mcbf::model {

namespace {

double abs2(const std::complex<double>& z) { return std::norm(z); }

void check_beams(const SystemConfig& cfg, const BeamVectors& w) {
    if (static_cast<int>(w.size()) != cfg.Nc * cfg.K)
        throw std::invalid_argument("sinr: expected Nc*K beam vectors");
    for (const auto& v : w)
        if (v.size() != cfg.Nt)
            throw std::invalid_argument("sinr: beam vector length mismatch");
}

void check_edge_beams(const SystemConfig& cfg, const EdgeBeamVectors& f) {
    if (static_cast<int>(f.size()) != cfg.Nc * cfg.L)
        throw std::invalid_argument("sinr: expected Nc*L edge beam vectors");
    for (const auto& v : f)
        if (v.size() != cfg.Nt)
            throw std::invalid_argument("sinr: edge beam vector length mismatch");
}

} // namespace

TrueChannels TrueChannels::nominal(const ChannelSet& ch) {
    TrueChannels t;
    t.Nc = ch.Nc;
    t.K = ch.K;
    t.Nt = ch.Nt;
    t.L = ch.L;
    t.h.resize(ch.hhat.size());
    for (size_t i = 0; i < ch.hhat.size(); ++i)
        t.h[i] = ch.scale[i] * ch.hhat[i];
    t.g.resize(ch.ghat.size());
    for (size_t i = 0; i < ch.ghat.size(); ++i)
        t.g[i] = ch.scale_edge[i] * ch.ghat[i];
    return t;
}

double sinr(const SystemConfig& cfg, int n, int k, const BeamVectors& w, const TrueChannels& ch) {
    check_beams(cfg, w);
    if (n < 0 || n >= cfg.Nc || k < 0 || k >= cfg.K)
        throw std::invalid_argument("sinr: user index out of range");
    const Eigen::VectorXcd& hnn = ch.at(n, n, k);
    const double signal = abs2(hnn.dot(w[static_cast<size_t>(cfg.nk(n, k))]));
    double interf = 0.0;
    for (int i = 0; i < cfg.K; ++i)
        if (i != k)
            interf += abs2(hnn.dot(w[static_cast<size_t>(cfg.nk(n, i))]));
    for (int m = 0; m < cfg.Nc; ++m) {
        if (m == n)
            continue;
        const Eigen::VectorXcd& hmn = ch.at(m, n, k);
        for (int i = 0; i < cfg.K; ++i)
            interf += abs2(hmn.dot(w[static_cast<size_t>(cfg.nk(m, i))]));
    }
    return signal / (interf + cfg.sigma2[cfg.nk(n, k)]);
}

double sinr_intra_full(const SystemConfig& cfg, int n, int k, const BeamVectors& w,
                       const EdgeBeamVectors& f, const TrueChannels& ch) {
    if (cfg.L < 1)
        throw std::invalid_argument("sinr_intra_full: L >= 1 required");
    check_beams(cfg, w);
    check_edge_beams(cfg, f);
    const Eigen::VectorXcd& hnn = ch.at(n, n, k);
    const double signal = abs2(hnn.dot(w[static_cast<size_t>(cfg.nk(n, k))]));
    double interf = 0.0;
    for (int i = 0; i < cfg.K; ++i)
        if (i != k)
            interf += abs2(hnn.dot(w[static_cast<size_t>(cfg.nk(n, i))]));
    for (int m = 0; m < cfg.Nc; ++m) {
        const Eigen::VectorXcd& hmn = ch.at(m, n, k);
        if (m != n)
            for (int i = 0; i < cfg.K; ++i)
                interf += abs2(hmn.dot(w[static_cast<size_t>(cfg.nk(m, i))]));
        for (int j = 0; j < cfg.L; ++j)
            interf += abs2(hmn.dot(f[static_cast<size_t>(m * cfg.L + j)]));
    }
    return signal / (interf + cfg.sigma2[cfg.nk(n, k)]);
}

double sinr_edge(const SystemConfig& cfg, int l, const BeamVectors& w, const EdgeBeamVectors& f,
                 const TrueChannels& ch) {
    if (cfg.L < 1)
        throw std::invalid_argument("sinr_edge: L >= 1 required");
    if (l < 0 || l >= cfg.L)
        throw std::invalid_argument("sinr_edge: edge user index out of range");
    check_beams(cfg, w);
    check_edge_beams(cfg, f);
    // The desired streams from all BSs add up incoherently in power; see the
    // uncorrelated-delay argument behind the edge-user SINR expression.
    double signal = 0.0;
    double interf = 0.0;
    for (int m = 0; m < cfg.Nc; ++m) {
        const Eigen::VectorXcd& gml = ch.at_edge(m, l);
        signal += abs2(gml.dot(f[static_cast<size_t>(m * cfg.L + l)]));
        for (int i = 0; i < cfg.K; ++i)
            interf += abs2(gml.dot(w[static_cast<size_t>(cfg.nk(m, i))]));
        for (int j = 0; j < cfg.L; ++j)
            if (j != l)
                interf += abs2(gml.dot(f[static_cast<size_t>(m * cfg.L + j)]));
    }
    return signal / (interf + cfg.sigma2_edge[l]);
}

} // namespace mcbf::model
