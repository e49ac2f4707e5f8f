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

#include "mcbf/sdr/fold.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace mcbf::sdr {

using model::ChannelSet;
using model::ErrorModel;
using model::LinkError;
using model::SystemConfig;

namespace {

// An ellipsoid whose worst-case channel deviation is below ~1e-5 of the
// presumed channel norm perturbs the optimum by less than the solver's
// feasibility tolerance while making the multiplier block numerically
// singular; such links are folded as exact CSI.
constexpr double kExactRadiusRel = 1e-5;

FoldedLink fold_one(const Eigen::VectorXcd& hhat, double scale, double sigma2,
                    const LinkError& err, int Nt) {
    FoldedLink out;
    const double sigma = std::sqrt(sigma2);
    out.h = (scale / sigma) * hhat;
    if (err.exact || scale == 0.0) {
        out.exact = true;
        return out;
    }
    const double hnorm = hhat.norm();
    if (hnorm > 0.0) {
        double emax; // largest error norm the ellipsoid admits
        if (err.spherical) {
            emax = err.radius;
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(err.Q, Eigen::EigenvaluesOnly);
            emax = 1.0 / std::sqrt(std::max(es.eigenvalues().minCoeff(), 1e-300));
        }
        if (emax <= kExactRadiusRel * hnorm) {
            out.exact = true;
            return out;
        }
    }
    out.exact = false;
    const double f = sigma2 / (scale * scale);
    out.Q = f * err.q_matrix(Nt);
    return out;
}

} // namespace

FoldedData fold(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err) {
    cfg.validate();
    ch.validate(cfg);
    err.validate();
    FoldedData out;
    out.Nc = cfg.Nc;
    out.K = cfg.K;
    out.Nt = cfg.Nt;
    out.L = cfg.L;
    out.links.resize(static_cast<size_t>(cfg.Nc * cfg.Nc * cfg.K));
    for (int m = 0; m < cfg.Nc; ++m)
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k)
                out.links[static_cast<size_t>(cfg.link(m, n, k))] =
                    fold_one(ch.h(m, n, k), ch.s(m, n, k), cfg.sigma2[cfg.nk(n, k)],
                             err.link(m, n, k), cfg.Nt);
    out.edge_links.resize(static_cast<size_t>(cfg.Nc * cfg.L));
    for (int m = 0; m < cfg.Nc; ++m)
        for (int l = 0; l < cfg.L; ++l)
            out.edge_links[static_cast<size_t>(cfg.elink(m, l))] =
                fold_one(ch.g(m, l), ch.s_edge(m, l), cfg.sigma2_edge[l], err.edge_link(m, l),
                         cfg.Nt);
    return out;
}

BsLocalData fold_bs_row(int n, const SystemConfig& cfg, const ChannelSet& ch,
                        const ErrorModel& err) {
    if (n < 0 || n >= cfg.Nc)
        throw std::invalid_argument("fold_bs_row: BS index out of range");
    BsLocalData out;
    out.n = n;
    out.Nc = cfg.Nc;
    out.K = cfg.K;
    out.Nt = cfg.Nt;
    out.alpha = cfg.alpha[n];
    out.gamma_own.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
        out.gamma_own[k] = cfg.gamma[cfg.nk(n, k)];
    out.to.resize(static_cast<size_t>(cfg.Nc * cfg.K));
    for (int m = 0; m < cfg.Nc; ++m)
        for (int k = 0; k < cfg.K; ++k)
            out.to[static_cast<size_t>(m * cfg.K + k)] =
                fold_one(ch.h(n, m, k), ch.s(n, m, k), cfg.sigma2[cfg.nk(m, k)],
                         err.link(n, m, k), cfg.Nt);
    return out;
}

} // namespace mcbf::sdr
