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

#include "mcbf/model/types.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace mcbf::model {

void SystemConfig::validate() const {
    if (Nc < 1 || K < 0 || Nt < 1 || L < 0)
        throw std::invalid_argument("SystemConfig: Nc>=1, K>=0, Nt>=1, L>=0 required");
    if (gamma.size() != Nc * K || sigma2.size() != Nc * K)
        throw std::invalid_argument("SystemConfig: gamma/sigma2 must have Nc*K entries");
    if (alpha.size() != Nc)
        throw std::invalid_argument("SystemConfig: alpha must have Nc entries");
    if (K > 0 && ((gamma.array() <= 0.0).any() || (sigma2.array() <= 0.0).any()))
        throw std::invalid_argument("SystemConfig: gamma and sigma2 must be positive");
    if ((alpha.array() <= 0.0).any())
        throw std::invalid_argument("SystemConfig: alpha must be positive");
    if (L > 0) {
        if (gamma_edge.size() != L || sigma2_edge.size() != L)
            throw std::invalid_argument("SystemConfig: edge-user fields must have L entries");
        if ((gamma_edge.array() <= 0.0).any() || (sigma2_edge.array() <= 0.0).any())
            throw std::invalid_argument("SystemConfig: edge targets and noise must be positive");
    }
}

SystemConfig SystemConfig::uniform(int Nc, int K, int Nt, double gamma_lin, double sigma2_w,
                                   int L, double gamma_edge_lin, double sigma2_edge_w) {
    SystemConfig cfg;
    cfg.Nc = Nc;
    cfg.K = K;
    cfg.Nt = Nt;
    cfg.L = L;
    cfg.gamma = Eigen::VectorXd::Constant(Nc * K, gamma_lin);
    cfg.sigma2 = Eigen::VectorXd::Constant(Nc * K, sigma2_w);
    cfg.alpha = Eigen::VectorXd::Ones(Nc);
    if (L > 0) {
        cfg.gamma_edge = Eigen::VectorXd::Constant(L, gamma_edge_lin);
        cfg.sigma2_edge = Eigen::VectorXd::Constant(L, sigma2_edge_w);
    }
    cfg.validate();
    return cfg;
}

ChannelSet ChannelSet::zeros(int Nc, int K, int Nt, int L) {
    ChannelSet ch;
    ch.Nc = Nc;
    ch.K = K;
    ch.Nt = Nt;
    ch.L = L;
    ch.hhat.assign(static_cast<size_t>(Nc * Nc * K), Eigen::VectorXcd::Zero(Nt));
    ch.scale.assign(static_cast<size_t>(Nc * Nc * K), 1.0);
    ch.ghat.assign(static_cast<size_t>(Nc * L), Eigen::VectorXcd::Zero(Nt));
    ch.scale_edge.assign(static_cast<size_t>(Nc * L), 1.0);
    return ch;
}

void ChannelSet::validate(const SystemConfig& cfg) const {
    if (Nc != cfg.Nc || K != cfg.K || Nt != cfg.Nt || L != cfg.L)
        throw std::invalid_argument("ChannelSet: dimensions do not match SystemConfig");
    if (hhat.size() != static_cast<size_t>(Nc * Nc * K) || hhat.size() != scale.size())
        throw std::invalid_argument("ChannelSet: wrong number of links");
    for (const auto& v : hhat)
        if (v.size() != Nt)
            throw std::invalid_argument("ChannelSet: channel vector length mismatch");
    for (double s0 : scale)
        if (s0 < 0.0)
            throw std::invalid_argument("ChannelSet: scale factors must be >= 0");
    if (ghat.size() != static_cast<size_t>(Nc * L) || ghat.size() != scale_edge.size())
        throw std::invalid_argument("ChannelSet: wrong number of edge links");
    for (const auto& v : ghat)
        if (v.size() != Nt)
            throw std::invalid_argument("ChannelSet: edge channel vector length mismatch");
}

Eigen::MatrixXcd LinkError::q_matrix(int Nt) const {
    if (exact)
        throw std::invalid_argument("LinkError: exact link has no finite Q");
    if (spherical) {
        if (radius <= 0.0)
            throw std::invalid_argument("LinkError: spherical radius must be > 0");
        return Eigen::MatrixXcd::Identity(Nt, Nt) / (radius * radius);
    }
    return Q;
}

bool ErrorModel::all_intra_exact() const {
    for (int n = 0; n < Nc; ++n)
        for (int k = 0; k < K; ++k)
            if (!link(n, n, k).exact)
                return false;
    return true;
}

bool ErrorModel::all_spherical() const {
    for (const auto& l : links)
        if (!l.exact && !l.spherical)
            return false;
    for (const auto& l : edge_links)
        if (!l.exact && !l.spherical)
            return false;
    return true;
}

ErrorModel ErrorModel::exact_csi(int Nc, int K, int Nt, int L) {
    ErrorModel e;
    e.Nc = Nc;
    e.K = K;
    e.Nt = Nt;
    e.L = L;
    LinkError le;
    le.exact = true;
    e.links.assign(static_cast<size_t>(Nc * Nc * K), le);
    e.edge_links.assign(static_cast<size_t>(Nc * L), le);
    return e;
}

ErrorModel ErrorModel::spherical(int Nc, int K, int Nt, double eps_intra, double eps_cross, int L,
                                 double eps_edge) {
    ErrorModel e;
    e.Nc = Nc;
    e.K = K;
    e.Nt = Nt;
    e.L = L;
    e.links.resize(static_cast<size_t>(Nc * Nc * K));
    for (int m = 0; m < Nc; ++m)
        for (int n = 0; n < Nc; ++n)
            for (int k = 0; k < K; ++k) {
                LinkError le;
                le.spherical = true;
                le.radius = (m == n) ? eps_intra : eps_cross;
                le.exact = le.radius == 0.0;
                e.links[static_cast<size_t>((m * Nc + n) * K + k)] = le;
            }
    LinkError ee;
    ee.spherical = true;
    ee.radius = eps_edge;
    ee.exact = eps_edge == 0.0;
    e.edge_links.assign(static_cast<size_t>(Nc * L), ee);
    return e;
}

void ErrorModel::validate() const {
    auto check = [&](const LinkError& l) {
        if (l.exact)
            return;
        if (l.spherical) {
            if (l.radius <= 0.0)
                throw std::invalid_argument("ErrorModel: spherical radius must be > 0");
            return;
        }
        if (l.Q.rows() != Nt || l.Q.cols() != Nt)
            throw std::invalid_argument("ErrorModel: Q dimension mismatch");
        if ((l.Q - l.Q.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + l.Q.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("ErrorModel: Q must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l.Q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("ErrorModel: Q must be positive definite");
    };
    for (const auto& l : links)
        check(l);
    for (const auto& l : edge_links)
        check(l);
}

bool BeamformerSolution::rank_one(double rank_tol) const {
    for (size_t i = 0; i < W.size(); ++i)
        if (!w[i] || eig_ratio[i] > rank_tol)
            return false;
    for (size_t i = 0; i < F.size(); ++i)
        if (!f[i] || eig_ratio_edge[i] > rank_tol)
            return false;
    return true;
}

double BeamformerSolution::max_eig_ratio() const {
    double r = 0.0;
    for (double v : eig_ratio)
        r = std::max(r, v);
    for (double v : eig_ratio_edge)
        r = std::max(r, v);
    return r;
}

} // namespace mcbf::model
