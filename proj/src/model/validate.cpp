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

#include "mcbf/model/validate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcbf/model/worst_case.hpp"

namespace mcbf::model {

namespace {

// min_e (h+e)^H M (h+e) over the link's ellipsoid (raw units; M already
// carries scale^2). Exact links evaluate at e = 0.
double link_min(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& M, const LinkError& err,
                int Nt) {
    if (err.exact)
        return std::real(h.dot(M * h));
    return worst_case_quadratic(h, M, err.q_matrix(Nt), Sense::minimize).value;
}

double link_max(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& M, const LinkError& err,
                int Nt) {
    if (err.exact)
        return std::real(h.dot(M * h));
    return worst_case_quadratic(h, M, err.q_matrix(Nt), Sense::maximize).value;
}

Eigen::MatrixXcd sum_tx_power(const SystemConfig& cfg, const std::vector<Eigen::MatrixXcd>& W,
                              const std::vector<Eigen::MatrixXcd>& F, int m) {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(cfg.Nt, cfg.Nt);
    for (int i = 0; i < cfg.K; ++i)
        P += W[static_cast<size_t>(cfg.nk(m, i))];
    for (int j = 0; j < cfg.L; ++j)
        P += F[static_cast<size_t>(m * cfg.L + j)];
    return P;
}

} // namespace

double worst_ici_power(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err,
                       const std::vector<Eigen::MatrixXcd>& W,
                       const std::vector<Eigen::MatrixXcd>& F, int m, int n, int k) {
    if (m == n)
        throw std::invalid_argument("worst_ici_power: m must differ from n");
    const double sc = ch.s(m, n, k);
    if (sc == 0.0)
        return 0.0;
    const Eigen::MatrixXcd P = (sc * sc) * sum_tx_power(cfg, W, F, m);
    return link_max(ch.h(m, n, k), P, err.link(m, n, k), cfg.Nt);
}

double worst_case_sinr_user(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err,
                            const std::vector<Eigen::MatrixXcd>& W,
                            const std::vector<Eigen::MatrixXcd>& F, int n, int k) {
    const size_t ink = static_cast<size_t>(cfg.nk(n, k));
    if (W[ink].cwiseAbs().maxCoeff() == 0.0)
        return 0.0;
    double ici = 0.0;
    for (int m = 0; m < cfg.Nc; ++m)
        if (m != n)
            ici += worst_ici_power(cfg, ch, err, W, F, m, n, k);
    const double rhs = ici + cfg.sigma2[cfg.nk(n, k)];

    const double sc = ch.s(n, n, k);
    const double sc2 = sc * sc;
    Eigen::MatrixXcd intra = Eigen::MatrixXcd::Zero(cfg.Nt, cfg.Nt);
    for (int i = 0; i < cfg.K; ++i)
        if (i != k)
            intra += W[static_cast<size_t>(cfg.nk(n, i))];
    for (int j = 0; j < cfg.L; ++j)
        intra += F[static_cast<size_t>(n * cfg.L + j)];

    auto ok = [&](double gamma) {
        const Eigen::MatrixXcd U = sc2 * (W[ink] / gamma - intra);
        return link_min(ch.h(n, n, k), U, err.link(n, n, k), cfg.Nt) >= rhs;
    };

    double lo = 1e-12;
    if (!ok(lo))
        return 0.0;
    double hi = std::max(1.0, 2.0 * lo);
    int guard = 0;
    while (ok(hi) && guard++ < 80)
        hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

double worst_case_sinr_edge_user(const SystemConfig& cfg, const ChannelSet& ch,
                                 const ErrorModel& err, const std::vector<Eigen::MatrixXcd>& W,
                                 const std::vector<Eigen::MatrixXcd>& F, int l) {
    auto ok = [&](double gamma) {
        // feasibility of the per-BS noise split: sum of per-BS worst cases
        double total = 0.0;
        for (int m = 0; m < cfg.Nc; ++m) {
            const double sc = ch.s_edge(m, l);
            Eigen::MatrixXcd A = F[static_cast<size_t>(m * cfg.L + l)] / gamma;
            for (int i = 0; i < cfg.K; ++i)
                A -= W[static_cast<size_t>(cfg.nk(m, i))];
            for (int j = 0; j < cfg.L; ++j)
                if (j != l)
                    A -= F[static_cast<size_t>(m * cfg.L + j)];
            A *= sc * sc;
            total += link_min(ch.g(m, l), A, err.edge_link(m, l), cfg.Nt);
        }
        return total >= cfg.sigma2_edge[l];
    };
    double lo = 1e-12;
    if (!ok(lo))
        return 0.0;
    double hi = std::max(1.0, 2.0 * lo);
    int guard = 0;
    while (ok(hi) && guard++ < 80)
        hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

RobustnessReport validate_robustness(const SystemConfig& cfg, const ChannelSet& ch,
                                     const ErrorModel& err, const BeamformerSolution& sol,
                                     int n_samples, std::mt19937_64& rng,
                                     double boundary_fraction) {
    cfg.validate();
    ch.validate(cfg);
    if (n_samples < 1)
        throw std::invalid_argument("validate_robustness: n_samples must be >= 1");
    for (int n = 0; n < cfg.Nc; ++n)
        for (int k = 0; k < cfg.K; ++k)
            if (!sol.w[static_cast<size_t>(cfg.nk(n, k))])
                throw std::invalid_argument("validate_robustness: rank-one vectors missing");
    for (int m = 0; m < cfg.Nc; ++m)
        for (int l = 0; l < cfg.L; ++l)
            if (!sol.f[static_cast<size_t>(m * cfg.L + l)])
                throw std::invalid_argument("validate_robustness: edge rank-one vectors missing");

    BeamVectors w(sol.w.size());
    for (size_t i = 0; i < sol.w.size(); ++i)
        w[i] = *sol.w[i];
    EdgeBeamVectors f(sol.f.size());
    for (size_t i = 0; i < sol.f.size(); ++i)
        f[i] = *sol.f[i];

    // per-link error transform: e = T u, u in the complex unit ball
    const int nlinks = cfg.Nc * cfg.Nc * cfg.K;
    const int nelinks = cfg.Nc * cfg.L;
    std::vector<Eigen::MatrixXcd> T(static_cast<size_t>(nlinks + nelinks));
    auto transform_of = [&](const LinkError& le) -> Eigen::MatrixXcd {
        if (le.exact)
            return Eigen::MatrixXcd::Zero(cfg.Nt, cfg.Nt);
        if (le.spherical)
            return le.radius * Eigen::MatrixXcd::Identity(cfg.Nt, cfg.Nt);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(le.q_matrix(cfg.Nt));
        return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
               es.eigenvectors().adjoint();
    };
    for (int i = 0; i < nlinks; ++i)
        T[static_cast<size_t>(i)] = transform_of(err.links[static_cast<size_t>(i)]);
    for (int i = 0; i < nelinks; ++i)
        T[static_cast<size_t>(nlinks + i)] = transform_of(err.edge_links[static_cast<size_t>(i)]);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto draw_ball = [&](bool on_boundary) {
        Eigen::VectorXcd u(cfg.Nt);
        for (int i = 0; i < cfg.Nt; ++i)
            u[i] = std::complex<double>(gauss(rng), gauss(rng));
        u /= u.norm();
        if (!on_boundary)
            u *= std::pow(uni(rng), 1.0 / (2.0 * cfg.Nt));
        return u;
    };

    const int nusers = cfg.Nc * cfg.K + cfg.L;
    RobustnessReport rep;
    rep.sampled_sinr.resize(nusers, n_samples);
    const int n_boundary = static_cast<int>(std::lround(boundary_fraction * n_samples));

    TrueChannels tc;
    tc.Nc = cfg.Nc;
    tc.K = cfg.K;
    tc.Nt = cfg.Nt;
    tc.L = cfg.L;
    tc.h.resize(static_cast<size_t>(nlinks));
    tc.g.resize(static_cast<size_t>(nelinks));

    long violations = 0;
    double min_sinr = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        const bool on_boundary = s < n_boundary;
        for (int i = 0; i < nlinks; ++i) {
            const Eigen::VectorXcd e = T[static_cast<size_t>(i)] * draw_ball(on_boundary);
            tc.h[static_cast<size_t>(i)] =
                ch.scale[static_cast<size_t>(i)] * (ch.hhat[static_cast<size_t>(i)] + e);
        }
        for (int i = 0; i < nelinks; ++i) {
            const Eigen::VectorXcd e = T[static_cast<size_t>(nlinks + i)] * draw_ball(on_boundary);
            tc.g[static_cast<size_t>(i)] =
                ch.scale_edge[static_cast<size_t>(i)] * (ch.ghat[static_cast<size_t>(i)] + e);
        }
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k) {
                const double v = (cfg.L > 0) ? sinr_intra_full(cfg, n, k, w, f, tc)
                                             : sinr(cfg, n, k, w, tc);
                rep.sampled_sinr(cfg.nk(n, k), s) = v;
                if (v < cfg.gamma[cfg.nk(n, k)])
                    ++violations;
                min_sinr = std::min(min_sinr, v);
            }
        for (int l = 0; l < cfg.L; ++l) {
            const double v = sinr_edge(cfg, l, w, f, tc);
            rep.sampled_sinr(cfg.Nc * cfg.K + l, s) = v;
            if (v < cfg.gamma_edge[l])
                ++violations;
            min_sinr = std::min(min_sinr, v);
        }
    }
    rep.violation_rate = static_cast<double>(violations) /
                         (static_cast<double>(n_samples) * static_cast<double>(nusers));
    rep.min_achieved_sinr = min_sinr;

    // exact worst cases from the beamformer matrices
    std::vector<Eigen::MatrixXcd> Wm(sol.W.begin(), sol.W.end());
    std::vector<Eigen::MatrixXcd> Fm(sol.F.begin(), sol.F.end());
    rep.worst_case_sinr.resize(nusers);
    rep.worst_ici = Eigen::VectorXd::Zero(nlinks);
    double min_slack = std::numeric_limits<double>::infinity();
    for (int n = 0; n < cfg.Nc; ++n)
        for (int k = 0; k < cfg.K; ++k) {
            rep.worst_case_sinr[cfg.nk(n, k)] = worst_case_sinr_user(cfg, ch, err, Wm, Fm, n, k);
            double ici = 0.0;
            for (int m = 0; m < cfg.Nc; ++m)
                if (m != n) {
                    const double t = worst_ici_power(cfg, ch, err, Wm, Fm, m, n, k);
                    rep.worst_ici[cfg.link(m, n, k)] = t;
                    ici += t;
                }
            const double sc2 = ch.s(n, n, k) * ch.s(n, n, k);
            Eigen::MatrixXcd intra = Eigen::MatrixXcd::Zero(cfg.Nt, cfg.Nt);
            for (int i = 0; i < cfg.K; ++i)
                if (i != k)
                    intra += Wm[static_cast<size_t>(cfg.nk(n, i))];
            for (int j = 0; j < cfg.L; ++j)
                intra += Fm[static_cast<size_t>(n * cfg.L + j)];
            const Eigen::MatrixXcd U =
                sc2 * (Wm[static_cast<size_t>(cfg.nk(n, k))] / cfg.gamma[cfg.nk(n, k)] - intra);
            const double lhs = link_min(ch.h(n, n, k), U, err.link(n, n, k), cfg.Nt);
            min_slack = std::min(min_slack, lhs - ici - cfg.sigma2[cfg.nk(n, k)]);
        }
    for (int l = 0; l < cfg.L; ++l)
        rep.worst_case_sinr[cfg.Nc * cfg.K + l] =
            worst_case_sinr_edge_user(cfg, ch, err, Wm, Fm, l);
    rep.min_constraint_slack = min_slack;
    return rep;
}

} // namespace mcbf::model
