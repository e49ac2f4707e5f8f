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

#include <doctest.h>

#include <random>

#include "mcbf/model/instance_gen.hpp"
#include "mcbf/model/validate.hpp"
#include "mcbf/model/worst_case.hpp"
#include "mcbf/sdr/builders.hpp"
#include "mcbf/sdr/conditions.hpp"
#include "mcbf/sdr/extract.hpp"

using namespace mcbf;
using namespace mcbf::sdr;
using model::ChannelSet;
using model::ErrorModel;
using model::SystemConfig;
using Eigen::VectorXcd;

namespace {

ChannelSet unit_channels(const SystemConfig& cfg, uint64_t seed) {
    model::GeometryParams geo;
    geo.unit_scale = true;
    return model::generate_instance(cfg, geo, seed).channels;
}

// S-lemma soundness: every worst-case constraint of a feasible robust solve
// holds exactly under the trust-region oracle.
void check_slemma_soundness(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err,
                            const model::BeamformerSolution& sol, double tol = 1e-6) {
    const FoldedData folded = fold(cfg, ch, err);
    for (int n = 0; n < cfg.Nc; ++n)
        for (int k = 0; k < cfg.K; ++k) {
            Eigen::MatrixXcd U = sol.W[static_cast<size_t>(cfg.nk(n, k))] / cfg.gamma[cfg.nk(n, k)];
            for (int i = 0; i < cfg.K; ++i)
                if (i != k)
                    U -= sol.W[static_cast<size_t>(cfg.nk(n, i))];
            double t_sum = 0.0; // in receiver-noise units
            for (int m = 0; m < cfg.Nc; ++m)
                if (m != n)
                    t_sum += sol.t[static_cast<size_t>(cfg.link(m, n, k))] /
                             cfg.sigma2[cfg.nk(n, k)];
            const FoldedLink& link = folded.link(n, n, k);
            const double lhs =
                link.exact ? std::real(link.h.dot(U * link.h))
                           : model::worst_case_quadratic(link.h, U, link.Q,
                                                         model::Sense::minimize)
                                 .value;
            CHECK(lhs >= t_sum + 1.0 - tol);
            for (int m = 0; m < cfg.Nc; ++m) {
                if (m == n)
                    continue;
                Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(cfg.Nt, cfg.Nt);
                for (int i = 0; i < cfg.K; ++i)
                    P += sol.W[static_cast<size_t>(cfg.nk(m, i))];
                const FoldedLink& cross = folded.link(m, n, k);
                const double wc =
                    cross.exact ? std::real(cross.h.dot(P * cross.h))
                                : model::worst_case_quadratic(cross.h, P, cross.Q,
                                                              model::Sense::maximize)
                                      .value;
                CHECK(wc <= sol.t[static_cast<size_t>(cfg.link(m, n, k))] /
                                    cfg.sigma2[cfg.nk(n, k)] +
                                tol);
            }
        }
}

} // namespace

TEST_CASE("nonrobust single-user closed form (MRT power)") {
    SystemConfig cfg = SystemConfig::uniform(1, 1, 4, 8.0, 0.5);
    ChannelSet ch = ChannelSet::zeros(1, 1, 4);
    ch.hhat[0] = VectorXcd::Zero(4);
    ch.hhat[0][0] = 1.0;
    ch.scale[0] = 3.0;
    const SdrProblem sp = build_nonrobust(cfg, ch);
    const model::BeamformerSolution sol = solve_beamformers(sp);
    REQUIRE(sol.optimal());
    // gamma*sigma2/||h||^2 with ||h|| = scale
    CHECK(sol.objective == doctest::Approx(8.0 * 0.5 / 9.0).epsilon(1e-6));
    REQUIRE(sol.w[0]);
    CHECK(sol.eig_ratio[0] <= 1e-6);
    // beamformer points along the channel
    const VectorXcd w = *sol.w[0];
    CHECK(std::abs(w[0]) == doctest::Approx(w.norm()).epsilon(1e-6));
}

TEST_CASE("nonrobust random instance: all SINR constraints active") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, model::db_to_linear(8.0), 1.0);
    ChannelSet ch = unit_channels(cfg, 71);
    const SdrProblem sp = build_nonrobust(cfg, ch);
    const model::BeamformerSolution sol = solve_beamformers(sp);
    REQUIRE(sol.optimal());
    CHECK(sol.primal_residual <= 1e-7);
    CHECK(sol.dual_residual <= 1e-7);
    REQUIRE(sol.rank_one(1e-5));
    model::BeamVectors w;
    for (const auto& v : sol.w)
        w.push_back(*v);
    const model::TrueChannels tc = model::TrueChannels::nominal(ch);
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k) {
            const double s = model::sinr(cfg, n, k, w, tc);
            // power minimization pushes every constraint to equality
            CHECK(s == doctest::Approx(cfg.gamma[cfg.nk(n, k)]).epsilon(1e-5));
        }
}

TEST_CASE("robust single-user closed form") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 3; ++rep) {
        SystemConfig cfg = SystemConfig::uniform(1, 1, 4, 6.3, 0.2);
        ChannelSet ch = ChannelSet::zeros(1, 1, 4);
        VectorXcd h(4);
        for (int i = 0; i < 4; ++i)
            h[i] = std::complex<double>(g(rng), g(rng));
        ch.hhat[0] = h;
        const double eps = 0.35 * h.norm();
        ErrorModel err = ErrorModel::spherical(1, 1, 4, eps, eps);
        const SdrProblem sp = build_robust_sdr(cfg, ch, err);
        const model::BeamformerSolution sol = solve_beamformers(sp);
        REQUIRE(sol.optimal());
        const double expect = 6.3 * 0.2 / std::pow(h.norm() - eps, 2.0);
        CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-4));
        CHECK(sol.eig_ratio[0] <= 1e-6);
        check_slemma_soundness(cfg, ch, err, sol);
    }
}

TEST_CASE("vanishing error radius recovers the nonrobust optimum") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, model::db_to_linear(6.0), 1.0);
    ChannelSet ch = unit_channels(cfg, 1234);
    const model::BeamformerSolution nr = solve_beamformers(build_nonrobust(cfg, ch));
    REQUIRE(nr.optimal());
    ErrorModel err = ErrorModel::spherical(2, 2, 4, 1e-6, 1e-6);
    const model::BeamformerSolution rb = solve_beamformers(build_robust_sdr(cfg, ch, err));
    REQUIRE(rb.optimal());
    CHECK(std::abs(rb.objective - nr.objective) <= 1e-3 * nr.objective);
    CHECK(rb.objective >= nr.objective - 1e-6 * nr.objective); // dominance
}

TEST_CASE("robust solve passes the S-lemma oracle and is monotone in the radius") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, model::db_to_linear(6.0), 1.0);
    ChannelSet ch = unit_channels(cfg, 99);
    double prev = 0.0;
    for (double eps : {0.02, 0.05, 0.1}) {
        ErrorModel err = ErrorModel::spherical(2, 2, 4, eps, 2.0 * eps);
        const model::BeamformerSolution sol = solve_beamformers(build_robust_sdr(cfg, ch, err));
        REQUIRE(sol.optimal());
        CHECK(sol.objective >= prev - 1e-8 * (1.0 + prev));
        prev = sol.objective;
        check_slemma_soundness(cfg, ch, err, sol);
    }
}

TEST_CASE("robust solve on a pathloss-model instance (scale folding)") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, model::db_to_linear(10.0),
                                             model::dbm_to_watts(-92.0));
    model::GeometryParams geo;
    const model::Instance inst = model::generate_instance(cfg, geo, 2026);
    ErrorModel err = ErrorModel::spherical(2, 2, 4, 0.05, 0.05);
    const model::BeamformerSolution sol =
        solve_beamformers(build_robust_sdr(cfg, inst.channels, err));
    REQUIRE(sol.optimal());
    CHECK(sol.rank_one(1e-5));
    check_slemma_soundness(cfg, inst.channels, err, sol);
    // the exact worst-case SINR meets the target for every user
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k) {
            const double wc = model::worst_case_sinr_user(cfg, inst.channels, err, sol.W, sol.F,
                                                          n, k);
            CHECK(wc >= cfg.gamma[cfg.nk(n, k)] * (1.0 - 1e-5));
        }
}

TEST_CASE("noise homogeneity: scaling sigma2 scales the optimum") {
    SystemConfig cfg = SystemConfig::uniform(2, 1, 4, 4.0, 1.0);
    ChannelSet ch = unit_channels(cfg, 3);
    ErrorModel err = ErrorModel::spherical(2, 1, 4, 0.08, 0.16);
    const model::BeamformerSolution a = solve_beamformers(build_robust_sdr(cfg, ch, err));
    const double kappa = 3.5;
    SystemConfig cfg2 = cfg;
    cfg2.sigma2 *= kappa;
    const model::BeamformerSolution b = solve_beamformers(build_robust_sdr(cfg2, ch, err));
    REQUIRE(a.optimal());
    REQUIRE(b.optimal());
    CHECK(b.objective == doctest::Approx(kappa * a.objective).epsilon(1e-6));
}

TEST_CASE("C2 mode: exact intra-cell CSI uses the scalar constraint and stays sound") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, model::db_to_linear(6.0), 1.0);
    ChannelSet ch = unit_channels(cfg, 55);
    ErrorModel err = ErrorModel::spherical(2, 2, 4, 0.1, 0.1);
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k)
            err.link(n, n, k) = model::LinkError{true, true, 0.0, {}};
    const model::BeamformerSolution sol = solve_beamformers(build_robust_sdr(cfg, ch, err));
    REQUIRE(sol.optimal());
    const Prop1Report rep = check_prop1(cfg, err, sol);
    CHECK(rep.c2);
    CHECK(sol.rank_one(1e-5));
    check_slemma_soundness(cfg, ch, err, sol);
}

TEST_CASE("extract_rank_one basics") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    VectorXcd v(3);
    for (int i = 0; i < 3; ++i)
        v[i] = std::complex<double>(g(rng), g(rng));
    const Eigen::MatrixXcd W = v * v.adjoint();
    const RankOneResult r = extract_rank_one(W);
    REQUIRE(r.w);
    CHECK(((*r.w) * r.w->adjoint() - W).cwiseAbs().maxCoeff() < 1e-9);
    // phase normalization: largest entry real positive
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < 3; ++i)
        if (std::abs((*r.w)[i]) > amax) {
            amax = std::abs((*r.w)[i]);
            imax = i;
        }
    CHECK(std::abs(std::imag((*r.w)[imax])) < 1e-12);
    CHECK(std::real((*r.w)[imax]) > 0.0);

    const RankOneResult r2 = extract_rank_one(Eigen::MatrixXcd::Identity(2, 2));
    CHECK(!r2.w);
    CHECK(r2.eig_ratio == doctest::Approx(1.0));

    const RankOneResult r3 = extract_rank_one(Eigen::MatrixXcd::Zero(2, 2));
    CHECK(r3.zero);
    REQUIRE(r3.w);
    CHECK(r3.w->norm() == 0.0);

    CHECK_THROWS_AS(extract_rank_one(-Eigen::MatrixXcd::Identity(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("check_prop1 conditions") {
    // C1: K = 1
    SystemConfig cfg = SystemConfig::uniform(2, 1, 4, 4.0, 1.0);
    ChannelSet ch = unit_channels(cfg, 21);
    ErrorModel err = ErrorModel::spherical(2, 1, 4, 0.1, 0.1);
    const model::BeamformerSolution sol = solve_beamformers(build_robust_sdr(cfg, ch, err));
    REQUIRE(sol.optimal());
    const Prop1Report rep = check_prop1(cfg, err, sol);
    CHECK(rep.c1);
    CHECK(sol.rank_one(1e-5));

    // C3 arithmetic example: bound sqrt(0.1*1*10/1) = 1, radius 0.5
    SystemConfig c3 = SystemConfig::uniform(1, 1, 2, 10.0, 0.1);
    ErrorModel e3 = ErrorModel::spherical(1, 1, 2, 0.5, 0.5);
    model::BeamformerSolution fake;
    fake.status = conic::SolveStatus::optimal;
    fake.objective = 1.0;
    const Prop1Report rep3 = check_prop1(c3, e3, fake);
    CHECK(rep3.c3);
    CHECK(rep3.c3_margin == doctest::Approx(0.5).epsilon(1e-12));

    model::BeamformerSolution bad;
    bad.status = conic::SolveStatus::numerical_failure;
    CHECK_THROWS_AS(check_prop1(c3, e3, bad), std::invalid_argument);
}

TEST_CASE("fully coordinated problem reduces to the single-user robust formula") {
    // L=1, Nc=1, K=0: one edge user served by one BS
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    SystemConfig cfg = SystemConfig::uniform(1, 0, 4, 1.0, 1.0, 1, 5.0, 0.3);
    cfg.gamma.resize(0);
    cfg.sigma2.resize(0);
    ChannelSet ch = ChannelSet::zeros(1, 0, 4, 1);
    VectorXcd h(4);
    for (int i = 0; i < 4; ++i)
        h[i] = std::complex<double>(g(rng), g(rng));
    ch.ghat[0] = h;
    const double eps = 0.25 * h.norm();
    ErrorModel err = ErrorModel::spherical(1, 0, 4, 0.0, 0.0, 1, eps);
    const SdrProblem sp = build_full_coord(cfg, ch, err);
    const model::BeamformerSolution sol = solve_beamformers(sp);
    REQUIRE(sol.optimal());
    const double expect = 5.0 * 0.3 / std::pow(h.norm() - eps, 2.0);
    CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-4));
    CHECK(sol.eig_ratio_edge[0] <= 1e-6);
    // noise split variable sits at its minimum sigma2
    CHECK(sol.eta[0] == doctest::Approx(0.3).epsilon(1e-5));

    SystemConfig noedge = SystemConfig::uniform(1, 1, 4, 1.0, 1.0);
    CHECK_THROWS_AS(build_full_coord(noedge, unit_channels(noedge, 1),
                                     ErrorModel::spherical(1, 1, 4, 0.1, 0.1)),
                    std::invalid_argument);
}

TEST_CASE("fully coordinated solve on the three-cell geometry") {
    // K=1 intra user per cell plus L=3 shared edge users
    SystemConfig cfg = SystemConfig::uniform(3, 1, 4, model::db_to_linear(6.0),
                                             model::dbm_to_watts(-92.0), 3,
                                             model::db_to_linear(6.0),
                                             model::dbm_to_watts(-92.0));
    model::GeometryParams geo;
    const model::Instance inst = model::generate_instance(cfg, geo, 77);
    ErrorModel err = ErrorModel::spherical(3, 1, 4, 0.1, 0.1, 3, 0.1);
    const model::BeamformerSolution sol =
        solve_beamformers(build_full_coord(cfg, inst.channels, err));
    REQUIRE(sol.optimal());
    CHECK(sol.rank_one(1e-5));
    // edge users: exact worst-case SINR meets the target
    for (int l = 0; l < 3; ++l) {
        const double wc =
            model::worst_case_sinr_edge_user(cfg, inst.channels, err, sol.W, sol.F, l);
        CHECK(wc >= cfg.gamma_edge[l] * (1.0 - 1e-5));
    }
    for (int n = 0; n < 3; ++n) {
        const double wc =
            model::worst_case_sinr_user(cfg, inst.channels, err, sol.W, sol.F, n, 0);
        CHECK(wc >= cfg.gamma[cfg.nk(n, 0)] * (1.0 - 1e-5));
    }
}
