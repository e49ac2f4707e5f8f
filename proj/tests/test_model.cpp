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

#include <complex>
#include <numbers>
#include <random>

#include "mcbf/model/instance_gen.hpp"
#include "mcbf/model/serialize.hpp"
#include "mcbf/model/sinr.hpp"
#include "mcbf/model/validate.hpp"
#include "mcbf/model/worst_case.hpp"

using namespace mcbf::model;
using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd cvec(std::initializer_list<cd> v) {
    VectorXcd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const cd& z : v)
        out[i++] = z;
    return out;
}

// independently coded scalar re-evaluation of the SINR expression
double sinr_scalar_loop(const SystemConfig& cfg, int n, int k, const BeamVectors& w,
                        const TrueChannels& ch) {
    cd num(0, 0);
    for (int a = 0; a < cfg.Nt; ++a)
        num += std::conj(ch.at(n, n, k)[a]) * w[static_cast<size_t>(n * cfg.K + k)][a];
    double den = cfg.sigma2[n * cfg.K + k];
    for (int m = 0; m < cfg.Nc; ++m)
        for (int i = 0; i < cfg.K; ++i) {
            if (m == n && i == k)
                continue;
            cd z(0, 0);
            for (int a = 0; a < cfg.Nt; ++a)
                z += std::conj(ch.at(m, n, k)[a]) * w[static_cast<size_t>(m * cfg.K + i)][a];
            den += std::norm(z);
        }
    return std::norm(num) / den;
}

VectorXcd random_cvec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = cd(g(rng), g(rng));
    return v;
}

MatrixXcd random_herm(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = cd(g(rng), g(rng));
    return 0.5 * (A + A.adjoint());
}

} // namespace

TEST_CASE("sinr closed-form examples") {
    // single user, no interference: |h^H w|^2 / sigma2 = 4
    SystemConfig cfg = SystemConfig::uniform(1, 1, 2, 1.0, 1.0);
    TrueChannels ch;
    ch.Nc = 1;
    ch.K = 1;
    ch.Nt = 2;
    ch.L = 0;
    ch.h = {cvec({1.0, 0.0})};
    BeamVectors w = {cvec({2.0, 0.0})};
    CHECK(sinr(cfg, 0, 0, w, ch) == doctest::Approx(4.0).epsilon(1e-14));

    // equal signal and intra-cell interference: 1/(1+1) = 0.5
    SystemConfig cfg2 = SystemConfig::uniform(1, 2, 2, 1.0, 1.0);
    TrueChannels ch2;
    ch2.Nc = 1;
    ch2.K = 2;
    ch2.Nt = 2;
    ch2.L = 0;
    ch2.h = {cvec({1.0, 0.0}), cvec({1.0, 0.0})};
    BeamVectors w2 = {cvec({1.0, 0.0}), cvec({1.0, 0.0})};
    CHECK(sinr(cfg2, 0, 0, w2, ch2) == doctest::Approx(0.5).epsilon(1e-14));

    BeamVectors bad = {cvec({1.0, 0.0})};
    CHECK_THROWS_AS(sinr(cfg2, 0, 0, bad, ch2), std::invalid_argument);
}

TEST_CASE("sinr matches an independent scalar loop on random instances") {
    std::mt19937_64 rng(123);
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.3);
    TrueChannels ch;
    ch.Nc = 2;
    ch.K = 2;
    ch.Nt = 4;
    ch.L = 0;
    for (int i = 0; i < 8; ++i)
        ch.h.push_back(random_cvec(4, rng));
    BeamVectors w;
    for (int i = 0; i < 4; ++i)
        w.push_back(random_cvec(4, rng));
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k) {
            const double a = sinr(cfg, n, k, w, ch);
            const double b = sinr_scalar_loop(cfg, n, k, w, ch);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
        }
}

TEST_CASE("edge-user sinr") {
    // coherent numerator: two unit contributions, no interference
    SystemConfig cfg = SystemConfig::uniform(2, 0, 4, 1.0, 1.0, 1, 1.0, 1.0);
    TrueChannels ch;
    ch.Nc = 2;
    ch.K = 0;
    ch.Nt = 4;
    ch.L = 1;
    ch.g = {cvec({1.0, 0.0, 0.0, 0.0}), cvec({1.0, 0.0, 0.0, 0.0})};
    BeamVectors w; // K = 0
    EdgeBeamVectors f = {cvec({1.0, 0.0, 0.0, 0.0}), cvec({1.0, 0.0, 0.0, 0.0})};
    CHECK(sinr_edge(cfg, 0, w, f, ch) == doctest::Approx(2.0).epsilon(1e-14));

    EdgeBeamVectors f0 = {VectorXcd::Zero(4), VectorXcd::Zero(4)};
    CHECK(sinr_edge(cfg, 0, w, f0, ch) == doctest::Approx(0.0));

    SystemConfig no_edge = SystemConfig::uniform(2, 1, 4, 1.0, 1.0);
    TrueChannels chn;
    chn.Nc = 2;
    chn.K = 1;
    chn.Nt = 4;
    chn.L = 0;
    BeamVectors w1 = {cvec({1.0, 0.0, 0.0, 0.0}), cvec({1.0, 0.0, 0.0, 0.0})};
    CHECK_THROWS_AS(sinr_edge(no_edge, 0, w1, f, chn), std::invalid_argument);
}

TEST_CASE("edge-user sinr matches scalar re-evaluation") {
    std::mt19937_64 rng(7);
    SystemConfig cfg = SystemConfig::uniform(2, 1, 3, 1.0, 0.5, 2, 1.0, 0.25);
    TrueChannels ch;
    ch.Nc = 2;
    ch.K = 1;
    ch.Nt = 3;
    ch.L = 2;
    for (int i = 0; i < 4; ++i)
        ch.h.push_back(random_cvec(3, rng));
    for (int i = 0; i < 4; ++i)
        ch.g.push_back(random_cvec(3, rng));
    BeamVectors w = {random_cvec(3, rng), random_cvec(3, rng)};
    EdgeBeamVectors f = {random_cvec(3, rng), random_cvec(3, rng), random_cvec(3, rng),
                         random_cvec(3, rng)};

    for (int l = 0; l < 2; ++l) {
        double num = 0.0, den = cfg.sigma2_edge[l];
        for (int m = 0; m < 2; ++m) {
            cd zs(0, 0);
            for (int a = 0; a < 3; ++a)
                zs += std::conj(ch.at_edge(m, l)[a]) * f[static_cast<size_t>(m * 2 + l)][a];
            num += std::norm(zs);
            cd z(0, 0);
            for (int a = 0; a < 3; ++a)
                z += std::conj(ch.at_edge(m, l)[a]) * w[static_cast<size_t>(m)][a];
            den += std::norm(z);
            for (int j = 0; j < 2; ++j) {
                if (j == l)
                    continue;
                cd zf(0, 0);
                for (int a = 0; a < 3; ++a)
                    zf += std::conj(ch.at_edge(m, l)[a]) * f[static_cast<size_t>(m * 2 + j)][a];
                den += std::norm(zf);
            }
        }
        const double expect = num / den;
        CHECK(std::abs(sinr_edge(cfg, l, w, f, ch) - expect) <= 1e-12 * expect);
    }
}

TEST_CASE("common phase rotation leaves all SINRs unchanged") {
    std::mt19937_64 rng(99);
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.3);
    TrueChannels ch;
    ch.Nc = 2;
    ch.K = 2;
    ch.Nt = 4;
    ch.L = 0;
    for (int i = 0; i < 8; ++i)
        ch.h.push_back(random_cvec(4, rng));
    BeamVectors w;
    for (int i = 0; i < 4; ++i)
        w.push_back(random_cvec(4, rng));
    BeamVectors wr = w;
    const cd phase = std::polar(1.0, 1.2345);
    for (auto& v : wr)
        v *= phase;
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k) {
            const double a = sinr(cfg, n, k, w, ch);
            const double b = sinr(cfg, n, k, wr, ch);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
        }
}

TEST_CASE("pathloss amplitude pocket-calculator value") {
    GeometryParams geo;
    // d = 0.1 km: 10^(-(128.1 + 37.6*(-1))/20) = 10^(-90.5/20)
    CHECK(pathloss_amplitude(0.1, geo) == doctest::Approx(2.9853826e-5).epsilon(1e-6));
    CHECK_THROWS_AS(pathloss_amplitude(0.0, geo), std::invalid_argument);
}

TEST_CASE("instance generation is a pure function of (cfg, seed)") {
    SystemConfig cfg = SystemConfig::uniform(2, 2, 4, db_to_linear(10.0), dbm_to_watts(-92.0));
    GeometryParams geo;
    const Instance a = generate_instance(cfg, geo, 31337);
    const Instance b = generate_instance(cfg, geo, 31337);
    REQUIRE(a.channels.hhat.size() == b.channels.hhat.size());
    for (size_t i = 0; i < a.channels.hhat.size(); ++i) {
        CHECK((a.channels.hhat[i] - b.channels.hhat[i]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.channels.scale[i] == b.channels.scale[i]);
    }
    const Instance c = generate_instance(cfg, geo, 31338);
    CHECK((a.channels.hhat[0] - c.channels.hhat[0]).cwiseAbs().maxCoeff() > 0.0);

    GeometryParams unit;
    unit.unit_scale = true;
    const Instance d = generate_instance(cfg, unit, 5);
    for (double s : d.channels.scale)
        CHECK(s == 1.0);
}

TEST_CASE("worst_case_quadratic spherical ball geometry") {
    std::mt19937_64 rng(11);
    VectorXcd h = random_cvec(3, rng);
    h /= h.norm(); // ||h|| = 1
    const MatrixXcd I = MatrixXcd::Identity(3, 3);
    const double eps = 0.3;
    const MatrixXcd Q = I / (eps * eps);
    const WorstCaseResult lo = worst_case_quadratic(h, I, Q, Sense::minimize);
    const WorstCaseResult hi = worst_case_quadratic(h, I, Q, Sense::maximize);
    CHECK(lo.value == doctest::Approx(0.49).epsilon(1e-10));
    CHECK(hi.value == doctest::Approx(1.69).epsilon(1e-10));
    // minimizer points against h
    CHECK((lo.e_star + eps * h).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(worst_case_quadratic(h, I, -Q, Sense::minimize), std::invalid_argument);
}

TEST_CASE("worst_case_quadratic against dense sampling") {
    std::mt19937_64 rng(2025);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int Nt = 3;
    MatrixXcd M = random_herm(Nt, rng);
    M -= (M.eigenvalues().real().mean()) * MatrixXcd::Identity(Nt, Nt); // make indefinite
    const VectorXcd h = random_cvec(Nt, rng);
    const double eps = 0.7;
    const MatrixXcd Q = MatrixXcd::Identity(Nt, Nt) / (eps * eps);

    const double vmin = worst_case_quadratic(h, M, Q, Sense::minimize).value;
    const double vmax = worst_case_quadratic(h, M, Q, Sense::maximize).value;
    const double center = std::real(h.dot(M * h));
    CHECK(vmin <= center + 1e-12);
    CHECK(vmax >= center - 1e-12);

    double best_lo = center, best_hi = center;
    VectorXcd e_lo = VectorXcd::Zero(Nt), e_hi = VectorXcd::Zero(Nt);
    for (int s = 0; s < 1000000; ++s) {
        VectorXcd u(Nt);
        for (int i = 0; i < Nt; ++i)
            u[i] = cd(g(rng), g(rng));
        u /= u.norm();
        if (s % 2 == 0) // half boundary, half interior
            u *= std::pow(uni(rng), 1.0 / (2.0 * Nt));
        const VectorXcd e = eps * u;
        const VectorXcd he = h + e;
        const double v = std::real(he.dot(M * he));
        if (v < best_lo) {
            best_lo = v;
            e_lo = e;
        }
        if (v > best_hi) {
            best_hi = v;
            e_hi = e;
        }
    }
    const double span = vmax - vmin;
    CHECK(vmin <= best_lo + 1e-12 * (1.0 + std::abs(best_lo)));
    CHECK(vmax >= best_hi - 1e-12 * (1.0 + std::abs(best_hi)));

    // first-order polish of the best samples (projected gradient; does not
    // share any machinery with the eigendecomposition route under test)
    auto polish = [&](VectorXcd e, double sign) {
        const auto val = [&](const VectorXcd& p) {
            const VectorXcd hp = h + p;
            return std::real(hp.dot(M * hp));
        };
        double step = 0.2 * eps;
        double best = val(e);
        for (int it = 0; it < 600 && step > 1e-15 * eps; ++it) {
            VectorXcd cand = e - sign * step * (M * (h + e));
            if (cand.norm() > eps)
                cand *= eps / cand.norm();
            const double v = val(cand);
            if (sign * (v - best) < 0.0) {
                e = cand;
                best = v;
                step *= 1.3;
            } else {
                step *= 0.5;
            }
        }
        return best;
    };
    const double polished_lo = polish(e_lo, +1.0);
    const double polished_hi = polish(e_hi, -1.0);
    CHECK(vmin <= polished_lo + 1e-12 * (1.0 + std::abs(polished_lo)));
    CHECK(vmax >= polished_hi - 1e-12 * (1.0 + std::abs(polished_hi)));
    CHECK(polished_lo - vmin <= 1e-3 * span);
    CHECK(vmax - polished_hi <= 1e-3 * span);
}

TEST_CASE("worst_case_quadratic ellipsoid monotonicity") {
    std::mt19937_64 rng(4);
    const int Nt = 4;
    const MatrixXcd M = random_herm(Nt, rng);
    const VectorXcd h = random_cvec(Nt, rng);
    double prev_min = -1e300, prev_max = 1e300;
    for (double eps : {0.5, 0.3, 0.1, 0.02}) { // shrinking ellipsoids
        const MatrixXcd Q = MatrixXcd::Identity(Nt, Nt) / (eps * eps);
        const double vmin = worst_case_quadratic(h, M, Q, Sense::minimize).value;
        const double vmax = worst_case_quadratic(h, M, Q, Sense::maximize).value;
        CHECK(vmin >= prev_min - 1e-10);
        CHECK(vmax <= prev_max + 1e-10);
        prev_min = vmin;
        prev_max = vmax;
    }
}

TEST_CASE("trust-region hard case") {
    Eigen::MatrixXd B(2, 2);
    B << -2.0, 0.0, 0.0, 1.0;
    Eigen::VectorXd g(2);
    g << 0.0, 0.1;
    const TrsResult r = trs_unit_ball(B, g);
    CHECK(r.hard_case);
    CHECK(r.boundary);
    CHECK(std::abs(r.u.norm() - 1.0) < 1e-12);
    // dense check on the circle
    double best = 1e300;
    for (int i = 0; i < 200000; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 200000.0;
        Eigen::Vector2d u(std::cos(a), std::sin(a));
        best = std::min(best, u.dot(B * u) + 2.0 * g.dot(u));
    }
    CHECK(r.value <= best + 1e-9);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("validate_robustness with zero errors on a feasible design") {
    SystemConfig cfg = SystemConfig::uniform(1, 1, 2, 2.0, 1.0);
    ChannelSet ch = ChannelSet::zeros(1, 1, 2);
    ch.hhat[0] = cvec({2.0, 0.0});
    ErrorModel err = ErrorModel::exact_csi(1, 1, 2);
    BeamformerSolution sol;
    sol.status = mcbf::conic::SolveStatus::optimal;
    const VectorXcd wv = cvec({1.0, 0.0}); // SINR = 4 >= 2
    sol.W = {wv * wv.adjoint()};
    sol.w = {wv};
    sol.eig_ratio = {0.0};
    sol.p = Eigen::VectorXd::Constant(1, 1.0);
    sol.lambda.assign(1, 0.0);
    sol.t.assign(1, 0.0);
    std::mt19937_64 rng(1);
    const RobustnessReport rep = validate_robustness(cfg, ch, err, sol, 200, rng);
    CHECK(rep.violation_rate == 0.0);
    CHECK(rep.min_achieved_sinr == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.worst_case_sinr[0] == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("instance and solution JSON round trip") {
    SystemConfig cfg = SystemConfig::uniform(2, 1, 3, 10.0, 1e-3, 0);
    GeometryParams geo;
    const Instance inst = generate_instance(cfg, geo, 17);
    ErrorModel err = ErrorModel::spherical(2, 1, 3, 0.1, 0.2);
    const nlohmann::json j = instance_to_json(cfg, inst.channels, err);
    SystemConfig cfg2;
    ChannelSet ch2;
    ErrorModel err2;
    instance_from_json(j, cfg2, ch2, err2);
    CHECK(cfg2.Nc == cfg.Nc);
    CHECK(cfg2.gamma[0] == cfg.gamma[0]);
    for (size_t i = 0; i < inst.channels.hhat.size(); ++i) {
        CHECK((ch2.hhat[i] - inst.channels.hhat[i]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ch2.scale[i] == inst.channels.scale[i]);
    }
    CHECK(err2.link(0, 1, 0).radius == 0.2);

    BeamformerSolution sol;
    sol.status = mcbf::conic::SolveStatus::optimal;
    sol.objective = 0.125;
    sol.p = Eigen::VectorXd::Constant(2, 0.0625);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2; ++i) {
        const VectorXcd v = random_cvec(3, rng);
        sol.W.push_back(v * v.adjoint());
        sol.w.push_back(v);
        sol.eig_ratio.push_back(0.0);
    }
    sol.lambda.assign(4, 0.5);
    sol.t.assign(4, 0.25);
    const nlohmann::json js = solution_to_json(sol);
    const BeamformerSolution sol2 = solution_from_json(js);
    CHECK(sol2.objective == sol.objective);
    CHECK((sol2.W[1] - sol.W[1]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sol2.t[3] == 0.25);
}
