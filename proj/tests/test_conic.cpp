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

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "mcbf/conic/solver.hpp"

using namespace mcbf::conic;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::mt19937_64 rng_for(uint64_t seed) { return std::mt19937_64(seed); }

MatrixXd random_sym(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = g(rng);
    return 0.5 * (A + A.transpose());
}

MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = std::complex<double>(g(rng), g(rng));
    return 0.5 * (A + A.adjoint());
}

} // namespace

TEST_CASE("svec round trip and inner products") {
    auto rng = rng_for(7);
    const MatrixXd A = random_sym(5, rng);
    const MatrixXd B = random_sym(5, rng);
    CHECK((smat(svec(A), 5) - A).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()).epsilon(1e-12));
}

TEST_CASE("embed_hermitian basics") {
    // 1x1 real
    MatrixXcd H1(1, 1);
    H1(0, 0) = 1.0;
    const MatrixXd X1 = embed_hermitian(H1);
    CHECK(X1.rows() == 2);
    CHECK(X1(0, 0) == doctest::Approx(1.0));
    CHECK(X1(1, 1) == doctest::Approx(1.0));
    CHECK(X1(0, 1) == doctest::Approx(0.0));

    // [[0, i],[-i, 0]] has embedded spectrum {+1,+1,-1,-1}
    MatrixXcd H2(2, 2);
    H2 << std::complex<double>(0, 0), std::complex<double>(0, 1), std::complex<double>(0, -1),
        std::complex<double>(0, 0);
    const MatrixXd X2 = embed_hermitian(H2);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(X2);
    VectorXd ev = es.eigenvalues();
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[3] == doctest::Approx(1.0).epsilon(1e-12));

    // lambda_min preserved, extraction inverts embedding
    auto rng = rng_for(11);
    const MatrixXcd H = random_hermitian(6, rng);
    const MatrixXd X = embed_hermitian(H);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ec(H);
    Eigen::SelfAdjointEigenSolver<MatrixXd> er(X);
    CHECK(std::abs(ec.eigenvalues().minCoeff() - er.eigenvalues().minCoeff()) < 1e-10);
    CHECK((extract_hermitian(X) - H).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(X.trace() == doctest::Approx(2.0 * H.real().trace()).epsilon(1e-12));

    MatrixXcd bad(2, 2);
    bad << 1.0, std::complex<double>(1, 1), std::complex<double>(1, 1), 1.0;
    CHECK_THROWS_AS(embed_hermitian(bad), std::invalid_argument);
}

TEST_CASE("min trace with pinned corner") {
    // min tr(X) s.t. X(0,0) = 1, X psd 2x2  ->  1 at X = diag(1,0)
    ConicProblem p;
    const int X = p.add_psd_block(2, "X");
    p.add_entry_obj(X, 0, 0, 1.0);
    p.add_entry_obj(X, 1, 1, 1.0);
    const int r = p.add_constraint(1.0);
    p.add_entry_coeff(r, X, 0, 0, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.obj_primal == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.psd_values[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sol.psd_values[0](1, 1)) < 1e-6);
    CHECK(sol.rel_gap <= 1e-8);
}

TEST_CASE("infeasible sign constraint") {
    // min x s.t. x = -1, x >= 0 -> infeasible with a Farkas certificate
    ConicProblem p;
    const int x = p.add_nonneg("x");
    p.add_scalar_obj(x, 1.0);
    const int r = p.add_constraint(-1.0);
    p.add_scalar_coeff(r, x, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::infeasible);
    CHECK(sol.is_certificate);
    // certificate: y with b'y = 1 and A'y + s = 0, s >= 0
    const double by = -1.0 * sol.eq_duals[0];
    CHECK(by == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.eq_duals[0] + sol.scalar_duals[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(sol.scalar_duals[0] >= -1e-9);
}

TEST_CASE("unbounded objective") {
    // min -x s.t. x >= 0 (one dummy constraint keeps m > 0): unbounded below
    ConicProblem p;
    const int x = p.add_nonneg("x");
    const int z = p.add_nonneg("z");
    p.add_scalar_obj(x, -1.0);
    const int r = p.add_constraint(1.0);
    p.add_scalar_coeff(r, z, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::unbounded);
    CHECK(sol.is_certificate);
}

TEST_CASE("random strictly complementary optimum is recovered") {
    // Build (x*, y*, s*) with A x* = b, s* = c - A^T y*, X* S* = 0 and
    // X* + S* > 0; the solver must match the known optimal value.
    auto rng = rng_for(2024);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 6; ++rep) {
        ConicProblem p;
        const int n1 = 4, n2 = 3;
        const int B1 = p.add_psd_block(n1);
        const int B2 = p.add_psd_block(n2);
        const int u = p.add_nonneg();
        const int v = p.add_nonneg();
        const int f = p.add_free();

        // random orthonormal basis for block 1; split eigenvalues between X and S
        const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(random_sym(n1, rng)).householderQ();
        VectorXd dx = VectorXd::Zero(n1), ds = VectorXd::Zero(n1);
        for (int i = 0; i < n1; ++i)
            (i < 2 ? dx[i] : ds[i]) = 0.5 + std::abs(g(rng));
        const MatrixXd X1 = Q * dx.asDiagonal() * Q.transpose();
        const MatrixXd S1 = Q * ds.asDiagonal() * Q.transpose();
        const MatrixXd X2 = MatrixXd::Zero(n2, n2); // block 2 fully dual
        MatrixXd S2 = random_sym(n2, rng);
        S2 = S2 * S2.transpose() + 0.3 * MatrixXd::Identity(n2, n2);
        const double xu = 0.7, su = 0.0; // u primal active
        const double xv = 0.0, sv = 0.9; // v dual active
        const double xfree = g(rng);

        const int m = 6;
        std::vector<MatrixXd> A1(m), A2(m);
        std::vector<double> au(m), av(m), af(m), bb(m);
        VectorXd ystar(m);
        for (int i = 0; i < m; ++i) {
            A1[i] = random_sym(n1, rng);
            A2[i] = random_sym(n2, rng);
            au[i] = g(rng);
            av[i] = g(rng);
            af[i] = g(rng);
            ystar[i] = g(rng);
            bb[i] = (A1[i] * X1).trace() + (A2[i] * X2).trace() + au[i] * xu + av[i] * xv +
                    af[i] * xfree;
        }
        // c = A^T y* + s*
        MatrixXd C1 = S1, C2 = S2;
        double cu = su, cv = sv, cf = 0.0;
        for (int i = 0; i < m; ++i) {
            C1 += ystar[i] * A1[i];
            C2 += ystar[i] * A2[i];
            cu += ystar[i] * au[i];
            cv += ystar[i] * av[i];
            cf += ystar[i] * af[i];
        }

        for (int i = 0; i < m; ++i) {
            const int r = p.add_constraint(bb[i]);
            for (int a = 0; a < n1; ++a)
                for (int b2 = a; b2 < n1; ++b2)
                    p.add_entry_coeff(r, B1, a, b2, (a == b2 ? 1.0 : 2.0) * A1[i](a, b2));
            for (int a = 0; a < n2; ++a)
                for (int b2 = a; b2 < n2; ++b2)
                    p.add_entry_coeff(r, B2, a, b2, (a == b2 ? 1.0 : 2.0) * A2[i](a, b2));
            p.add_scalar_coeff(r, u, au[i]);
            p.add_scalar_coeff(r, v, av[i]);
            p.add_scalar_coeff(r, f, af[i]);
        }
        for (int a = 0; a < n1; ++a)
            for (int b2 = a; b2 < n1; ++b2)
                p.add_entry_obj(B1, a, b2, (a == b2 ? 1.0 : 2.0) * C1(a, b2));
        for (int a = 0; a < n2; ++a)
            for (int b2 = a; b2 < n2; ++b2)
                p.add_entry_obj(B2, a, b2, (a == b2 ? 1.0 : 2.0) * C2(a, b2));
        p.add_scalar_obj(u, cu);
        p.add_scalar_obj(v, cv);
        p.add_scalar_obj(f, cf);

        const double opt = (C1 * X1).trace() + cu * xu + cf * xfree;
        const ConicSolution sol = solve(p);
        REQUIRE(sol.status == SolveStatus::optimal);
        CHECK(sol.obj_primal ==
              doctest::Approx(opt).epsilon(1e-6 * (1.0 + std::abs(opt))));
        CHECK(sol.primal_residual < 1e-6);
        CHECK(sol.dual_residual < 1e-6);
    }
}

TEST_CASE("block permutation invariance") {
    auto build = [](bool swap_order) {
        ConicProblem p;
        int X, Y;
        if (swap_order) {
            Y = p.add_psd_block(3, "Y");
            X = p.add_psd_block(2, "X");
        } else {
            X = p.add_psd_block(2, "X");
            Y = p.add_psd_block(3, "Y");
        }
        p.add_entry_obj(X, 0, 0, 1.0);
        p.add_entry_obj(X, 1, 1, 2.0);
        p.add_entry_obj(Y, 0, 0, 1.0);
        p.add_entry_obj(Y, 1, 1, 1.0);
        p.add_entry_obj(Y, 2, 2, 3.0);
        int r1 = p.add_constraint(1.0);
        p.add_entry_coeff(r1, X, 0, 1, 2.0);
        p.add_entry_coeff(r1, Y, 0, 2, 1.0);
        int r2 = p.add_constraint(2.0);
        p.add_entry_coeff(r2, X, 0, 0, 1.0);
        p.add_entry_coeff(r2, Y, 1, 1, 1.0);
        return solve(p).obj_primal;
    };
    const double a = build(false);
    const double b = build(true);
    CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
}

TEST_CASE("objective scaling covariance") {
    auto build = [](double kappa) {
        ConicProblem p;
        const int X = p.add_psd_block(3, "X");
        for (int i = 0; i < 3; ++i)
            p.add_entry_obj(X, i, i, kappa * (1.0 + i));
        int r1 = p.add_constraint(1.0);
        p.add_entry_coeff(r1, X, 0, 1, 1.0);
        p.add_entry_coeff(r1, X, 2, 2, 1.0);
        int r2 = p.add_constraint(0.5);
        p.add_entry_coeff(r2, X, 0, 0, 1.0);
        return solve(p);
    };
    const ConicSolution s1 = build(1.0);
    const ConicSolution s2 = build(3.7);
    REQUIRE(s1.status == SolveStatus::optimal);
    REQUIRE(s2.status == SolveStatus::optimal);
    CHECK(s2.obj_primal == doctest::Approx(3.7 * s1.obj_primal).epsilon(1e-9));
    CHECK((s1.psd_values[0] - s2.psd_values[0]).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("weak duality along the iterate trace") {
    ConicProblem p;
    const int X = p.add_psd_block(4, "X");
    auto rng = rng_for(5);
    const MatrixXd C = random_sym(4, rng) + 4.0 * MatrixXd::Identity(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b)
            p.add_entry_obj(X, a, b, (a == b ? 1.0 : 2.0) * C(a, b));
    int r = p.add_constraint(1.0);
    for (int a = 0; a < 4; ++a)
        p.add_entry_coeff(r, X, a, a, 1.0);
    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    for (const auto& it : sol.trace) {
        if (it.pres <= 1e-8 && it.dres <= 1e-8)
            CHECK(it.pobj >= it.dobj - 1e-9 * (1.0 + std::abs(it.pobj)));
    }
}

TEST_CASE("hermitian lmi lowering matches complex arithmetic") {
    // S == H0 + x*H1 with x pinned; solve a feasibility-ish problem and check
    // the slack block against the complex expression.
    auto rng = rng_for(42);
    const int n = 3;
    const MatrixXcd H1 = random_hermitian(n, rng);
    MatrixXcd H0 = random_hermitian(n, rng);
    H0 = H0 + (3.0 + std::abs(H0.eigenvalues().real().minCoeff())) * MatrixXcd::Identity(n, n);

    ConicProblem p;
    const int xb = p.add_nonneg("x");
    HermitianConstraint lmi(p, n, "S");
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            lmi.add_const(H0(a, b), a, b);
            lmi.add_scalar_term(xb, H1(a, b), a, b);
        }
    const int rx = p.add_constraint(0.25);
    p.add_scalar_coeff(rx, xb, 1.0);
    p.add_scalar_obj(xb, 1.0);

    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    const MatrixXcd S = sol.hermitian_value(p, lmi.slack_block());
    const MatrixXcd expect = H0 + 0.25 * H1;
    CHECK((S - expect).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("congruence bordering against direct construction") {
    auto rng = rng_for(43);
    const int n = 3;
    Eigen::VectorXcd h(n);
    std::normal_distribution<double> g;
    for (int i = 0; i < n; ++i)
        h[i] = std::complex<double>(g(rng), g(rng));

    ConicProblem p;
    const int W = p.add_hermitian_block(n, "W");
    HermitianConstraint lmi(p, n + 1, "S");
    lmi.add_congruence(h, W, 1.0);
    // pin W to a known PD matrix via its complex degrees of freedom
    auto rng2 = rng_for(44);
    MatrixXcd W0 = random_hermitian(n, rng2);
    W0 = W0 * 0.1 + (1.5 + std::abs(W0.eigenvalues().real().minCoeff())) * MatrixXcd::Identity(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            int rr = p.add_constraint(W0(a, b).real());
            p.add_herm_re_coeff(rr, W, a, b, 1.0);
            if (a < b) {
                int ri = p.add_constraint(W0(a, b).imag());
                p.add_herm_im_coeff(ri, W, a, b, 1.0);
            }
        }
    p.add_herm_trace_obj(W, 1.0);

    const ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    const MatrixXcd Wv = sol.hermitian_value(p, W);
    CHECK((Wv - W0).cwiseAbs().maxCoeff() < 1e-6);
    const MatrixXcd S = sol.hermitian_value(p, lmi.slack_block());
    MatrixXcd border(n + 1, n + 1);
    border.topLeftCorner(n, n) = W0;
    border.topRightCorner(n, 1) = W0 * h;
    border.bottomLeftCorner(1, n) = (W0 * h).adjoint();
    border(n, n) = std::real(h.dot(W0 * h));
    CHECK((S - border).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("presolve drops duplicate rows and keeps the answer") {
    ConicProblem p;
    const int X = p.add_psd_block(2, "X");
    p.add_entry_obj(X, 0, 0, 1.0);
    p.add_entry_obj(X, 1, 1, 1.0);
    int r1 = p.add_constraint(1.0);
    p.add_entry_coeff(r1, X, 0, 0, 1.0);
    int r2 = p.add_constraint(1.0); // duplicate of r1
    p.add_entry_coeff(r2, X, 0, 0, 1.0);
    Solver s(p);
    CHECK(s.removed_rows() == 1);
    const ConicSolution sol = s.solve();
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.obj_primal == doctest::Approx(1.0).epsilon(1e-7));

    // now make the duplicate inconsistent
    p.set_rhs(r2, 2.0);
    Solver s2(p);
    const ConicSolution bad = s2.solve();
    CHECK(bad.status == SolveStatus::infeasible);
}

TEST_CASE("problem dump is printable") {
    ConicProblem p;
    const int X = p.add_psd_block(2, "X");
    p.add_entry_obj(X, 0, 0, 1.0);
    int r = p.add_constraint(1.0);
    p.add_entry_coeff(r, X, 0, 0, 1.0);
    std::ostringstream os;
    p.dump(os);
    CHECK(os.str().find("psd 2x2") != std::string::npos);
}
