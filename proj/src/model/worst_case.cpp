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

#include "mcbf/model/worst_case.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace mcbf::model {

namespace {

// phi(nu) = sum_i gt_i^2 / (lam_i + nu)^2, restricted to lam_i + nu > 0 terms.
double phi_of(const Eigen::VectorXd& lam, const Eigen::VectorXd& gt, double nu) {
    double v = 0.0;
    for (int i = 0; i < lam.size(); ++i) {
        const double d = lam[i] + nu;
        if (d > 0.0)
            v += (gt[i] / d) * (gt[i] / d);
    }
    return v;
}

} // namespace

TrsResult trs_unit_ball(const Eigen::MatrixXd& B, const Eigen::VectorXd& g) {
    const int n = static_cast<int>(B.rows());
    if (B.cols() != n || g.size() != n)
        throw std::invalid_argument("trs_unit_ball: dimension mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd V = es.eigenvectors();
    const Eigen::VectorXd gt = V.transpose() * g;
    const double lmin = lam.minCoeff();
    const double bscale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double eig_tol = 1e-12 * bscale;

    TrsResult out;

    // interior candidate (requires B positive semidefinite with g in range)
    if (lmin > -eig_tol) {
        bool in_range = true;
        double norm2 = 0.0;
        Eigen::VectorXd ut = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (lam[i] > eig_tol) {
                ut[i] = -gt[i] / lam[i];
                norm2 += ut[i] * ut[i];
            } else if (std::abs(gt[i]) > 1e-13 * (1.0 + g.norm())) {
                in_range = false;
            }
        }
        if (in_range && norm2 <= 1.0) {
            out.u = V * ut;
            out.value = out.u.dot(B * out.u) + 2.0 * g.dot(out.u);
            out.multiplier = 0.0;
            out.boundary = false;
            return out;
        }
    }

    // boundary solution: (B + nu I) u = -g with nu >= nu0 and ||u|| = 1
    const double nu0 = std::max(0.0, -lmin);
    double proj = 0.0; // weight of g on the minimal eigenspace
    for (int i = 0; i < n; ++i)
        if (lam[i] <= lmin + eig_tol)
            proj = std::max(proj, std::abs(gt[i]));

    const bool g_perp_min = proj <= 1e-11 * (1.0 + g.norm());
    const double phi_perp = [&] {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = lam[i] + nu0;
            if (lam[i] > lmin + eig_tol && d > 0.0)
                v += (gt[i] / d) * (gt[i] / d);
        }
        return v;
    }();

    if (lmin < -eig_tol && g_perp_min && phi_perp <= 1.0) {
        // hard case: complete the boundary point with a minimal-eigenvector
        // component
        Eigen::VectorXd ut = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            if (lam[i] > lmin + eig_tol)
                ut[i] = -gt[i] / (lam[i] + nu0);
        const double theta = std::sqrt(std::max(0.0, 1.0 - ut.squaredNorm()));
        int imin = 0;
        lam.minCoeff(&imin);
        ut[imin] += theta;
        out.u = V * ut;
        out.multiplier = nu0;
        out.boundary = true;
        out.hard_case = true;
        out.value = out.u.dot(B * out.u) + 2.0 * g.dot(out.u);
        return out;
    }

    // regular boundary case: phi is strictly decreasing on (nu0, inf) with
    // phi -> inf at nu0+ (g has weight on the minimal eigenspace or phi_perp
    // > 1) and phi -> 0; solve phi(nu) = 1 by safeguarded Newton on
    // psi(nu) = 1/sqrt(phi) - 1.
    double lo = nu0;
    double hi = std::max(nu0 * 2.0 + 1.0, nu0 + g.norm() + bscale);
    while (phi_of(lam, gt, hi) > 1.0)
        hi = 2.0 * hi + 1.0;
    double nu = 0.5 * (std::max(lo, nu0 + 1e-300) + hi);
    for (int it = 0; it < 300; ++it) {
        const double phi = phi_of(lam, gt, nu);
        if (phi > 1.0)
            lo = nu;
        else
            hi = nu;
        // Newton step on psi = phi^{-1/2} - 1: psi' = -phi^{-3/2} phi' / 2
        double dphi = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = lam[i] + nu;
            if (d > 0.0)
                dphi += -2.0 * gt[i] * gt[i] / (d * d * d);
        }
        double next;
        if (phi > 0.0 && dphi < 0.0) {
            const double psi = 1.0 / std::sqrt(phi) - 1.0;
            const double dpsi = -0.5 * std::pow(phi, -1.5) * dphi;
            next = nu - psi / dpsi;
        } else {
            next = 0.5 * (lo + hi);
        }
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - nu) <= 1e-15 * (1.0 + std::abs(nu)))
            break;
        nu = next;
    }
    Eigen::VectorXd ut(n);
    for (int i = 0; i < n; ++i) {
        const double d = lam[i] + nu;
        ut[i] = d > 0.0 ? -gt[i] / d : 0.0;
    }
    // exact unit norm (guards the tail of the root-find)
    const double un = ut.norm();
    if (un > 0.0)
        ut /= un;
    out.u = V * ut;
    out.multiplier = nu;
    out.boundary = true;
    out.value = out.u.dot(B * out.u) + 2.0 * g.dot(out.u);
    return out;
}

WorstCaseResult worst_case_quadratic(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& M,
                                     const Eigen::MatrixXcd& Q, Sense sense) {
    const int n = static_cast<int>(h.size());
    if (M.rows() != n || M.cols() != n || Q.rows() != n || Q.cols() != n)
        throw std::invalid_argument("worst_case_quadratic: dimension mismatch");
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + M.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("worst_case_quadratic: M must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> qe(0.5 * (Q + Q.adjoint()));
    if (qe.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("worst_case_quadratic: Q must be positive definite");

    const Eigen::MatrixXcd qisqrt = qe.eigenvectors() *
                                    qe.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                    qe.eigenvectors().adjoint();

    // objective in whitened coordinates u = Q^{1/2} e:
    //   (h + Q^{-1/2}u)^H M (h + Q^{-1/2}u) = c0 + 2 Re(gc^H u) + u^H Bc u
    const double flip = (sense == Sense::maximize) ? -1.0 : 1.0;
    const Eigen::MatrixXcd Bc = flip * (qisqrt * M * qisqrt);
    const Eigen::VectorXcd gc = flip * (qisqrt * (M * h));
    const double c0 = flip * std::real(h.dot(M * h));

    // realify: u = ur + i ui, 2n-dimensional real trust region subproblem
    Eigen::MatrixXd B(2 * n, 2 * n);
    B.topLeftCorner(n, n) = Bc.real();
    B.topRightCorner(n, n) = -Bc.imag();
    B.bottomLeftCorner(n, n) = Bc.imag();
    B.bottomRightCorner(n, n) = Bc.real();
    Eigen::VectorXd g(2 * n);
    g.head(n) = gc.real();
    g.tail(n) = gc.imag();

    const TrsResult trs = trs_unit_ball(B, g);

    WorstCaseResult out;
    out.e_star = qisqrt * (trs.u.head(n) + std::complex<double>(0, 1) * trs.u.tail(n));
    out.multiplier = trs.multiplier;
    out.boundary = trs.boundary;
    out.value = flip * (c0 + trs.value);

    // certify: feasibility, consistency of the value, first-order conditions
    const Eigen::VectorXcd he = h + out.e_star;
    const double direct = std::real(he.dot(M * he));
    const double vscale = 1.0 + std::abs(direct) + std::abs(out.value);
    if (std::abs(direct - out.value) > 1e-8 * vscale)
        throw std::runtime_error("worst_case_quadratic: value certification failed");
    const double feas = std::real(out.e_star.dot(Q * out.e_star));
    if (feas > 1.0 + 1e-7)
        throw std::runtime_error("worst_case_quadratic: infeasible stationary point");
    const Eigen::VectorXd grad = (B + trs.multiplier * Eigen::MatrixXd::Identity(2 * n, 2 * n)) *
                                     trs.u +
                                 g;
    if (grad.norm() > 1e-6 * (1.0 + B.cwiseAbs().maxCoeff() + g.norm() + trs.multiplier))
        throw std::runtime_error("worst_case_quadratic: first-order conditions violated");
    out.value = direct; // report the directly evaluated quantity
    return out;
}

} // namespace mcbf::model
