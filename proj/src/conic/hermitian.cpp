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

#include "mcbf/conic/hermitian.hpp"

#include <stdexcept>

namespace mcbf::conic {

Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& H, double herm_tol) {
    if (H.rows() != H.cols())
        throw std::invalid_argument("embed_hermitian: matrix must be square");
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    if (((H - H.adjoint()).cwiseAbs().maxCoeff()) > herm_tol * scale)
        throw std::invalid_argument("embed_hermitian: matrix is not Hermitian");
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd X(2 * n, 2 * n);
    X.topLeftCorner(n, n) = H.real();
    X.topRightCorner(n, n) = -H.imag();
    X.bottomLeftCorner(n, n) = H.imag();
    X.bottomRightCorner(n, n) = H.real();
    // Symmetrize away the rounding asymmetry of a merely numerically
    // Hermitian input.
    X = 0.5 * (X + X.transpose()).eval();
    return X;
}

Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& X) {
    if (X.rows() != X.cols() || X.rows() % 2 != 0)
        throw std::invalid_argument("extract_hermitian: expected an even-order square matrix");
    const Eigen::Index n = X.rows() / 2;
    const Eigen::MatrixXd re = 0.5 * (X.topLeftCorner(n, n) + X.bottomRightCorner(n, n));
    const Eigen::MatrixXd im = 0.5 * (X.bottomLeftCorner(n, n) - X.topRightCorner(n, n));
    Eigen::MatrixXcd H(n, n);
    H.real() = 0.5 * (re + re.transpose());
    H.imag() = 0.5 * (im - im.transpose());
    return H;
}

HermitianConstraint::HermitianConstraint(ConicProblem& problem, int order, std::string name)
    : problem_(problem), order_(order) {
    if (order < 1)
        throw std::invalid_argument("HermitianConstraint: order must be >= 1");
    slack_ = problem_.add_hermitian_block(order, std::move(name));
    re_rows_.assign(static_cast<size_t>(order * order), -1);
    im_rows_.assign(static_cast<size_t>(order * order), -1);
    for (int a = 0; a < order; ++a) {
        for (int b = a; b < order; ++b) {
            const int r = problem_.add_constraint(0.0);
            re_rows_[static_cast<size_t>(a * order + b)] = r;
            problem_.add_herm_re_coeff(r, slack_, a, b, 1.0);
            if (a < b) {
                const int ri = problem_.add_constraint(0.0);
                im_rows_[static_cast<size_t>(a * order + b)] = ri;
                problem_.add_herm_im_coeff(ri, slack_, a, b, 1.0);
            }
        }
    }
}

int HermitianConstraint::row_re(int a, int b) const {
    return re_rows_[static_cast<size_t>(a * order_ + b)];
}

int HermitianConstraint::row_im(int a, int b) const {
    return im_rows_[static_cast<size_t>(a * order_ + b)];
}

void HermitianConstraint::add_var_term(int herm_block, int p, int q, std::complex<double> coeff,
                                       int a, int b) {
    if (a > b)
        throw std::invalid_argument("HermitianConstraint: address upper-triangle entries (a <= b)");
    if (coeff == std::complex<double>(0.0, 0.0))
        return;
    const int u = std::min(p, q);
    const int v = std::max(p, q);
    const double sgn = (p <= q) ? 1.0 : -1.0; // W(p,q) = conj(W(q,p))
    const double cr = coeff.real();
    const double ci = coeff.imag();
    // Expression terms enter the row "S - expr = const" negated.
    const int rr = row_re(a, b);
    problem_.add_herm_re_coeff(rr, herm_block, u, v, -cr);
    if (u != v)
        problem_.add_herm_im_coeff(rr, herm_block, u, v, ci * sgn);
    if (a < b) {
        const int ri = row_im(a, b);
        problem_.add_herm_re_coeff(ri, herm_block, u, v, -ci);
        if (u != v)
            problem_.add_herm_im_coeff(ri, herm_block, u, v, -cr * sgn);
    }
}

void HermitianConstraint::add_scalar_term(int scalar_block, std::complex<double> coeff, int a, int b) {
    if (a > b)
        throw std::invalid_argument("HermitianConstraint: address upper-triangle entries (a <= b)");
    if (coeff.real() != 0.0)
        problem_.add_scalar_coeff(row_re(a, b), scalar_block, -coeff.real());
    if (a < b && coeff.imag() != 0.0)
        problem_.add_scalar_coeff(row_im(a, b), scalar_block, -coeff.imag());
}

void HermitianConstraint::add_scalar_matrix_term(int scalar_block, const Eigen::MatrixXcd& C) {
    if (C.rows() != order_ || C.cols() != order_)
        throw std::invalid_argument("HermitianConstraint: coefficient matrix order mismatch");
    for (int a = 0; a < order_; ++a)
        for (int b = a; b < order_; ++b)
            add_scalar_term(scalar_block, C(a, b), a, b);
}

void HermitianConstraint::add_const(std::complex<double> value, int a, int b) {
    if (a > b)
        throw std::invalid_argument("HermitianConstraint: address upper-triangle entries (a <= b)");
    if (a == b && std::abs(value.imag()) > 1e-12)
        throw std::invalid_argument("HermitianConstraint: diagonal constants must be real");
    const int rr = row_re(a, b);
    problem_.set_rhs(rr, problem_.rhs(rr) + value.real());
    if (a < b) {
        const int ri = row_im(a, b);
        problem_.set_rhs(ri, problem_.rhs(ri) + value.imag());
    }
}

void HermitianConstraint::add_congruence(const Eigen::VectorXcd& h, int herm_block, double coeff) {
    const int nc = order_ - 1;
    if (static_cast<int>(h.size()) != nc)
        throw std::invalid_argument("HermitianConstraint: bordering vector length mismatch");
    if (coeff == 0.0)
        return;
    // [I; h^H] W [I, h]: top-left block is W itself, border column W h,
    // corner h^H W h.
    for (int a = 0; a < nc; ++a)
        for (int b = a; b < nc; ++b)
            add_var_term(herm_block, a, b, coeff, a, b);
    for (int a = 0; a < nc; ++a)
        for (int q = 0; q < nc; ++q)
            add_var_term(herm_block, a, q, coeff * h[q], a, nc);
    for (int p = 0; p < nc; ++p)
        for (int q = 0; q < nc; ++q)
            add_var_term(herm_block, p, q, coeff * std::conj(h[p]) * h[q], nc, nc);
}

} // namespace mcbf::conic
