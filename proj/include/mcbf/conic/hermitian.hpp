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

#ifndef MCBF_CONIC_HERMITIAN_HPP
#define MCBF_CONIC_HERMITIAN_HPP

#include <Eigen/Dense>
#include <complex>

#include "mcbf/conic/problem.hpp"

namespace mcbf::conic {

// Realification of a Hermitian matrix: [Re H, -Im H; Im H, Re H]. The map is
// linear, preserves positive semidefiniteness, doubles every eigenvalue's
// multiplicity and doubles the trace.
Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& H, double herm_tol = 1e-12);

// Inverse of embed_hermitian. Also accepts a general real symmetric 2n x 2n
// matrix, in which case it returns the Hermitian matrix obtained by averaging
// X with J X J^T (J the canonical complex structure); for embedded inputs this
// is the exact inverse.
Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& X);

/// Lowers a constraint "S == E(vars)" where E is an affine Hermitian-matrix
/// expression and S is a fresh PSD slack block. Since any real PSD matrix
/// whose complex projection equals E certifies E >= 0 (and embed(E) is such a
/// matrix), pinning only the n^2 complex degrees of freedom of S is exact.
///
/// Terms are accumulated on the expression side; the constant part of the
/// expression becomes the right-hand side.
class HermitianConstraint {
  public:
    HermitianConstraint(ConicProblem& problem, int order, std::string name = "");

    int slack_block() const { return slack_; }
    int order() const { return order_; }

    // expr(a,b) += coeff * W(p,q), W a Hermitian block variable. (a,b) with
    // a <= b addresses the upper-triangle entry; the (b,a) entry is implied.
    void add_var_term(int herm_block, int p, int q, std::complex<double> coeff, int a, int b);
    // expr(a,b) += coeff * x, x a scalar (nonneg/free) block variable.
    void add_scalar_term(int scalar_block, std::complex<double> coeff, int a, int b);
    // expr += x * C for a constant Hermitian matrix C.
    void add_scalar_matrix_term(int scalar_block, const Eigen::MatrixXcd& C);
    // expr(a,b) += value (constant).
    void add_const(std::complex<double> value, int a, int b);
    // expr += coeff * [I; h^H] W [I, h] with W a Hermitian block of order n-1
    // (the classic S-lemma congruence bordering).
    void add_congruence(const Eigen::VectorXcd& h, int herm_block, double coeff);

  private:
    int row_re(int a, int b) const;
    int row_im(int a, int b) const; // requires a < b

    ConicProblem& problem_;
    int order_;
    int slack_;
    std::vector<int> re_rows_;
    std::vector<int> im_rows_;
};

} // namespace mcbf::conic

#endif
