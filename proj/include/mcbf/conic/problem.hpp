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

#ifndef MCBF_CONIC_PROBLEM_HPP
#define MCBF_CONIC_PROBLEM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mcbf::conic {

enum class BlockKind { psd, nonneg, free_scalar };

struct BlockSpec {
    BlockKind kind;
    int size;          // matrix order for psd blocks, 1 for scalars
    int dim;           // number of real coordinates (svec length for psd)
    int offset;        // offset of the block in the stacked coordinate vector
    int complex_order; // >0 if the block is the real embedding of a Hermitian matrix
    std::string name;
};

// Scaled symmetric vectorization: svec(X) stacks the lower triangle
// column-major with off-diagonal entries multiplied by sqrt(2), so that
// <A,X> = svec(A).svec(X).
int svec_len(int s);
int svec_index(int s, int i, int j);
Eigen::VectorXd svec(const Eigen::MatrixXd& X);
Eigen::MatrixXd smat(const Eigen::VectorXd& u, int s);

/// Block-structured conic program in standard primal form:
///   minimize    <c, x>
///   subject to  A x = b,  x in (PSD blocks) x R+^p x R^q.
///
/// Constraints and the objective are accumulated as coefficients on
/// symmetric matrix entries (a coefficient v on entry (i,j), i != j, means
/// the functional contains v * X(i,j) where X(i,j) and X(j,i) are the same
/// unknown) or on scalar blocks. Right-hand sides and objective entries can
/// be overwritten later, which lets a caller re-solve the same constraint
/// structure with updated data.
class ConicProblem {
  public:
    int add_psd_block(int size, std::string name = "");
    // PSD block of order 2n holding the real embedding [Re W, -Im W; Im W, Re W]
    // of a Hermitian matrix W of order n.
    int add_hermitian_block(int n, std::string name = "");
    int add_nonneg(std::string name = "");
    int add_free(std::string name = "");

    int add_constraint(double rhs = 0.0);
    void set_rhs(int row, double v);
    double rhs(int row) const { return b_[static_cast<size_t>(row)]; }

    void add_entry_coeff(int row, int block, int i, int j, double v);
    void add_scalar_coeff(int row, int block, double v);

    void add_entry_obj(int block, int i, int j, double v);
    void set_entry_obj(int block, int i, int j, double v);
    void add_scalar_obj(int block, double v);
    void set_scalar_obj(int block, double v);
    void set_obj_constant(double v) { obj_constant_ = v; }
    double obj_constant() const { return obj_constant_; }

    // Functionals on the complex entries of a Hermitian block: coefficient v
    // on Re W(i,j) resp. Im W(i,j) (i > j for the imaginary part).
    void add_herm_re_coeff(int row, int block, int i, int j, double v);
    void add_herm_im_coeff(int row, int block, int i, int j, double v);
    void add_herm_trace_obj(int block, double v);

    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const BlockSpec& block(int id) const { return blocks_[static_cast<size_t>(id)]; }
    const std::vector<BlockSpec>& blocks() const { return blocks_; }
    int num_rows() const { return static_cast<int>(b_.size()); }
    int num_vars() const { return total_dim_; }

    struct Triplet {
        int row;
        int col; // stacked coordinate index
        double value;
    };
    const std::vector<Triplet>& triplets() const { return triplets_; }
    const std::vector<double>& rhs_vector() const { return b_; }
    const std::vector<double>& objective_vector() const { return c_; }

    // Value of a constraint row / the objective at a stacked coordinate vector.
    double eval_row(int row, const Eigen::VectorXd& x) const;
    double eval_objective(const Eigen::VectorXd& x) const;

    // Text dump (blocks, objective, constraints in sparse triplet form).
    void dump(std::ostream& os) const;

  private:
    int add_block(BlockKind kind, int size, int complex_order, std::string name);
    int coord(int block, int i, int j) const; // svec coordinate of entry (i,j)
    void check_row(int row) const;
    void check_psd(int block) const;
    void check_scalar(int block) const;
    void check_herm(int block, int i, int j) const;

    std::vector<BlockSpec> blocks_;
    std::vector<Triplet> triplets_;
    std::vector<double> b_;
    std::vector<double> c_; // dense over stacked coordinates
    double obj_constant_ = 0.0;
    int total_dim_ = 0;
};

} // namespace mcbf::conic

#endif
