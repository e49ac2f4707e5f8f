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

#include "mcbf/conic/problem.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mcbf::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865475;
} // namespace

int svec_len(int s) { return s * (s + 1) / 2; }

int svec_index(int s, int i, int j) {
    if (i < j)
        std::swap(i, j);
    return j * s - j * (j - 1) / 2 + (i - j);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& X) {
    const int s = static_cast<int>(X.rows());
    Eigen::VectorXd u(svec_len(s));
    int idx = 0;
    for (int j = 0; j < s; ++j)
        for (int i = j; i < s; ++i)
            u[idx++] = (i == j) ? X(i, j) : kSqrt2 * 0.5 * (X(i, j) + X(j, i));
    return u;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& u, int s) {
    Eigen::MatrixXd X(s, s);
    int idx = 0;
    for (int j = 0; j < s; ++j)
        for (int i = j; i < s; ++i) {
            const double v = (i == j) ? u[idx] : kInvSqrt2 * u[idx];
            X(i, j) = v;
            X(j, i) = v;
            ++idx;
        }
    return X;
}

int ConicProblem::add_block(BlockKind kind, int size, int complex_order, std::string name) {
    if (size < 1)
        throw std::invalid_argument("conic: block size must be >= 1");
    BlockSpec spec;
    spec.kind = kind;
    spec.size = size;
    spec.dim = (kind == BlockKind::psd) ? svec_len(size) : 1;
    spec.offset = total_dim_;
    spec.complex_order = complex_order;
    spec.name = std::move(name);
    total_dim_ += spec.dim;
    c_.resize(static_cast<size_t>(total_dim_), 0.0);
    blocks_.push_back(std::move(spec));
    return static_cast<int>(blocks_.size()) - 1;
}

int ConicProblem::add_psd_block(int size, std::string name) {
    return add_block(BlockKind::psd, size, 0, std::move(name));
}

int ConicProblem::add_hermitian_block(int n, std::string name) {
    return add_block(BlockKind::psd, 2 * n, n, std::move(name));
}

int ConicProblem::add_nonneg(std::string name) {
    return add_block(BlockKind::nonneg, 1, 0, std::move(name));
}

int ConicProblem::add_free(std::string name) {
    return add_block(BlockKind::free_scalar, 1, 0, std::move(name));
}

int ConicProblem::add_constraint(double rhs) {
    b_.push_back(rhs);
    return static_cast<int>(b_.size()) - 1;
}

void ConicProblem::set_rhs(int row, double v) {
    check_row(row);
    b_[static_cast<size_t>(row)] = v;
}

void ConicProblem::check_row(int row) const {
    if (row < 0 || row >= num_rows())
        throw std::invalid_argument("conic: constraint row out of range");
}

void ConicProblem::check_psd(int block) const {
    if (block < 0 || block >= num_blocks() || blocks_[static_cast<size_t>(block)].kind != BlockKind::psd)
        throw std::invalid_argument("conic: expected a PSD block id");
}

void ConicProblem::check_scalar(int block) const {
    if (block < 0 || block >= num_blocks() || blocks_[static_cast<size_t>(block)].kind == BlockKind::psd)
        throw std::invalid_argument("conic: expected a scalar block id");
}

void ConicProblem::check_herm(int block, int i, int j) const {
    check_psd(block);
    const BlockSpec& spec = blocks_[static_cast<size_t>(block)];
    if (spec.complex_order <= 0)
        throw std::invalid_argument("conic: block is not a Hermitian embedding");
    if (i < 0 || j < 0 || i >= spec.complex_order || j >= spec.complex_order)
        throw std::invalid_argument("conic: Hermitian entry out of range");
}

int ConicProblem::coord(int block, int i, int j) const {
    const BlockSpec& spec = blocks_[static_cast<size_t>(block)];
    if (i < 0 || j < 0 || i >= spec.size || j >= spec.size)
        throw std::invalid_argument("conic: matrix entry out of range");
    return spec.offset + svec_index(spec.size, i, j);
}

void ConicProblem::add_entry_coeff(int row, int block, int i, int j, double v) {
    check_row(row);
    check_psd(block);
    if (v == 0.0)
        return;
    const double sv = (i == j) ? v : v * kInvSqrt2;
    triplets_.push_back({row, coord(block, i, j), sv});
}

void ConicProblem::add_scalar_coeff(int row, int block, double v) {
    check_row(row);
    check_scalar(block);
    if (v == 0.0)
        return;
    triplets_.push_back({row, blocks_[static_cast<size_t>(block)].offset, v});
}

void ConicProblem::add_entry_obj(int block, int i, int j, double v) {
    check_psd(block);
    const double sv = (i == j) ? v : v * kInvSqrt2;
    c_[static_cast<size_t>(coord(block, i, j))] += sv;
}

void ConicProblem::set_entry_obj(int block, int i, int j, double v) {
    check_psd(block);
    const double sv = (i == j) ? v : v * kInvSqrt2;
    c_[static_cast<size_t>(coord(block, i, j))] = sv;
}

void ConicProblem::add_scalar_obj(int block, double v) {
    check_scalar(block);
    c_[static_cast<size_t>(blocks_[static_cast<size_t>(block)].offset)] += v;
}

void ConicProblem::set_scalar_obj(int block, double v) {
    check_scalar(block);
    c_[static_cast<size_t>(blocks_[static_cast<size_t>(block)].offset)] = v;
}

// Re W(i,j) = (X(i,j) + X(i+n,j+n)) / 2 on the embedded block.
void ConicProblem::add_herm_re_coeff(int row, int block, int i, int j, double v) {
    check_herm(block, i, j);
    const int n = blocks_[static_cast<size_t>(block)].complex_order;
    add_entry_coeff(row, block, i, j, 0.5 * v);
    add_entry_coeff(row, block, i + n, j + n, 0.5 * v);
}

// Im W(i,j) = (X(i+n,j) - X(i,j+n)) / 2 on the embedded block.
void ConicProblem::add_herm_im_coeff(int row, int block, int i, int j, double v) {
    check_herm(block, i, j);
    if (i == j)
        throw std::invalid_argument("conic: diagonal entries of a Hermitian matrix are real");
    const int n = blocks_[static_cast<size_t>(block)].complex_order;
    add_entry_coeff(row, block, i + n, j, 0.5 * v);
    add_entry_coeff(row, block, i, j + n, -0.5 * v);
}

void ConicProblem::add_herm_trace_obj(int block, double v) {
    check_herm(block, 0, 0);
    const BlockSpec& spec = blocks_[static_cast<size_t>(block)];
    for (int i = 0; i < spec.size; ++i)
        add_entry_obj(block, i, i, 0.5 * v);
}

double ConicProblem::eval_row(int row, const Eigen::VectorXd& x) const {
    check_row(row);
    double v = 0.0;
    for (const Triplet& t : triplets_)
        if (t.row == row)
            v += t.value * x[t.col];
    return v;
}

double ConicProblem::eval_objective(const Eigen::VectorXd& x) const {
    double v = obj_constant_;
    for (int i = 0; i < total_dim_; ++i)
        v += c_[static_cast<size_t>(i)] * x[i];
    return v;
}

void ConicProblem::dump(std::ostream& os) const {
    os << "conic problem: " << num_blocks() << " blocks, " << num_vars() << " coordinates, "
       << num_rows() << " equality rows\n";
    for (int i = 0; i < num_blocks(); ++i) {
        const BlockSpec& s = blocks_[static_cast<size_t>(i)];
        os << "  block " << i << ": ";
        switch (s.kind) {
        case BlockKind::psd:
            os << "psd " << s.size << "x" << s.size;
            if (s.complex_order > 0)
                os << " (hermitian " << s.complex_order << ")";
            break;
        case BlockKind::nonneg: os << "nonneg"; break;
        case BlockKind::free_scalar: os << "free"; break;
        }
        if (!s.name.empty())
            os << "  " << s.name;
        os << "\n";
    }
    os << "objective (coord value), constant " << obj_constant_ << ":\n";
    for (int i = 0; i < total_dim_; ++i)
        if (c_[static_cast<size_t>(i)] != 0.0)
            os << "  " << i << " " << c_[static_cast<size_t>(i)] << "\n";
    os << "constraints (row coord value ... = rhs):\n";
    for (int r = 0; r < num_rows(); ++r) {
        os << "  " << r << ":";
        for (const Triplet& t : triplets_)
            if (t.row == r)
                os << " (" << t.col << "," << t.value << ")";
        os << " = " << b_[static_cast<size_t>(r)] << "\n";
    }
}

} // namespace mcbf::conic
