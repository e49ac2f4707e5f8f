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

#include "mcbf/sdr/extract.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace mcbf::sdr {

RankOneResult extract_rank_one(const Eigen::MatrixXcd& W, double rank_tol, double zero_tol) {
    const int n = static_cast<int>(W.rows());
    if (W.cols() != n)
        throw std::invalid_argument("extract_rank_one: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (W + W.adjoint()));
    const Eigen::VectorXd ev = es.eigenvalues(); // ascending
    const double lmax = ev[n - 1];
    const double scale = std::max(1.0, std::abs(lmax));
    if (ev[0] < -rank_tol * scale)
        throw std::invalid_argument("extract_rank_one: matrix is not PSD within tolerance");

    RankOneResult out;
    if (W.real().trace() <= std::max(zero_tol, 0.0)) {
        out.zero = true;
        out.eig_ratio = 0.0;
        out.w = Eigen::VectorXcd::Zero(n);
        return out;
    }
    const double l2 = (n > 1) ? std::max(0.0, ev[n - 2]) : 0.0;
    out.eig_ratio = l2 / lmax;
    if (out.eig_ratio > rank_tol)
        return out; // report only

    Eigen::VectorXcd w = std::sqrt(lmax) * es.eigenvectors().col(n - 1);
    // fix the global phase: largest-magnitude entry real positive
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < n; ++i)
        if (std::abs(w[i]) > amax) {
            amax = std::abs(w[i]);
            imax = i;
        }
    if (amax > 0.0)
        w *= std::conj(w[imax]) / std::abs(w[imax]);
    out.w = std::move(w);
    return out;
}

} // namespace mcbf::sdr
