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

#include "mcbf/admm/consensus.hpp"

#include <stdexcept>

namespace mcbf::admm {

ConsensusMap::ConsensusMap(int Nc, int K) {
    if (Nc < 2 || K < 1)
        throw std::invalid_argument("ConsensusMap: Nc >= 2 and K >= 1 required "
                                    "(a single cell has no inter-cell interference)");
    idx_.Nc = Nc;
    idx_.K = K;
}

Eigen::VectorXd ConsensusMap::apply_En(int n, const Eigen::VectorXd& t_global) const {
    if (t_global.size() != idx_.global_dim())
        throw std::invalid_argument("ConsensusMap: global vector length mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(idx_.local_dim());
    for (int k = 0; k < idx_.K; ++k) {
        double acc = 0.0;
        for (int m = 0; m < idx_.Nc; ++m)
            if (m != n)
                acc += t_global[idx_.global_of(m, n, k)];
        out[idx_.local_T(k)] = acc;
    }
    for (int m = 0; m < idx_.Nc; ++m)
        if (m != n)
            for (int k = 0; k < idx_.K; ++k)
                out[idx_.local_out(n, m, k)] = t_global[idx_.global_of(n, m, k)];
    return out;
}

Eigen::VectorXd ConsensusMap::apply_pinv(const std::vector<Eigen::VectorXd>& y_stack) const {
    if (static_cast<int>(y_stack.size()) != idx_.Nc)
        throw std::invalid_argument("ConsensusMap: expected Nc stacked local vectors");
    for (const auto& y : y_stack)
        if (y.size() != idx_.local_dim())
            throw std::invalid_argument("ConsensusMap: local vector length mismatch");
    // z = E^T y
    Eigen::VectorXd z(idx_.global_dim());
    for (int m = 0; m < idx_.Nc; ++m)
        for (int n = 0; n < idx_.Nc; ++n) {
            if (m == n)
                continue;
            for (int k = 0; k < idx_.K; ++k)
                z[idx_.global_of(m, n, k)] = y_stack[static_cast<size_t>(m)][idx_.local_out(m, n, k)] +
                                             y_stack[static_cast<size_t>(n)][idx_.local_T(k)];
        }
    // per receiving-(n,k) block of E^T E: (I + 11^T)^{-1} = I - 11^T/Nc
    Eigen::VectorXd out(idx_.global_dim());
    for (int n = 0; n < idx_.Nc; ++n)
        for (int k = 0; k < idx_.K; ++k) {
            double sum = 0.0;
            for (int m = 0; m < idx_.Nc; ++m)
                if (m != n)
                    sum += z[idx_.global_of(m, n, k)];
            const double corr = sum / idx_.Nc;
            for (int m = 0; m < idx_.Nc; ++m)
                if (m != n)
                    out[idx_.global_of(m, n, k)] = z[idx_.global_of(m, n, k)] - corr;
        }
    return out;
}

Eigen::MatrixXd ConsensusMap::dense_En(int n) const {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(idx_.local_dim(), idx_.global_dim());
    for (int k = 0; k < idx_.K; ++k)
        for (int m = 0; m < idx_.Nc; ++m)
            if (m != n)
                E(idx_.local_T(k), idx_.global_of(m, n, k)) = 1.0;
    for (int m = 0; m < idx_.Nc; ++m)
        if (m != n)
            for (int k = 0; k < idx_.K; ++k)
                E(idx_.local_out(n, m, k), idx_.global_of(n, m, k)) = 1.0;
    return E;
}

double penalty_schedule(int q, double c_q) {
    if (q < 0)
        throw std::invalid_argument("penalty_schedule: q must be >= 0");
    if (c_q >= 1.0)
        return 1.0;
    return std::min(1.0, static_cast<double>(q + 1) * c_q);
}

BackhaulCost backhaul_cost(int Nc, int K) {
    if (Nc < 2)
        throw std::invalid_argument("backhaul_cost: Nc >= 2 required");
    BackhaulCost out;
    out.ours = static_cast<long long>(Nc) * Nc * K;
    out.baseline = 2LL * Nc * (Nc - 1) * K;
    out.ratio = static_cast<double>(out.ours) / static_cast<double>(out.baseline);
    return out;
}

double normalized_accuracy(double p_q, double p_star) {
    if (p_star <= 0.0)
        throw std::invalid_argument("normalized_accuracy: reference power must be positive");
    return std::abs(p_q - p_star) / p_star;
}

} // namespace mcbf::admm
