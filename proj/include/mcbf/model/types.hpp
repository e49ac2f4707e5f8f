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

#ifndef MCBF_MODEL_TYPES_HPP
#define MCBF_MODEL_TYPES_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mcbf/conic/solver.hpp"

namespace mcbf::model {

// Unit conventions: all powers are carried in watts internally; dB/dBm only
// at I/O boundaries. SINR targets are stored linear.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Cell/user/antenna counts, SINR targets, noise powers and power weights.
/// Index conventions used throughout: user (n,k) flattens to n*K+k; the link
/// from BS m to user (n,k) flattens to (m*Nc+n)*K+k; edge links to m*L+l.
struct SystemConfig {
    int Nc = 1; // cells
    int K = 1;  // users per cell
    int Nt = 1; // BS antennas
    int L = 0;  // cell-edge users served by all BSs

    Eigen::VectorXd gamma;       // Nc*K linear SINR targets
    Eigen::VectorXd gamma_edge;  // L
    Eigen::VectorXd sigma2;      // Nc*K noise powers (watts)
    Eigen::VectorXd sigma2_edge; // L
    Eigen::VectorXd alpha;       // Nc power priority weights
    double p_max = dbm_to_watts(46.0);

    int nk(int n, int k) const { return n * K + k; }
    int link(int m, int n, int k) const { return (m * Nc + n) * K + k; }
    int elink(int m, int l) const { return m * L + l; }

    void validate() const; // throws std::invalid_argument on violated invariants

    static SystemConfig uniform(int Nc, int K, int Nt, double gamma_lin, double sigma2_w,
                                int L = 0, double gamma_edge_lin = 0.0,
                                double sigma2_edge_w = 0.0);
};

/// Presumed small-scale CSI vectors with combined large-scale amplitude
/// multipliers (pathloss * shadowing * antenna gain).
struct ChannelSet {
    int Nc = 0, K = 0, Nt = 0, L = 0;
    std::vector<Eigen::VectorXcd> hhat; // (m*Nc+n)*K+k
    std::vector<double> scale;          // same indexing, >= 0
    std::vector<Eigen::VectorXcd> ghat; // m*L+l
    std::vector<double> scale_edge;

    const Eigen::VectorXcd& h(int m, int n, int k) const {
        return hhat[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    double s(int m, int n, int k) const {
        return scale[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    const Eigen::VectorXcd& g(int m, int l) const { return ghat[static_cast<size_t>(m * L + l)]; }
    double s_edge(int m, int l) const { return scale_edge[static_cast<size_t>(m * L + l)]; }

    static ChannelSet zeros(int Nc, int K, int Nt, int L = 0);
    void validate(const SystemConfig& cfg) const;
};

/// CSI error ellipsoid e^H Q e <= 1 for one link. "exact" means zero error
/// (the perfect-CSI case); spherical uses Q = (1/radius^2) I.
struct LinkError {
    bool exact = false;
    bool spherical = true;
    double radius = 0.0;
    Eigen::MatrixXcd Q; // used when !spherical

    Eigen::MatrixXcd q_matrix(int Nt) const; // materializes Q (throws if exact)
};

struct ErrorModel {
    int Nc = 0, K = 0, Nt = 0, L = 0;
    std::vector<LinkError> links;      // (m*Nc+n)*K+k
    std::vector<LinkError> edge_links; // m*L+l

    const LinkError& link(int m, int n, int k) const {
        return links[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    LinkError& link(int m, int n, int k) {
        return links[static_cast<size_t>((m * Nc + n) * K + k)];
    }
    const LinkError& edge_link(int m, int l) const {
        return edge_links[static_cast<size_t>(m * L + l)];
    }

    bool all_intra_exact() const;
    bool all_spherical() const; // every non-exact link spherical

    static ErrorModel exact_csi(int Nc, int K, int Nt, int L = 0);
    static ErrorModel spherical(int Nc, int K, int Nt, double eps_intra, double eps_cross,
                                int L = 0, double eps_edge = 0.0);
    void validate() const; // non-exact Q must be Hermitian positive definite
};

/// Result of a centralized or distributed solve. Beamformer matrices are in
/// watts (W = w w^H at rank one); t holds worst-case inter-cell interference
/// powers in watts, indexed like links (entries with m == n unused).
struct BeamformerSolution {
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    double objective = 0.0; // weighted sum power, watts

    std::vector<Eigen::MatrixXcd> W; // Nc*K
    std::vector<std::optional<Eigen::VectorXcd>> w;
    std::vector<double> eig_ratio; // lambda2/lambda1 per W

    std::vector<Eigen::MatrixXcd> F; // Nc*L
    std::vector<std::optional<Eigen::VectorXcd>> f;
    std::vector<double> eig_ratio_edge;

    Eigen::VectorXd p;           // per-BS power, watts
    std::vector<double> lambda;  // Nc*Nc*K S-lemma multipliers (folded units)
    std::vector<double> t;       // Nc*Nc*K worst-case ICI powers, watts
    std::vector<double> lambda_edge; // Nc*L
    std::vector<double> eta;         // Nc*L noise-share variables (watts)

    double rel_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    std::string message;

    bool optimal() const { return status == conic::SolveStatus::optimal; }
    bool rank_one(double rank_tol = 1e-6) const;
    double max_eig_ratio() const;
};

} // namespace mcbf::model

#endif
