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

#include "mcbf/model/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace mcbf::model {

using nlohmann::json;

namespace {

json cvec_to_json(const Eigen::VectorXcd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back({v[i].real(), v[i].imag()});
    return a;
}

Eigen::VectorXcd cvec_from_json(const json& a) {
    Eigen::VectorXcd v(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = std::complex<double>(a[i][0].get<double>(),
                                                               a[i][1].get<double>());
    return v;
}

json cmat_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXcd cmat_from_json(const json& rows) {
    const size_t nr = rows.size();
    const size_t nc = nr > 0 ? rows[0].size() : 0;
    Eigen::MatrixXcd m(nr, nc);
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::complex<double>(rows[r][c][0].get<double>(), rows[r][c][1].get<double>());
    return m;
}

json rvec_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd rvec_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

json link_error_to_json(const LinkError& l) {
    json j;
    j["exact"] = l.exact;
    if (!l.exact) {
        j["spherical"] = l.spherical;
        if (l.spherical)
            j["radius"] = l.radius;
        else
            j["Q"] = cmat_to_json(l.Q);
    }
    return j;
}

LinkError link_error_from_json(const json& j) {
    LinkError l;
    l.exact = j.at("exact").get<bool>();
    if (!l.exact) {
        l.spherical = j.at("spherical").get<bool>();
        if (l.spherical)
            l.radius = j.at("radius").get<double>();
        else
            l.Q = cmat_from_json(j.at("Q"));
    }
    return l;
}

} // namespace

json instance_to_json(const SystemConfig& cfg, const ChannelSet& ch, const ErrorModel& err) {
    json j;
    j["format"] = "mcbf-instance";
    j["version"] = 1;
    json c;
    c["Nc"] = cfg.Nc;
    c["K"] = cfg.K;
    c["Nt"] = cfg.Nt;
    c["L"] = cfg.L;
    c["gamma"] = rvec_to_json(cfg.gamma);
    c["sigma2"] = rvec_to_json(cfg.sigma2);
    c["alpha"] = rvec_to_json(cfg.alpha);
    c["p_max"] = cfg.p_max;
    if (cfg.L > 0) {
        c["gamma_edge"] = rvec_to_json(cfg.gamma_edge);
        c["sigma2_edge"] = rvec_to_json(cfg.sigma2_edge);
    }
    j["config"] = c;
    json chj;
    chj["hhat"] = json::array();
    for (const auto& v : ch.hhat)
        chj["hhat"].push_back(cvec_to_json(v));
    chj["scale"] = ch.scale;
    chj["ghat"] = json::array();
    for (const auto& v : ch.ghat)
        chj["ghat"].push_back(cvec_to_json(v));
    chj["scale_edge"] = ch.scale_edge;
    j["channels"] = chj;
    json ej;
    ej["links"] = json::array();
    for (const auto& l : err.links)
        ej["links"].push_back(link_error_to_json(l));
    ej["edge_links"] = json::array();
    for (const auto& l : err.edge_links)
        ej["edge_links"].push_back(link_error_to_json(l));
    j["errors"] = ej;
    return j;
}

void instance_from_json(const json& j, SystemConfig& cfg, ChannelSet& ch, ErrorModel& err) {
    if (j.value("format", "") != std::string("mcbf-instance"))
        throw std::invalid_argument("instance_from_json: not an mcbf-instance document");
    const json& c = j.at("config");
    cfg = SystemConfig{};
    cfg.Nc = c.at("Nc").get<int>();
    cfg.K = c.at("K").get<int>();
    cfg.Nt = c.at("Nt").get<int>();
    cfg.L = c.value("L", 0);
    cfg.gamma = rvec_from_json(c.at("gamma"));
    cfg.sigma2 = rvec_from_json(c.at("sigma2"));
    cfg.alpha = rvec_from_json(c.at("alpha"));
    cfg.p_max = c.at("p_max").get<double>();
    if (cfg.L > 0) {
        cfg.gamma_edge = rvec_from_json(c.at("gamma_edge"));
        cfg.sigma2_edge = rvec_from_json(c.at("sigma2_edge"));
    }
    cfg.validate();

    const json& chj = j.at("channels");
    ch = ChannelSet::zeros(cfg.Nc, cfg.K, cfg.Nt, cfg.L);
    for (size_t i = 0; i < chj.at("hhat").size(); ++i)
        ch.hhat[i] = cvec_from_json(chj.at("hhat")[i]);
    ch.scale = chj.at("scale").get<std::vector<double>>();
    for (size_t i = 0; i < chj.at("ghat").size(); ++i)
        ch.ghat[i] = cvec_from_json(chj.at("ghat")[i]);
    ch.scale_edge = chj.at("scale_edge").get<std::vector<double>>();
    ch.validate(cfg);

    const json& ej = j.at("errors");
    err = ErrorModel{};
    err.Nc = cfg.Nc;
    err.K = cfg.K;
    err.Nt = cfg.Nt;
    err.L = cfg.L;
    for (const auto& l : ej.at("links"))
        err.links.push_back(link_error_from_json(l));
    for (const auto& l : ej.at("edge_links"))
        err.edge_links.push_back(link_error_from_json(l));
    err.validate();
}

json solution_to_json(const BeamformerSolution& sol) {
    json j;
    j["format"] = "mcbf-solution";
    j["version"] = 1;
    j["status"] = conic::to_string(sol.status);
    j["objective"] = sol.objective;
    j["p"] = rvec_to_json(sol.p);
    j["W"] = json::array();
    for (const auto& m : sol.W)
        j["W"].push_back(cmat_to_json(m));
    j["w"] = json::array();
    for (const auto& v : sol.w)
        j["w"].push_back(v ? cvec_to_json(*v) : json());
    j["eig_ratio"] = sol.eig_ratio;
    j["F"] = json::array();
    for (const auto& m : sol.F)
        j["F"].push_back(cmat_to_json(m));
    j["f"] = json::array();
    for (const auto& v : sol.f)
        j["f"].push_back(v ? cvec_to_json(*v) : json());
    j["eig_ratio_edge"] = sol.eig_ratio_edge;
    j["lambda"] = sol.lambda;
    j["t"] = sol.t;
    j["lambda_edge"] = sol.lambda_edge;
    j["eta"] = sol.eta;
    json md;
    md["rel_gap"] = sol.rel_gap;
    md["primal_residual"] = sol.primal_residual;
    md["dual_residual"] = sol.dual_residual;
    md["iterations"] = sol.iterations;
    md["message"] = sol.message;
    j["metadata"] = md;
    return j;
}

BeamformerSolution solution_from_json(const json& j) {
    if (j.value("format", "") != std::string("mcbf-solution"))
        throw std::invalid_argument("solution_from_json: not an mcbf-solution document");
    BeamformerSolution sol;
    const std::string st = j.at("status").get<std::string>();
    if (st == "optimal")
        sol.status = conic::SolveStatus::optimal;
    else if (st == "infeasible")
        sol.status = conic::SolveStatus::infeasible;
    else if (st == "unbounded")
        sol.status = conic::SolveStatus::unbounded;
    else
        sol.status = conic::SolveStatus::numerical_failure;
    sol.objective = j.at("objective").get<double>();
    sol.p = rvec_from_json(j.at("p"));
    for (const auto& m : j.at("W"))
        sol.W.push_back(cmat_from_json(m));
    for (const auto& v : j.at("w"))
        sol.w.push_back(v.is_null() ? std::optional<Eigen::VectorXcd>{}
                                    : std::optional<Eigen::VectorXcd>(cvec_from_json(v)));
    sol.eig_ratio = j.at("eig_ratio").get<std::vector<double>>();
    for (const auto& m : j.at("F"))
        sol.F.push_back(cmat_from_json(m));
    for (const auto& v : j.at("f"))
        sol.f.push_back(v.is_null() ? std::optional<Eigen::VectorXcd>{}
                                    : std::optional<Eigen::VectorXcd>(cvec_from_json(v)));
    sol.eig_ratio_edge = j.at("eig_ratio_edge").get<std::vector<double>>();
    sol.lambda = j.at("lambda").get<std::vector<double>>();
    sol.t = j.at("t").get<std::vector<double>>();
    sol.lambda_edge = j.at("lambda_edge").get<std::vector<double>>();
    sol.eta = j.at("eta").get<std::vector<double>>();
    const json& md = j.at("metadata");
    sol.rel_gap = md.at("rel_gap").get<double>();
    sol.primal_residual = md.at("primal_residual").get<double>();
    sol.dual_residual = md.at("dual_residual").get<double>();
    sol.iterations = md.at("iterations").get<int>();
    sol.message = md.at("message").get<std::string>();
    return sol;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open for reading: " + path);
    json j;
    is >> j;
    return j;
}

} // namespace mcbf::model
