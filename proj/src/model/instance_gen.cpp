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

#include "mcbf/model/instance_gen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mcbf::model {

double pathloss_amplitude(double d_km, const GeometryParams& geo) {
    if (d_km <= 0.0)
        throw std::invalid_argument("pathloss_amplitude: distance must be positive");
    return std::pow(10.0, -(geo.pathloss_const_db + geo.pathloss_slope_db * std::log10(d_km)) /
                              20.0);
}

std::vector<Eigen::Vector2d> bs_positions(int Nc, const GeometryParams& geo) {
    std::vector<Eigen::Vector2d> pos;
    if (Nc == 1) {
        pos.emplace_back(0.0, 0.0);
    } else if (Nc == 2) {
        pos.emplace_back(0.0, 0.0);
        pos.emplace_back(geo.inter_bs_km, 0.0);
    } else {
        // regular polygon with side length inter_bs_km
        const double R = 0.5 * geo.inter_bs_km / std::sin(std::numbers::pi / Nc);
        for (int n = 0; n < Nc; ++n) {
            const double a = 2.0 * std::numbers::pi * n / Nc;
            pos.emplace_back(R * std::cos(a), R * std::sin(a));
        }
    }
    return pos;
}

namespace {

Eigen::Vector2d draw_in_annulus(const Eigen::Vector2d& center, double rmin, double rmax,
                                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double a = 2.0 * std::numbers::pi * uni(rng);
    const double r = std::sqrt(uni(rng) * (rmax * rmax - rmin * rmin) + rmin * rmin);
    return center + r * Eigen::Vector2d(std::cos(a), std::sin(a));
}

// uniform point in the triangle spanned by the three BS positions, rejecting
// the intra-cell disks
Eigen::Vector2d draw_edge_point(const std::vector<Eigen::Vector2d>& bs, double intra_radius,
                                double min_dist, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int tries = 0; tries < 100000; ++tries) {
        double u = uni(rng), v = uni(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Eigen::Vector2d p = bs[0] + u * (bs[1] - bs[0]) + v * (bs[2] - bs[0]);
        bool ok = true;
        for (const auto& b : bs)
            if ((p - b).norm() < std::max(intra_radius, min_dist))
                ok = false;
        if (ok)
            return p;
    }
    throw std::runtime_error("generate_instance: edge-region sampling failed");
}

} // namespace

Instance generate_instance(const SystemConfig& cfg, const GeometryParams& geo, uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;

    Instance inst;
    inst.cfg = cfg;
    inst.channels = ChannelSet::zeros(cfg.Nc, cfg.K, cfg.Nt, cfg.L);

    auto draw_cn = [&](int nt) {
        Eigen::VectorXcd v(nt);
        for (int i = 0; i < nt; ++i) {
            const double re = gauss(rng) * inv_sqrt2;
            const double im = gauss(rng) * inv_sqrt2;
            v[i] = std::complex<double>(re, im);
        }
        return v;
    };

    if (geo.unit_scale) {
        for (auto& s : inst.channels.scale)
            s = 1.0;
        for (auto& s : inst.channels.scale_edge)
            s = 1.0;
        for (int m = 0; m < cfg.Nc; ++m)
            for (int n = 0; n < cfg.Nc; ++n)
                for (int k = 0; k < cfg.K; ++k)
                    inst.channels.hhat[static_cast<size_t>(cfg.link(m, n, k))] = draw_cn(cfg.Nt);
        for (int m = 0; m < cfg.Nc; ++m)
            for (int l = 0; l < cfg.L; ++l)
                inst.channels.ghat[static_cast<size_t>(cfg.elink(m, l))] = draw_cn(cfg.Nt);
        return inst;
    }

    if (geo.min_user_km <= 0.0 || geo.inter_bs_km <= 0.0 || geo.cell_radius_km <= geo.min_user_km)
        throw std::invalid_argument("generate_instance: inconsistent geometry distances");
    if (cfg.L > 0 && geo.edge_in_triangle && cfg.Nc != 3)
        throw std::invalid_argument("generate_instance: triangle edge placement needs Nc == 3");

    inst.bs_pos = bs_positions(cfg.Nc, geo);

    // draw order is fixed: user positions, edge positions, then per-link
    // shadowing and small-scale CSI in (m,n,k) order, then edge links
    const double user_rmax = (cfg.L > 0 && geo.edge_in_triangle) ? geo.intra_radius_km
                                                                 : geo.cell_radius_km;
    for (int n = 0; n < cfg.Nc; ++n)
        for (int k = 0; k < cfg.K; ++k)
            inst.user_pos.push_back(
                draw_in_annulus(inst.bs_pos[static_cast<size_t>(n)], geo.min_user_km, user_rmax, rng));
    for (int l = 0; l < cfg.L; ++l) {
        if (geo.edge_in_triangle)
            inst.edge_pos.push_back(
                draw_edge_point(inst.bs_pos, geo.intra_radius_km, geo.min_user_km, rng));
        else
            inst.edge_pos.push_back(draw_in_annulus(inst.bs_pos[static_cast<size_t>(l % cfg.Nc)],
                                                    geo.min_user_km, geo.cell_radius_km, rng));
    }

    const double gain_amp = std::pow(10.0, geo.antenna_gain_dbi / 20.0);
    auto large_scale = [&](double d_km) {
        const double shadow_amp = std::pow(10.0, gauss(rng) * geo.shadow_sigma_db / 20.0);
        return pathloss_amplitude(d_km, geo) * shadow_amp * gain_amp;
    };

    for (int m = 0; m < cfg.Nc; ++m)
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k) {
                const double d =
                    (inst.user_pos[static_cast<size_t>(cfg.nk(n, k))] - inst.bs_pos[static_cast<size_t>(m)])
                        .norm();
                const size_t idx = static_cast<size_t>(cfg.link(m, n, k));
                inst.channels.scale[idx] = large_scale(d);
                inst.channels.hhat[idx] = draw_cn(cfg.Nt);
            }
    for (int m = 0; m < cfg.Nc; ++m)
        for (int l = 0; l < cfg.L; ++l) {
            const double d =
                (inst.edge_pos[static_cast<size_t>(l)] - inst.bs_pos[static_cast<size_t>(m)]).norm();
            const size_t idx = static_cast<size_t>(cfg.elink(m, l));
            inst.channels.scale_edge[idx] = large_scale(d);
            inst.channels.ghat[idx] = draw_cn(cfg.Nt);
        }
    return inst;
}

} // namespace mcbf::model
