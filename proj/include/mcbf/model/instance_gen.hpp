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

#ifndef MCBF_MODEL_INSTANCE_GEN_HPP
#define MCBF_MODEL_INSTANCE_GEN_HPP

#include <cstdint>

#include "mcbf/model/types.hpp"

namespace mcbf::model {

/// Multi-cell drop geometry and large-scale fading parameters. Distances in
/// kilometers, gains in dB. The pathloss amplitude at distance d is
/// 10^(-(128.1 + 37.6 log10 d)/20); shadowing is log-normal applied as an
/// amplitude factor 10^(X/20), X ~ N(0, shadow_sigma_db^2); the antenna gain
/// enters as the amplitude factor 10^(gain_dbi/20).
struct GeometryParams {
    double inter_bs_km = 0.5;
    double min_user_km = 0.035;
    double cell_radius_km = 0.25;
    double intra_radius_km = 0.235; // intra-cell region when edge users are placed
    double shadow_sigma_db = 8.0;
    double antenna_gain_dbi = 15.0;
    double pathloss_const_db = 128.1;
    double pathloss_slope_db = 37.6;
    // All large-scale factors forced to one and no positions drawn; only the
    // i.i.d. CN(0,I) small-scale part is generated.
    bool unit_scale = false;
    // Edge users drawn inside the triangle spanned by three BSs, outside the
    // intra-cell disks (requires Nc == 3).
    bool edge_in_triangle = true;
};

struct Instance {
    SystemConfig cfg;
    ChannelSet channels;
    std::vector<Eigen::Vector2d> bs_pos;   // km
    std::vector<Eigen::Vector2d> user_pos; // n*K+k
    std::vector<Eigen::Vector2d> edge_pos; // l
};

double pathloss_amplitude(double d_km, const GeometryParams& geo);

// BS drop: a single BS at the origin, two BSs inter_bs_km apart, or a regular
// polygon with side inter_bs_km for Nc >= 3.
std::vector<Eigen::Vector2d> bs_positions(int Nc, const GeometryParams& geo);

/// Random instance draw; a pure function of (cfg, geo, seed).
Instance generate_instance(const SystemConfig& cfg, const GeometryParams& geo, uint64_t seed);

} // namespace mcbf::model

#endif
