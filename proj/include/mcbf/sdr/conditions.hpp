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

#ifndef MCBF_SDR_CONDITIONS_HPP
#define MCBF_SDR_CONDITIONS_HPP

#include <string>

#include "mcbf/model/types.hpp"

namespace mcbf::sdr {

/// Sufficient conditions under which the relaxation provably returns
/// rank-one beamformers, evaluated on a solved instance:
///   C1: single user per cell;
///   C2: perfect intra-cell CSI (all intra links exact);
///   C3: spherical errors with intra-cell radii below
///       sqrt(sigma2_nk * alpha_n * gamma_nk / f*). The companion clause
///       "radii small enough for feasibility" is witnessed by the solved
///       instance itself and reported as such.
/// For configurations with edge users, the analogous tightness condition is
/// evaluated with the edge objective value.
struct Prop1Report {
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    bool edge_condition = false; // only meaningful when L > 0
    bool any() const { return c1 || c2 || c3; }
    double c3_margin = 0.0; // min over (n,k) of bound - radius (spherical only)
    std::string details;
};

Prop1Report check_prop1(const model::SystemConfig& cfg, const model::ErrorModel& err,
                        const model::BeamformerSolution& sol);

} // namespace mcbf::sdr

#endif
