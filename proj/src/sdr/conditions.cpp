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

#include "mcbf/sdr/conditions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcbf::sdr {

using model::ErrorModel;
using model::SystemConfig;

Prop1Report check_prop1(const SystemConfig& cfg, const ErrorModel& err,
                        const model::BeamformerSolution& sol) {
    if (!sol.optimal())
        throw std::invalid_argument("check_prop1: solution must be optimal");
    Prop1Report rep;
    rep.c1 = (cfg.K == 1 && cfg.L == 0);
    rep.c2 = err.all_intra_exact();

    std::ostringstream det;
    const double fstar = sol.objective;
    if (err.all_spherical() && fstar > 0.0) {
        bool ok = true;
        double margin = std::numeric_limits<double>::infinity();
        for (int n = 0; n < cfg.Nc; ++n)
            for (int k = 0; k < cfg.K; ++k) {
                const auto& le = err.link(n, n, k);
                const double radius = le.exact ? 0.0 : le.radius;
                const double bound = std::sqrt(cfg.sigma2[cfg.nk(n, k)] * cfg.alpha[n] *
                                               cfg.gamma[cfg.nk(n, k)] / fstar);
                margin = std::min(margin, bound - radius);
                if (!(radius < bound))
                    ok = false;
            }
        rep.c3 = ok && cfg.K > 0;
        rep.c3_margin = margin;
        det << "C3 intra-radius margin " << margin
            << "; cross-link radii feasibility-witnessed by the solved instance. ";
        if (cfg.L > 0) {
            bool eok = true;
            for (int n = 0; n < cfg.Nc; ++n) {
                for (int k = 0; k < cfg.K; ++k) {
                    const auto& le = err.link(n, n, k);
                    const double radius = le.exact ? 0.0 : le.radius;
                    const double bound = std::sqrt(cfg.alpha[n] * cfg.gamma[cfg.nk(n, k)] *
                                                   cfg.sigma2[cfg.nk(n, k)] / fstar);
                    if (!(radius < bound))
                        eok = false;
                }
                for (int l = 0; l < cfg.L; ++l) {
                    const auto& le = err.edge_link(n, l);
                    const double radius = le.exact ? 0.0 : le.radius;
                    const double bound = std::sqrt(cfg.alpha[n] * cfg.gamma_edge[l] *
                                                   cfg.sigma2_edge[l] / fstar);
                    if (!(radius < bound))
                        eok = false;
                }
            }
            rep.edge_condition = eok;
            det << "Edge tightness condition " << (eok ? "holds" : "fails") << ". ";
        }
    } else {
        det << "C3 not evaluated (non-spherical error model). ";
    }
    rep.details = det.str();
    return rep;
}

} // namespace mcbf::sdr
