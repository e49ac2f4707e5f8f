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

#ifndef MCBF_MODEL_SERIALIZE_HPP
#define MCBF_MODEL_SERIALIZE_HPP

#include <json.hpp>
#include <string>

#include "mcbf/model/types.hpp"

namespace mcbf::model {

// JSON interchange format: complex vectors/matrices as nested [re, im]
// pairs. This is the unit all tools and modules exchange instances and
// solutions in.

nlohmann::json instance_to_json(const SystemConfig& cfg, const ChannelSet& ch,
                                const ErrorModel& err);
void instance_from_json(const nlohmann::json& j, SystemConfig& cfg, ChannelSet& ch,
                        ErrorModel& err);

nlohmann::json solution_to_json(const BeamformerSolution& sol);
BeamformerSolution solution_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

} // namespace mcbf::model

#endif
