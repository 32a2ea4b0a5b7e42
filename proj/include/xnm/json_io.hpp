#pragma once

#include <json.hpp>

#include "xnm/params.hpp"
#include "xnm/scene.hpp"

namespace xnm::io {

nlohmann::json scene_to_json(const world::Scene& scene);
world::Scene scene_from_json(const nlohmann::json& j);

nlohmann::json world_to_json(const world::WorldConfig& config);
world::WorldConfig world_from_json(const nlohmann::json& j);

nlohmann::json engine_config_to_json(const engine::EngineConfig& config);
engine::EngineConfig engine_config_from_json(const nlohmann::json& j);

}  // namespace xnm::io
