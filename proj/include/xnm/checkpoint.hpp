#pragma once

#include <string>

#include "xnm/training.hpp"

namespace xnm::runtime {

/// Single JSON document: {version, config, params:{name:{shape,data}},
/// meta:{epoch,seed,...}}. Reload reproduces bitwise-identical evaluation
/// on the same platform.
void save_checkpoint(const std::string& path, const TrainedModel& model);

struct LoadedCheckpoint {
    engine::Parameters params;
    world::WorldConfig world;
    int epoch = 0;
    std::uint64_t seed = 0;
    std::vector<double> loss_curve;
    std::vector<double> lr_schedule;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace xnm::runtime
