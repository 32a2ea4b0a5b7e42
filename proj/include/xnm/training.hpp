#pragma once

#include <map>
#include <string>
#include <vector>

#include "xnm/dataset.hpp"
#include "xnm/executor.hpp"
#include "xnm/modules.hpp"

namespace xnm::runtime {

class TrainingDiverged : public std::runtime_error {
public:
    explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct TrainOptions {
    engine::Setting setting = engine::Setting::GT;
    int d = 32;
    int epochs = 0;  // 0 picks the setting default: 5 for GT, 10 for Det
    double fraction = 1.0;
    std::uint64_t seed = 0;
    int batch_size = 128;
    float lr_initial = 1e-3f;
    float lr_after_first_epoch = 1e-4f;

    int effective_epochs() const {
        if (epochs > 0) return epochs;
        return setting == engine::Setting::GT ? 5 : 10;
    }
};

struct Metrics {
    double overall = 0.0;
    int total = 0;
    int correct = 0;
    std::map<std::string, double> per_family;
    std::map<std::string, int> family_counts;
    long parameter_count = 0;
    std::vector<double> loss_curve;

    std::string to_json_string() const;
};

struct TrainedModel {
    engine::Parameters params;
    world::WorldConfig world;
    std::vector<double> loss_curve;   // mean loss per epoch
    std::vector<double> lr_schedule;  // lr per epoch
    int epochs = 0;
    std::uint64_t seed = 0;
};

/// Cross-entropy between answer logits and a vocabulary answer.
ad::TensorPtr answer_loss(ad::Tape& tape, const ad::TensorPtr& logits, const std::string& answer,
                          const engine::EngineConfig& config);

/// Mini-batch Adam over per-example tapes, lr 1e-3 dropping to 1e-4 after
/// the first epoch. `fraction` shrinks the pool of distinct training
/// questions while keeping the optimization budget (steps per epoch) fixed.
TrainedModel train(const Dataset& data, const SceneTable& scenes,
                   const world::WorldConfig& world, const TrainOptions& options);

/// Argmax accuracy with a per-family breakdown. Items are independent, so
/// evaluation may fan out over threads; results do not depend on the count.
Metrics evaluate(const engine::Parameters& params, const Dataset& data, const GraphStore& graphs,
                 int threads = 1);

struct CogentResult {
    Metrics gt_a, gt_b;
    Metrics det_a, det_b;
};

/// Condition-A training, condition-A and condition-B evaluation, in both
/// the GT and Det settings.
CogentResult run_cogent(const world::WorldConfig& base, const std::string& out_dir,
                        const GenOptions& gen_options, const TrainOptions& gt_options,
                        const TrainOptions& det_options);

}  // namespace xnm::runtime
