#include "xnm/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "xnm/adam.hpp"
#include "xnm/json_io.hpp"

namespace xnm::runtime {

ad::TensorPtr answer_loss(ad::Tape& tape, const ad::TensorPtr& logits, const std::string& answer,
                          const engine::EngineConfig& config) {
    return tape.cross_entropy(logits, config.answer_index(answer));
}

std::string Metrics::to_json_string() const {
    nlohmann::json j{{"overall", overall},
                     {"total", total},
                     {"correct", correct},
                     {"per_family", per_family},
                     {"family_counts", family_counts},
                     {"parameter_count", parameter_count},
                     {"loss_curve", loss_curve}};
    return j.dump(2);
}

namespace {

struct PreparedData {
    std::vector<dsl::Program> programs;
    std::vector<int> answer_idx;
};

PreparedData prepare(const Dataset& data, const engine::EngineConfig& config) {
    PreparedData prepared;
    prepared.programs.reserve(data.size());
    prepared.answer_idx.reserve(data.size());
    for (const auto& rec : data.records) {
        prepared.programs.push_back(dsl::parse(rec.program));
        prepared.answer_idx.push_back(config.answer_index(rec.answer));
    }
    return prepared;
}

/// Reshuffling stream over a fixed index pool.
class BatchStream {
public:
    BatchStream(std::vector<int> pool, std::uint64_t seed)
        : pool_(std::move(pool)), rng_(static_cast<std::uint32_t>(seed)) {
        reshuffle();
    }

    int next() {
        if (cursor_ == pool_.size()) reshuffle();
        return pool_[cursor_++];
    }

private:
    void reshuffle() {
        std::shuffle(pool_.begin(), pool_.end(), rng_);
        cursor_ = 0;
    }

    std::vector<int> pool_;
    std::mt19937 rng_;
    std::size_t cursor_ = 0;
};

}  // namespace

TrainedModel train(const Dataset& data, const SceneTable& scenes,
                   const world::WorldConfig& world, const TrainOptions& options) {
    if (data.records.empty()) throw DataError("train: empty dataset");

    engine::EngineConfig config =
        engine::EngineConfig::for_world(world, options.setting, options.d);
    if (world.gt_sigmoid && options.setting == engine::Setting::GT) {
        config.gt_attention = engine::GtAttention::Sigmoid;
    }

    std::mt19937 init_rng(static_cast<std::uint32_t>(options.seed) ^ 0x5eedu);
    engine::Parameters params = engine::Parameters::init(config, init_rng);
    GraphStore graphs =
        GraphStore::build(scenes, world, options.setting, params.label_embedding, params.dict);
    PreparedData prepared = prepare(data, config);

    // the optimization budget stays tied to the full dataset size; the
    // fraction knob only shrinks the pool of distinct questions
    const int n_full = static_cast<int>(data.size());
    const int pool_size = std::max(1, static_cast<int>(std::lround(options.fraction * n_full)));
    std::vector<int> pool(static_cast<std::size_t>(n_full));
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937 pool_rng(static_cast<std::uint32_t>(options.seed) ^ 0xf00du);
    std::shuffle(pool.begin(), pool.end(), pool_rng);
    pool.resize(static_cast<std::size_t>(pool_size));
    BatchStream stream(std::move(pool), options.seed + 17);

    ad::Adam adam(options.lr_initial);
    for (const auto& [name, tensor] : params.trainable) adam.add_parameter(tensor);

    const int epochs = options.effective_epochs();
    const int steps_per_epoch = (n_full + options.batch_size - 1) / options.batch_size;

    TrainedModel model;
    model.world = world;
    model.epochs = epochs;
    model.seed = options.seed;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const float lr = epoch == 0 ? options.lr_initial : options.lr_after_first_epoch;
        adam.set_lr(lr);
        model.lr_schedule.push_back(lr);
        double epoch_loss = 0.0;
        for (int step = 0; step < steps_per_epoch; ++step) {
            double batch_loss = 0.0;
            for (int b = 0; b < options.batch_size; ++b) {
                const int idx = stream.next();
                const auto& rec = data.records[static_cast<std::size_t>(idx)];
                ad::Tape tape;
                auto result = execute(tape, prepared.programs[static_cast<std::size_t>(idx)],
                                      graphs.at(rec.scene_id), params, /*want_trace=*/false);
                auto loss =
                    tape.cross_entropy(result.logits,
                                       prepared.answer_idx[static_cast<std::size_t>(idx)]);
                batch_loss += loss->data[0];
                tape.backward(loss, 1.0f / static_cast<float>(options.batch_size));
            }
            batch_loss /= options.batch_size;
            if (!std::isfinite(batch_loss)) {
                throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                       ", step " + std::to_string(step + 1));
            }
            adam.step();
            epoch_loss += batch_loss;
        }
        model.loss_curve.push_back(epoch_loss / steps_per_epoch);
    }

    model.params = std::move(params);
    return model;
}

Metrics evaluate(const engine::Parameters& params, const Dataset& data, const GraphStore& graphs,
                 int threads) {
    PreparedData prepared = prepare(data, params.config);
    const int n = static_cast<int>(data.size());
    std::vector<char> correct(static_cast<std::size_t>(n), 0);

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const auto& rec = data.records[static_cast<std::size_t>(i)];
            ad::Tape tape;
            tape.grad_enabled = false;
            auto result = execute(tape, prepared.programs[static_cast<std::size_t>(i)],
                                  graphs.at(rec.scene_id), params, /*want_trace=*/false);
            const auto& logits = result.logits->data;
            int best = 0;
            for (std::size_t k = 1; k < logits.size(); ++k)
                if (logits[k] > logits[best]) best = static_cast<int>(k);
            correct[static_cast<std::size_t>(i)] =
                best == prepared.answer_idx[static_cast<std::size_t>(i)];
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        worker(0, n);
    } else {
        std::vector<std::thread> ts;
        const int chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(n, begin + chunk);
            if (begin < end) ts.emplace_back(worker, begin, end);
        }
        for (auto& t : ts) t.join();
    }

    Metrics m;
    m.total = n;
    m.parameter_count = params.parameter_count();
    std::map<std::string, int> family_correct;
    for (int i = 0; i < n; ++i) {
        const auto& fam = data.records[static_cast<std::size_t>(i)].family;
        m.family_counts[fam] += 1;
        if (correct[static_cast<std::size_t>(i)]) {
            m.correct += 1;
            family_correct[fam] += 1;
        }
    }
    m.overall = n > 0 ? static_cast<double>(m.correct) / n : 0.0;
    for (const auto& [fam, cnt] : m.family_counts) {
        m.per_family[fam] = static_cast<double>(family_correct[fam]) / cnt;
    }
    return m;
}

CogentResult run_cogent(const world::WorldConfig& base, const std::string& out_dir,
                        const GenOptions& gen_options, const TrainOptions& gt_options,
                        const TrainOptions& det_options) {
    world::WorldConfig config = base;
    config.cogent = true;
    generate_dataset(config, out_dir, gen_options);

    const SceneTable scenes = read_scenes_jsonl(out_dir + "/scenes.jsonl");
    const Dataset train_data = read_questions_jsonl(out_dir + "/train.jsonl");
    const Dataset val_a = read_questions_jsonl(out_dir + "/valA.jsonl");
    const Dataset val_b = read_questions_jsonl(out_dir + "/valB.jsonl");

    CogentResult result;
    {
        TrainOptions opts = gt_options;
        opts.setting = engine::Setting::GT;
        TrainedModel model = train(train_data, scenes, config, opts);
        GraphStore graphs = GraphStore::build(scenes, config, engine::Setting::GT,
                                              model.params.label_embedding, model.params.dict);
        result.gt_a = evaluate(model.params, val_a, graphs);
        result.gt_b = evaluate(model.params, val_b, graphs);
    }
    {
        TrainOptions opts = det_options;
        opts.setting = engine::Setting::Det;
        TrainedModel model = train(train_data, scenes, config, opts);
        GraphStore graphs = GraphStore::build(scenes, config, engine::Setting::Det,
                                              model.params.label_embedding, model.params.dict);
        result.det_a = evaluate(model.params, val_a, graphs);
        result.det_b = evaluate(model.params, val_b, graphs);
    }
    return result;
}

}  // namespace xnm::runtime
