#include "xnm/dataset.hpp"

#include <filesystem>
#include <fstream>

#include "xnm/json_io.hpp"

namespace xnm::runtime {

using nlohmann::json;

const world::Scene& SceneTable::at(int scene_id) const {
    if (scene_id < 0 || scene_id >= size()) {
        throw DataError("unknown scene_id " + std::to_string(scene_id));
    }
    return scenes[static_cast<std::size_t>(scene_id)];
}

namespace {

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

}  // namespace

world::Scene read_scene_file(const std::string& path) {
    return io::scene_from_json(parse_json_file(path));
}

void write_scene_file(const std::string& path, const world::Scene& scene) {
    auto out = open_out(path);
    out << io::scene_to_json(scene).dump() << '\n';
}

SceneTable read_scenes_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    SceneTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        const int id = j.at("scene_id").get<int>();
        if (id != table.size()) {
            throw DataError(path + ": scene ids must be contiguous from 0");
        }
        table.scenes.push_back(io::scene_from_json(j));
    }
    return table;
}

void write_scenes_jsonl(const std::string& path, const SceneTable& table) {
    auto out = open_out(path);
    for (int id = 0; id < table.size(); ++id) {
        json j = io::scene_to_json(table.scenes[static_cast<std::size_t>(id)]);
        j["scene_id"] = id;
        out << j.dump() << '\n';
    }
}

Dataset read_questions_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    Dataset dataset;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            QuestionRecord rec;
            rec.scene_id = j.at("scene_id").get<int>();
            rec.program = j.at("program").get<std::string>();
            rec.family = j.at("family").get<std::string>();
            rec.answer = j.at("answer").get<std::string>();
            dataset.records.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return dataset;
}

void write_questions_jsonl(const std::string& path, const Dataset& dataset) {
    auto out = open_out(path);
    for (const auto& rec : dataset.records) {
        out << json{{"scene_id", rec.scene_id},
                    {"program", rec.program},
                    {"family", rec.family},
                    {"answer", rec.answer}}
                   .dump()
            << '\n';
    }
}

world::WorldConfig read_world_config(const std::string& path) {
    try {
        return io::world_from_json(parse_json_file(path));
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_world_config(const std::string& path, const world::WorldConfig& config) {
    auto out = open_out(path);
    out << io::world_to_json(config).dump(2) << '\n';
}

namespace {

std::mt19937 scene_rng(std::uint64_t base_seed, int scene_id, std::uint32_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                      static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(scene_id), salt};
    return std::mt19937(seq);
}

/// Questions for one scene, family-balanced, re-rolled until the dataset
/// balance tracker is satisfied (or 60 tries pass).
void scene_questions(const world::Scene& scene, int scene_id, int per_scene,
                     const world::WorldConfig& config, std::mt19937& rng,
                     dsl::BalanceTracker& tracker, Dataset& out) {
    for (int q = 0; q < per_scene; ++q) {
        const dsl::Family family = dsl::kFamilies[q % dsl::kFamilies.size()];
        dsl::GeneratedQuestion accepted;
        bool have = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            auto candidate = dsl::generate(scene, family, config, rng);
            if (tracker.accept(family, candidate.answer)) {
                accepted = std::move(candidate);
                have = true;
                break;
            }
            if (attempt == 59) {
                accepted = std::move(candidate);
                have = true;
            }
        }
        if (!have) throw DataError("question generation failed");
        // re-verify the advertised answer against the oracle
        if (dsl::oracle(accepted.program, scene) != accepted.answer) {
            throw DataError("generated answer disagrees with the oracle");
        }
        tracker.add(family, accepted.answer);
        out.records.push_back({scene_id, dsl::print(accepted.program),
                               dsl::family_name(family), accepted.answer});
    }
}

struct SplitSpec {
    std::string name;
    world::Palette palette;
    int scenes;
};

}  // namespace

void generate_dataset(const world::WorldConfig& config, const std::string& out_dir,
                      const GenOptions& options) {
    config.validate();
    if (config.objects_max > 10) {
        throw DataError("objects_max above 10 exceeds the closed answer vocabulary");
    }
    std::filesystem::create_directories(out_dir);

    const int n_val = std::max(1, static_cast<int>(options.scenes * options.val_fraction));
    const int n_train = options.scenes - n_val;
    if (n_train < 1) throw DataError("not enough scenes for a train split");

    std::vector<SplitSpec> splits;
    if (config.cogent) {
        splits = {{"train", world::Palette::A, n_train},
                  {"valA", world::Palette::A, n_val},
                  {"valB", world::Palette::B, n_val}};
    } else {
        splits = {{"train", config.palette, n_train}, {"val", config.palette, n_val}};
    }

    SceneTable all_scenes;
    std::mt19937 scene_sampler(static_cast<std::uint32_t>(config.seed));
    std::mt19937 question_rng(static_cast<std::uint32_t>(config.seed) + 0x9e3779b9u);

    for (const auto& split : splits) {
        Dataset questions;
        dsl::BalanceTracker tracker;
        const world::WorldConfig split_config = config.with_palette(split.palette);
        for (int s = 0; s < split.scenes; ++s) {
            const int scene_id = all_scenes.size();
            world::Scene scene;
            for (int retry = 0;; ++retry) {
                scene = world::sample_scene(split_config, scene_sampler);
                try {
                    scene_questions(scene, scene_id, options.questions_per_scene, split_config,
                                    question_rng, tracker, questions);
                    break;
                } catch (const dsl::TemplateExhausted&) {
                    if (retry >= 10) throw;
                    // drop any partial rows for this scene and resample it
                    while (!questions.records.empty() &&
                           questions.records.back().scene_id == scene_id) {
                        questions.records.pop_back();
                    }
                }
            }
            all_scenes.scenes.push_back(std::move(scene));
        }
        write_questions_jsonl(out_dir + "/" + split.name + ".jsonl", questions);
        if (config.cogent && split.name == "valA") {
            write_questions_jsonl(out_dir + "/val.jsonl", questions);
        }
    }

    write_scenes_jsonl(out_dir + "/scenes.jsonl", all_scenes);

    json meta{{"world", io::world_to_json(config)},
              {"scenes", options.scenes},
              {"questions_per_scene", options.questions_per_scene},
              {"val_fraction", options.val_fraction}};
    auto out = open_out(out_dir + "/meta.json");
    out << meta.dump(2) << '\n';
}

const world::SceneGraph& GraphStore::at(int scene_id) const {
    if (scene_id < 0 || scene_id >= static_cast<int>(graphs.size())) {
        throw DataError("no graph for scene_id " + std::to_string(scene_id));
    }
    return graphs[static_cast<std::size_t>(scene_id)];
}

GraphStore GraphStore::build(const SceneTable& scenes, const world::WorldConfig& world,
                             engine::Setting setting, const ad::TensorPtr& gt_embedding,
                             const world::LabelDictionary& dict) {
    GraphStore store;
    store.graphs.reserve(scenes.scenes.size());
    const bool corrupted = !world.corruption.is_zero();
    world::DetProjection projection;
    if (setting == engine::Setting::Det) {
        projection = world::DetProjection::build(world, world.det_projection_seed);
    }
    for (int id = 0; id < scenes.size(); ++id) {
        auto rng = scene_rng(world.seed, id, 0xd47au);
        const world::Scene* scene = &scenes.scenes[static_cast<std::size_t>(id)];
        world::Scene corrupted_scene;
        if (corrupted) {
            corrupted_scene = world::corrupt(*scene, world.corruption, rng);
            scene = &corrupted_scene;
        }
        if (setting == engine::Setting::GT) {
            store.graphs.push_back(world::build_gt_graph(*scene, gt_embedding, dict));
        } else {
            store.graphs.push_back(
                world::build_det_graph(*scene, world, world.corruption, projection, rng));
        }
    }
    return store;
}

}  // namespace xnm::runtime
