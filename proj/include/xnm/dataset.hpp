#pragma once

#include <string>
#include <vector>

#include "xnm/generator.hpp"
#include "xnm/params.hpp"
#include "xnm/scene.hpp"
#include "xnm/scene_graph.hpp"

namespace xnm::runtime {

/// File or format problem in a dataset directory.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct QuestionRecord {
    int scene_id = 0;
    std::string program;
    std::string family;
    std::string answer;
};

struct Dataset {
    std::vector<QuestionRecord> records;

    std::size_t size() const { return records.size(); }
};

struct SceneTable {
    std::vector<world::Scene> scenes;  // index == scene_id

    const world::Scene& at(int scene_id) const;
    int size() const { return static_cast<int>(scenes.size()); }
};

world::Scene read_scene_file(const std::string& path);
void write_scene_file(const std::string& path, const world::Scene& scene);

SceneTable read_scenes_jsonl(const std::string& path);
void write_scenes_jsonl(const std::string& path, const SceneTable& table);
Dataset read_questions_jsonl(const std::string& path);
void write_questions_jsonl(const std::string& path, const Dataset& dataset);

world::WorldConfig read_world_config(const std::string& path);
void write_world_config(const std::string& path, const world::WorldConfig& config);

struct GenOptions {
    int scenes = 2000;
    int questions_per_scene = 10;
    double val_fraction = 0.1;
};

/// Writes scenes.jsonl, train.jsonl, val.jsonl and meta.json into out_dir.
/// CoGenT configs additionally write valA.jsonl / valB.jsonl (train and
/// valA under condition A, valB under condition B).
void generate_dataset(const world::WorldConfig& config, const std::string& out_dir,
                      const GenOptions& options);

/// Scene graphs per scene_id, prebuilt for one setting. Det graphs (and any
/// configured corruption) are derived deterministically per scene from the
/// world seed.
struct GraphStore {
    std::vector<world::SceneGraph> graphs;

    const world::SceneGraph& at(int scene_id) const;

    static GraphStore build(const SceneTable& scenes, const world::WorldConfig& world,
                            engine::Setting setting, const ad::TensorPtr& gt_embedding,
                            const world::LabelDictionary& dict);
};

}  // namespace xnm::runtime
