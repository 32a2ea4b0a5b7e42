#include "xnm/checkpoint.hpp"

#include <fstream>

#include "xnm/json_io.hpp"

namespace xnm::runtime {

using nlohmann::json;

void save_checkpoint(const std::string& path, const TrainedModel& model) {
    json params = json::object();
    for (const auto& [name, tensor] : model.params.trainable) {
        params[name] = {{"shape", tensor->shape}, {"data", tensor->data}};
    }
    json doc{{"version", 1},
             {"config",
              {{"engine", io::engine_config_to_json(model.params.config)},
               {"world", io::world_to_json(model.world)}}},
             {"params", std::move(params)},
             {"meta",
              {{"epoch", model.epochs},
               {"seed", model.seed},
               {"loss_curve", model.loss_curve},
               {"lr_schedule", model.lr_schedule}}}};
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << doc.dump() << '\n';
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        if (doc.at("version").get<int>() != 1) {
            throw DataError(path + ": unsupported checkpoint version");
        }
        LoadedCheckpoint loaded;
        loaded.world = io::world_from_json(doc.at("config").at("world"));
        const auto config = io::engine_config_from_json(doc.at("config").at("engine"));

        std::mt19937 rng(0);  // values are overwritten below
        loaded.params = engine::Parameters::init(config, rng);
        const auto& params = doc.at("params");
        for (auto& [name, tensor] : loaded.params.trainable) {
            if (!params.contains(name)) throw DataError(path + ": missing parameter " + name);
            const auto& jt = params.at(name);
            const auto shape = jt.at("shape").get<std::vector<int>>();
            if (shape != tensor->shape) {
                throw DataError(path + ": shape mismatch for parameter " + name);
            }
            const auto data = jt.at("data").get<std::vector<float>>();
            if (data.size() != tensor->data.size()) {
                throw DataError(path + ": data size mismatch for parameter " + name);
            }
            tensor->data = data;
        }

        const auto& meta = doc.at("meta");
        loaded.epoch = meta.at("epoch").get<int>();
        loaded.seed = meta.at("seed").get<std::uint64_t>();
        if (meta.contains("loss_curve"))
            loaded.loss_curve = meta.at("loss_curve").get<std::vector<double>>();
        if (meta.contains("lr_schedule"))
            loaded.lr_schedule = meta.at("lr_schedule").get<std::vector<double>>();
        return loaded;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace xnm::runtime
