#include "xnm/json_io.hpp"

namespace xnm::io {

using nlohmann::json;

json scene_to_json(const world::Scene& scene) {
    json objects = json::array();
    for (const auto& o : scene.objects) {
        objects.push_back({{"id", o.id},
                           {"color", o.color},
                           {"shape", o.shape},
                           {"size", o.size},
                           {"material", o.material},
                           {"x", o.x},
                           {"y", o.y}});
    }
    return json{{"objects", std::move(objects)}};
}

world::Scene scene_from_json(const json& j) {
    world::Scene scene;
    for (const auto& jo : j.at("objects")) {
        world::Object o;
        o.id = jo.at("id").get<int>();
        o.color = jo.at("color").get<std::string>();
        o.shape = jo.at("shape").get<std::string>();
        o.size = jo.at("size").get<std::string>();
        o.material = jo.at("material").get<std::string>();
        o.x = jo.at("x").get<float>();
        o.y = jo.at("y").get<float>();
        scene.objects.push_back(std::move(o));
    }
    return scene;
}

namespace {

std::string palette_to_string(world::Palette p) {
    switch (p) {
        case world::Palette::A: return "A";
        case world::Palette::B: return "B";
        default: return "none";
    }
}

world::Palette palette_from_string(const std::string& s) {
    if (s == "A" || s == "a") return world::Palette::A;
    if (s == "B" || s == "b") return world::Palette::B;
    if (s == "none") return world::Palette::None;
    throw std::invalid_argument("unknown palette: " + s);
}

}  // namespace

json world_to_json(const world::WorldConfig& c) {
    return json{{"colors", c.colors},
                {"shapes", c.shapes},
                {"sizes", c.sizes},
                {"materials", c.materials},
                {"objects_min", c.objects_min},
                {"objects_max", c.objects_max},
                {"coord_min", c.coord_min},
                {"coord_max", c.coord_max},
                {"palette", palette_to_string(c.palette)},
                {"cogent", c.cogent},
                {"seed", c.seed},
                {"corruption",
                 {{"coordinate_jitter_sigma", c.corruption.coordinate_jitter_sigma},
                  {"occlusion_probability", c.corruption.occlusion_probability},
                  {"merge_probability", c.corruption.merge_probability},
                  {"feature_noise_sigma", c.corruption.feature_noise_sigma}}},
                {"det_projection_seed", c.det_projection_seed},
                {"gt_sigmoid", c.gt_sigmoid}};
}

world::WorldConfig world_from_json(const json& j) {
    world::WorldConfig c;
    if (j.contains("colors")) c.colors = j.at("colors").get<std::vector<std::string>>();
    if (j.contains("shapes")) c.shapes = j.at("shapes").get<std::vector<std::string>>();
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::string>>();
    if (j.contains("materials")) c.materials = j.at("materials").get<std::vector<std::string>>();
    if (j.contains("objects_min")) c.objects_min = j.at("objects_min").get<int>();
    if (j.contains("objects_max")) c.objects_max = j.at("objects_max").get<int>();
    if (j.contains("coord_min")) c.coord_min = j.at("coord_min").get<float>();
    if (j.contains("coord_max")) c.coord_max = j.at("coord_max").get<float>();
    if (j.contains("palette")) c.palette = palette_from_string(j.at("palette").get<std::string>());
    if (j.contains("cogent")) c.cogent = j.at("cogent").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("corruption")) {
        const auto& jc = j.at("corruption");
        if (jc.contains("coordinate_jitter_sigma"))
            c.corruption.coordinate_jitter_sigma = jc.at("coordinate_jitter_sigma").get<float>();
        if (jc.contains("occlusion_probability"))
            c.corruption.occlusion_probability = jc.at("occlusion_probability").get<float>();
        if (jc.contains("merge_probability"))
            c.corruption.merge_probability = jc.at("merge_probability").get<float>();
        if (jc.contains("feature_noise_sigma"))
            c.corruption.feature_noise_sigma = jc.at("feature_noise_sigma").get<float>();
    }
    if (j.contains("det_projection_seed"))
        c.det_projection_seed = j.at("det_projection_seed").get<std::uint64_t>();
    if (j.contains("gt_sigmoid")) c.gt_sigmoid = j.at("gt_sigmoid").get<bool>();
    c.validate();
    return c;
}

json engine_config_to_json(const engine::EngineConfig& c) {
    return json{{"setting", engine::setting_to_string(c.setting)},
                {"d", c.d},
                {"k", c.k},
                {"gt_attention",
                 c.gt_attention == engine::GtAttention::Softmax ? "softmax" : "sigmoid"},
                {"describe_mode",
                 c.describe_mode == engine::DescribeMode::FixedGT ? "fixed_gt" : "learned"},
                {"det_node_dim", c.det_node_dim},
                {"det_edge_dim", c.det_edge_dim},
                {"labels", c.labels},
                {"query_tokens", c.query_tokens},
                {"answers", c.answers}};
}

engine::EngineConfig engine_config_from_json(const json& j) {
    engine::EngineConfig c;
    c.setting = engine::setting_from_string(j.at("setting").get<std::string>());
    c.d = j.at("d").get<int>();
    c.k = j.at("k").get<int>();
    c.gt_attention = j.at("gt_attention").get<std::string>() == "sigmoid"
                         ? engine::GtAttention::Sigmoid
                         : engine::GtAttention::Softmax;
    c.describe_mode = j.at("describe_mode").get<std::string>() == "learned"
                          ? engine::DescribeMode::Learned
                          : engine::DescribeMode::FixedGT;
    c.det_node_dim = j.at("det_node_dim").get<int>();
    c.det_edge_dim = j.at("det_edge_dim").get<int>();
    c.labels = j.at("labels").get<std::vector<std::string>>();
    c.query_tokens = j.at("query_tokens").get<std::vector<std::string>>();
    c.answers = j.at("answers").get<std::vector<std::string>>();
    return c;
}

}  // namespace xnm::io
