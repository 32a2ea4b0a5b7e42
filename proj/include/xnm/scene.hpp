#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

namespace xnm::world {

inline constexpr std::array<const char*, 4> kCategories = {"color", "shape", "size", "material"};
inline constexpr std::array<const char*, 4> kRelations = {"left", "right", "front", "behind"};

struct Object {
    int id = 0;
    std::string color;
    std::string shape;
    std::string size;
    std::string material;
    float x = 0.0f;
    float y = 0.0f;

    const std::string& attribute(int category) const;
    bool same_attributes(const Object& other) const;
};

struct Scene {
    std::vector<Object> objects;
};

/// Appendix-style detection failures, applied as scene operators.
struct CorruptionSpec {
    float coordinate_jitter_sigma = 0.0f;
    float occlusion_probability = 0.0f;
    float merge_probability = 0.0f;
    float feature_noise_sigma = 0.0f;  // Det features only

    bool is_zero() const;
    void validate() const;
};

enum class Palette { None, A, B };

struct WorldConfig {
    std::vector<std::string> colors = {"gray", "red",    "blue", "green",
                                       "brown", "purple", "cyan", "yellow"};
    std::vector<std::string> shapes = {"cube", "sphere", "cylinder"};
    std::vector<std::string> sizes = {"large", "small"};
    std::vector<std::string> materials = {"rubber", "metal"};
    int objects_min = 3;
    int objects_max = 6;
    float coord_min = 0.0f;
    float coord_max = 8.0f;
    Palette palette = Palette::None;
    bool cogent = false;
    std::uint64_t seed = 0;
    CorruptionSpec corruption;
    std::uint64_t det_projection_seed = 1234;
    bool gt_sigmoid = false;  // appendix GT attention variant

    void validate() const;
    const std::vector<std::string>& category_values(int category) const;
    /// All attribute values in fixed category order, then the four relations.
    std::vector<std::string> label_vocabulary() const;
    std::vector<std::string> attribute_values() const;
    int max_objects() const { return objects_max; }

    WorldConfig with_palette(Palette p) const;
};

/// Colors condition A allows on cubes (and condition B on cylinders).
const std::vector<std::string>& palette_group_one();
/// Colors condition A allows on cylinders (and condition B on cubes).
const std::vector<std::string>& palette_group_two();

Scene sample_scene(const WorldConfig& config, std::mt19937& rng);

/// Directed relation sets: entry (i,j) lists every relation r such that
/// object j stands in relation r to object i.
struct RelationMap {
    int n = 0;
    std::vector<std::vector<std::string>> rel;  // indexed i*n + j

    const std::vector<std::string>& at(int i, int j) const { return rel[i * n + j]; }
};

RelationMap spatial_relations(const Scene& scene);

Scene corrupt(const Scene& scene, const CorruptionSpec& spec, std::mt19937& rng);

}  // namespace xnm::world
