#include "xnm/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xnm::world {

const std::string& Object::attribute(int category) const {
    switch (category) {
        case 0: return color;
        case 1: return shape;
        case 2: return size;
        case 3: return material;
        default: throw std::invalid_argument("attribute: bad category index");
    }
}

bool Object::same_attributes(const Object& other) const {
    return color == other.color && shape == other.shape && size == other.size &&
           material == other.material;
}

bool CorruptionSpec::is_zero() const {
    return coordinate_jitter_sigma == 0.0f && occlusion_probability == 0.0f &&
           merge_probability == 0.0f && feature_noise_sigma == 0.0f;
}

void CorruptionSpec::validate() const {
    if (occlusion_probability < 0.0f || occlusion_probability > 1.0f ||
        merge_probability < 0.0f || merge_probability > 1.0f) {
        throw std::invalid_argument("corruption: probabilities must lie in [0,1]");
    }
    if (coordinate_jitter_sigma < 0.0f || feature_noise_sigma < 0.0f) {
        throw std::invalid_argument("corruption: sigmas must be nonnegative");
    }
}

void WorldConfig::validate() const {
    if (colors.empty() || shapes.empty() || sizes.empty() || materials.empty()) {
        throw std::invalid_argument("world config: empty attribute vocabulary");
    }
    if (objects_min < 1 || objects_max < objects_min) {
        throw std::invalid_argument("world config: bad objects-per-scene range");
    }
    if (!(coord_max > coord_min)) {
        throw std::invalid_argument("world config: bad coordinate range");
    }
    corruption.validate();
    if (palette != Palette::None) {
        for (const auto& c : palette_group_one())
            if (std::find(colors.begin(), colors.end(), c) == colors.end())
                throw std::invalid_argument("world config: palette requires color " + c);
        for (const auto& c : palette_group_two())
            if (std::find(colors.begin(), colors.end(), c) == colors.end())
                throw std::invalid_argument("world config: palette requires color " + c);
    }
}

const std::vector<std::string>& WorldConfig::category_values(int category) const {
    switch (category) {
        case 0: return colors;
        case 1: return shapes;
        case 2: return sizes;
        case 3: return materials;
        default: throw std::invalid_argument("category_values: bad category index");
    }
}

std::vector<std::string> WorldConfig::label_vocabulary() const {
    auto out = attribute_values();
    for (const char* r : kRelations) out.emplace_back(r);
    return out;
}

std::vector<std::string> WorldConfig::attribute_values() const {
    std::vector<std::string> out;
    for (int c = 0; c < 4; ++c) {
        const auto& vals = category_values(c);
        out.insert(out.end(), vals.begin(), vals.end());
    }
    return out;
}

WorldConfig WorldConfig::with_palette(Palette p) const {
    WorldConfig copy = *this;
    copy.palette = p;
    return copy;
}

const std::vector<std::string>& palette_group_one() {
    static const std::vector<std::string> g = {"gray", "blue", "brown", "yellow"};
    return g;
}

const std::vector<std::string>& palette_group_two() {
    static const std::vector<std::string> g = {"red", "green", "purple", "cyan"};
    return g;
}

namespace {

const std::vector<std::string>* palette_colors_for(const WorldConfig& cfg,
                                                   const std::string& shape) {
    if (cfg.palette == Palette::None) return nullptr;
    const bool is_a = cfg.palette == Palette::A;
    if (shape == "cube") return is_a ? &palette_group_one() : &palette_group_two();
    if (shape == "cylinder") return is_a ? &palette_group_two() : &palette_group_one();
    return nullptr;
}

template <typename T>
const T& pick(const std::vector<T>& values, std::mt19937& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, values.size() - 1);
    return values[dist(rng)];
}

constexpr float kMinSeparation = 1e-3f;

}  // namespace

Scene sample_scene(const WorldConfig& config, std::mt19937& rng) {
    config.validate();
    std::uniform_int_distribution<int> count_dist(config.objects_min, config.objects_max);
    std::uniform_real_distribution<float> coord_dist(config.coord_min, config.coord_max);
    const int n = count_dist(rng);

    Scene scene;
    scene.objects.reserve(n);
    for (int i = 0; i < n; ++i) {
        Object obj;
        obj.id = i;
        obj.shape = pick(config.shapes, rng);
        const auto* palette = palette_colors_for(config, obj.shape);
        obj.color = palette ? pick(*palette, rng) : pick(config.colors, rng);
        obj.size = pick(config.sizes, rng);
        obj.material = pick(config.materials, rng);
        for (;;) {
            obj.x = coord_dist(rng);
            obj.y = coord_dist(rng);
            bool clear = true;
            for (const auto& other : scene.objects) {
                const float dx = obj.x - other.x, dy = obj.y - other.y;
                if (std::sqrt(dx * dx + dy * dy) < kMinSeparation) {
                    clear = false;
                    break;
                }
            }
            if (clear) break;
        }
        scene.objects.push_back(std::move(obj));
    }
    return scene;
}

RelationMap spatial_relations(const Scene& scene) {
    if (scene.objects.empty()) throw std::invalid_argument("spatial_relations: empty scene");
    const int n = static_cast<int>(scene.objects.size());
    RelationMap map;
    map.n = n;
    map.rel.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto& labels = map.rel[static_cast<std::size_t>(i) * n + j];
            const Object& a = scene.objects[i];
            const Object& b = scene.objects[j];
            if (b.x < a.x) labels.emplace_back("left");
            if (b.x > a.x) labels.emplace_back("right");
            if (b.y < a.y) labels.emplace_back("front");
            if (b.y > a.y) labels.emplace_back("behind");
        }
    }
    return map;
}

namespace {

void renumber(Scene& scene) {
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        scene.objects[i].id = static_cast<int>(i);
}

// Mutual nearest neighbours inside a group of identical objects; a pair of
// twins standing next to each other is what a detector blends together.
std::vector<std::pair<int, int>> adjacent_pairs(const Scene& scene,
                                                const std::vector<int>& group) {
    std::vector<std::pair<int, int>> pairs;
    if (group.size() < 2) return pairs;
    auto nearest_in_group = [&](int idx) {
        int best = -1;
        float best_d = 0.0f;
        for (int other : group) {
            if (other == idx) continue;
            const float dx = scene.objects[idx].x - scene.objects[other].x;
            const float dy = scene.objects[idx].y - scene.objects[other].y;
            const float d = dx * dx + dy * dy;
            if (best < 0 || d < best_d) {
                best = other;
                best_d = d;
            }
        }
        return best;
    };
    for (int i : group) {
        const int j = nearest_in_group(i);
        if (j > i && nearest_in_group(j) == i) pairs.emplace_back(i, j);
    }
    return pairs;
}

}  // namespace

Scene corrupt(const Scene& scene, const CorruptionSpec& spec, std::mt19937& rng) {
    spec.validate();
    Scene out = scene;

    if (spec.coordinate_jitter_sigma > 0.0f) {
        std::normal_distribution<float> noise(0.0f, spec.coordinate_jitter_sigma);
        for (auto& obj : out.objects) {
            obj.x += noise(rng);
            obj.y += noise(rng);
        }
    }

    if (spec.occlusion_probability > 0.0f && out.objects.size() > 1) {
        std::uniform_real_distribution<float> coin(0.0f, 1.0f);
        std::vector<bool> drop(out.objects.size(), false);
        for (std::size_t i = 0; i < out.objects.size(); ++i)
            drop[i] = coin(rng) < spec.occlusion_probability;
        if (std::all_of(drop.begin(), drop.end(), [](bool d) { return d; })) {
            std::uniform_int_distribution<std::size_t> keep(0, out.objects.size() - 1);
            drop[keep(rng)] = false;
        }
        Scene kept;
        for (std::size_t i = 0; i < out.objects.size(); ++i)
            if (!drop[i]) kept.objects.push_back(out.objects[i]);
        out = std::move(kept);
    }

    if (spec.merge_probability > 0.0f && out.objects.size() > 1) {
        std::uniform_real_distribution<float> coin(0.0f, 1.0f);
        // group indices by full attribute tuple
        std::vector<std::vector<int>> groups;
        std::vector<int> assigned(out.objects.size(), -1);
        for (std::size_t i = 0; i < out.objects.size(); ++i) {
            if (assigned[i] >= 0) continue;
            groups.push_back({static_cast<int>(i)});
            assigned[i] = static_cast<int>(groups.size()) - 1;
            for (std::size_t j = i + 1; j < out.objects.size(); ++j)
                if (assigned[j] < 0 && out.objects[i].same_attributes(out.objects[j])) {
                    groups.back().push_back(static_cast<int>(j));
                    assigned[j] = static_cast<int>(groups.size()) - 1;
                }
        }
        std::vector<bool> gone(out.objects.size(), false);
        for (const auto& group : groups) {
            for (auto [i, j] : adjacent_pairs(out, group)) {
                if (gone[i] || gone[j]) continue;
                if (coin(rng) < spec.merge_probability) {
                    out.objects[i].x = 0.5f * (out.objects[i].x + out.objects[j].x);
                    out.objects[i].y = 0.5f * (out.objects[i].y + out.objects[j].y);
                    gone[j] = true;
                }
            }
        }
        Scene merged;
        for (std::size_t i = 0; i < out.objects.size(); ++i)
            if (!gone[i]) merged.objects.push_back(out.objects[i]);
        out = std::move(merged);
    }

    renumber(out);
    return out;
}

}  // namespace xnm::world
