#pragma once

#include <array>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "xnm/scene.hpp"
#include "xnm/tensor.hpp"

namespace xnm::world {

/// Bijection between label strings and rows of the embedding table.
struct LabelDictionary {
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> index;

    static LabelDictionary from(const std::vector<std::string>& labels);
    int row(const std::string& label) const;
    bool contains(const std::string& label) const { return index.count(label) > 0; }
    int size() const { return static_cast<int>(labels.size()); }
};

enum class GraphKind { GT, Det };

inline constexpr int kDetNodeDim = 32;
inline constexpr int kDetEdgeDim = 2;

struct SceneGraph {
    GraphKind kind = GraphKind::GT;
    int n = 0;
    int dv = 0;
    int de = 0;

    // GT only: dictionary rows per node (fixed category order) and per
    // directed edge (i*n + j)
    std::vector<std::array<int, 4>> node_labels;
    std::vector<std::vector<int>> edge_labels;

    ad::TensorPtr node_features;   // [n, dv]
    ad::TensorPtr edge_features;   // [n*n, de]
    ad::TensorPtr node_incidence;  // GT: [n, C] 0/1
    ad::TensorPtr edge_incidence;  // GT: [n*n, C] 0/1
    ad::TensorPtr offdiag_mask;    // [n, n], zero diagonal

    /// Node label rows flattened in category order, for gathering fresh
    /// features from the current embedding table.
    std::vector<int> flat_node_labels() const;
};

SceneGraph build_gt_graph(const Scene& scene, const ad::TensorPtr& embedding,
                          const LabelDictionary& dict);

/// Fixed dataset-wide random projection of attribute combinations.
struct DetProjection {
    int dv = kDetNodeDim;
    int combos = 0;
    std::vector<float> table;  // [dv, combos] column per combination

    static DetProjection build(const WorldConfig& config, std::uint64_t projection_seed);
};

int attribute_combo_index(const WorldConfig& config, const Object& obj);

SceneGraph build_det_graph(const Scene& scene, const WorldConfig& config,
                           const CorruptionSpec& spec, const DetProjection& projection,
                           std::mt19937& rng);
SceneGraph build_det_graph(const Scene& scene, const WorldConfig& config,
                           const CorruptionSpec& spec, std::uint64_t projection_seed,
                           std::mt19937& rng);

}  // namespace xnm::world
