#pragma once

#include <array>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "xnm/scene.hpp"
#include "xnm/scene_graph.hpp"
#include "xnm/tensor.hpp"

namespace xnm::engine {

enum class Setting { GT, Det };
enum class DescribeMode { FixedGT, Learned };
enum class GtAttention { Softmax, Sigmoid };

Setting setting_from_string(const std::string& s);
std::string setting_to_string(Setting s);

enum class CompareKind { EqInt, Greater, Less, EqAttr };

/// Parses a compare bracket token ("eq_int", "greater", "less", "eq_attr"
/// or "eq_attr:<category>"). Returns the kind and optional category.
std::pair<CompareKind, std::string> parse_compare_token(const std::string& token);

struct EngineConfig {
    Setting setting = Setting::GT;
    int d = 32;
    int k = 4;
    GtAttention gt_attention = GtAttention::Softmax;
    DescribeMode describe_mode = DescribeMode::FixedGT;
    int det_node_dim = world::kDetNodeDim;
    int det_edge_dim = world::kDetEdgeDim;
    std::vector<std::string> labels;
    std::vector<std::string> query_tokens;
    std::vector<std::string> answers;

    static EngineConfig for_world(const world::WorldConfig& world, Setting setting, int d);

    int label_count() const { return static_cast<int>(labels.size()); }
    int answer_count() const { return static_cast<int>(answers.size()); }
    int dv() const { return setting == Setting::GT ? 4 * d : det_node_dim; }
    int de() const { return setting == Setting::GT ? d : det_edge_dim; }
    int answer_index(const std::string& answer) const;
};

/// linear -> ReLU -> linear applied to row vectors.
struct Mlp {
    ad::TensorPtr w1, b1, w2, b2;  // x[m,in] -> relu(x*w1 + b1)*w2 + b2

    static Mlp make(int in, int hidden, int out, std::mt19937& rng);
    ad::TensorPtr apply(ad::Tape& tape, const ad::TensorPtr& x) const;
    bool empty() const { return !w1; }
};

ad::TensorPtr init_uniform(std::vector<int> shape, int fan_in, std::mt19937& rng);
ad::TensorPtr init_embedding(int rows, int dim, std::mt19937& rng);

/// Every trainable tensor of the engine, in a fixed registration order.
struct Parameters {
    EngineConfig config;
    world::LabelDictionary dict;
    std::unordered_map<std::string, int> query_index;

    ad::TensorPtr label_embedding;  // D: [C, d]
    ad::TensorPtr query_embedding;  // [T, d]
    Mlp aspect_mlp;                 // d -> d -> K
    std::vector<ad::TensorPtr> describe_m;  // learned mode: K x [d, dv]
    std::vector<ad::TensorPtr> fixed_m;     // fixed mode: constant block selectors
    Mlp exist_mlp;   // 1 -> d -> d
    Mlp count_mlp;   // 1 -> d -> d
    std::array<Mlp, 4> compare_mlp;  // indexed by CompareKind
    Mlp classifier;  // d -> d -> answers
    Mlp det_node_mlp;  // dv -> d -> d
    Mlp det_edge_mlp;  // de -> d -> d
    // appendix GT-sigmoid variant: fully connected fusion of label vectors
    ad::TensorPtr gt_node_fuse_w, gt_node_fuse_b;  // [4d, d], [d]
    ad::TensorPtr gt_edge_fuse_w, gt_edge_fuse_b;  // [d, d], [d]

    std::vector<std::pair<std::string, ad::TensorPtr>> trainable;

    static Parameters init(const EngineConfig& config, std::mt19937& rng);

    /// Hard symbolic parameters: identity label embedding at saturating
    /// scale, so every attention comes out exactly 0/1. GT setting only.
    static Parameters symbolic(const world::WorldConfig& world);

    long parameter_count() const;
    bool has_query(const std::string& token) const { return query_index.count(token) > 0; }
    /// Query vector for a DSL token, shape [d].
    ad::TensorPtr query(ad::Tape& tape, const std::string& token) const;
    const ad::TensorPtr& describe_matrix(int k) const;
};

}  // namespace xnm::engine
