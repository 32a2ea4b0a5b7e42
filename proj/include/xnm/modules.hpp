#pragma once

#include "xnm/params.hpp"
#include "xnm/scene_graph.hpp"
#include "xnm/tensor.hpp"

namespace xnm::engine {

struct NodeAttention {
    ad::TensorPtr a;  // [n], entries in [0,1]
};

struct EdgeAttention {
    ad::TensorPtr w;  // [n,n], entries in [0,1], zero diagonal
};

struct FeatureValue {
    ad::TensorPtr h;  // [d]
};

/// One forward execution over one graph; owns nothing, borrows everything.
struct Context {
    ad::Tape& tape;
    const world::SceneGraph& graph;
    const Parameters& params;

    int n() const { return graph.n; }
    int d() const { return params.config.d; }
};

void check_backend(const Context& ctx);

/// b = softmax(D q), the label distribution behind both GT attentions.
ad::TensorPtr label_distribution(Context& ctx, const ad::TensorPtr& q);

/// Node features as a matrix on the tape. GT gathers fresh rows from the
/// label embedding so gradients reach D; Det uses the stored features.
ad::TensorPtr node_feature_matrix(Context& ctx);

NodeAttention attend_node(Context& ctx, const ad::TensorPtr& q);
EdgeAttention attend_edge(Context& ctx, const ad::TensorPtr& q);
NodeAttention transfer(Context& ctx, const NodeAttention& a, const EdgeAttention& w);

NodeAttention logic_and(Context& ctx, const NodeAttention& a, const NodeAttention& b);
NodeAttention logic_or(Context& ctx, const NodeAttention& a, const NodeAttention& b);
NodeAttention logic_not(Context& ctx, const NodeAttention& a);
EdgeAttention logic_and(Context& ctx, const EdgeAttention& a, const EdgeAttention& b);
EdgeAttention logic_or(Context& ctx, const EdgeAttention& a, const EdgeAttention& b);
EdgeAttention logic_not(Context& ctx, const EdgeAttention& a);

NodeAttention filter(Context& ctx, const NodeAttention& a, const ad::TensorPtr& q);
NodeAttention relate(Context& ctx, const NodeAttention& a, const ad::TensorPtr& q);
NodeAttention same(Context& ctx, const NodeAttention& a, const ad::TensorPtr& q);
NodeAttention intersect(Context& ctx, const NodeAttention& a, const NodeAttention& b);
NodeAttention union_(Context& ctx, const NodeAttention& a, const NodeAttention& b);

FeatureValue exist(Context& ctx, const NodeAttention& a);
FeatureValue count(Context& ctx, const NodeAttention& a);
FeatureValue describe(Context& ctx, const NodeAttention& a, const ad::TensorPtr& q);
FeatureValue compare(Context& ctx, CompareKind kind, const FeatureValue& h1,
                     const FeatureValue& h2);
NodeAttention scene_module(Context& ctx);

/// Classifier MLP over the root feature, producing answer logits [A].
ad::TensorPtr classify(Context& ctx, const FeatureValue& h);

}  // namespace xnm::engine
