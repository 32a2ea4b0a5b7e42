#include "xnm/modules.hpp"

#include <stdexcept>

namespace xnm::engine {

using ad::TensorPtr;

namespace {
constexpr float kPoolEpsilon = 1e-12f;
}

void check_backend(const Context& ctx) {
    const bool graph_gt = ctx.graph.kind == world::GraphKind::GT;
    const bool params_gt = ctx.params.config.setting == Setting::GT;
    if (graph_gt != params_gt) {
        throw std::invalid_argument("attention backend does not match graph representation");
    }
    if (ctx.graph.n == 0) throw std::invalid_argument("empty scene graph");
}

TensorPtr label_distribution(Context& ctx, const TensorPtr& q) {
    const auto& d_table = ctx.params.label_embedding;
    if (q->numel() != d_table->cols()) {
        throw std::invalid_argument("query dimension " + q->shape_str() +
                                    " does not match label embedding " + d_table->shape_str());
    }
    auto logits = ctx.tape.matmul(d_table, ctx.tape.reshape(q, {d_table->cols(), 1}));
    return ctx.tape.softmax(ctx.tape.reshape(logits, {d_table->rows()}));
}

TensorPtr node_feature_matrix(Context& ctx) {
    if (ctx.graph.kind == world::GraphKind::GT) {
        auto rows = ctx.tape.gather_rows(ctx.params.label_embedding, ctx.graph.flat_node_labels());
        return ctx.tape.reshape(rows, {ctx.graph.n, 4 * ctx.params.config.d});
    }
    return ctx.graph.node_features;
}

namespace {

TensorPtr edge_feature_matrix(Context& ctx) {
    if (ctx.graph.kind == world::GraphKind::GT) {
        // sum of relation label embeddings per edge == incidence * D
        return ctx.tape.matmul(ctx.graph.edge_incidence, ctx.params.label_embedding);
    }
    return ctx.graph.edge_features;
}

TensorPtr mask_diagonal(Context& ctx, const TensorPtr& w) {
    return ctx.tape.mul(w, ctx.graph.offdiag_mask);
}

TensorPtr attention_logits(Context& ctx, const TensorPtr& rows, const Mlp& mlp,
                           const TensorPtr& q) {
    auto mapped = mlp.apply(ctx.tape, rows);  // [m, d]
    auto logits = ctx.tape.matmul(mapped, ctx.tape.reshape(q, {ctx.d(), 1}));
    return ctx.tape.reshape(logits, {rows->rows()});
}

}  // namespace

NodeAttention attend_node(Context& ctx, const TensorPtr& q) {
    check_backend(ctx);
    const int n = ctx.n();
    if (ctx.params.config.setting == Setting::GT) {
        if (ctx.params.config.gt_attention == GtAttention::Softmax) {
            auto b = label_distribution(ctx, q);
            auto a = ctx.tape.matmul(ctx.graph.node_incidence,
                                     ctx.tape.reshape(b, {ctx.params.dict.size(), 1}));
            return {ctx.tape.reshape(a, {n})};
        }
        auto fused = ctx.tape.add_rowwise(
            ctx.tape.matmul(node_feature_matrix(ctx), ctx.params.gt_node_fuse_w),
            ctx.params.gt_node_fuse_b);
        auto logits = ctx.tape.matmul(fused, ctx.tape.reshape(q, {ctx.d(), 1}));
        return {ctx.tape.sigmoid(ctx.tape.reshape(logits, {n}))};
    }
    auto logits = attention_logits(ctx, ctx.graph.node_features, ctx.params.det_node_mlp, q);
    return {ctx.tape.sigmoid(logits)};
}

EdgeAttention attend_edge(Context& ctx, const TensorPtr& q) {
    check_backend(ctx);
    const int n = ctx.n();
    TensorPtr flat;
    if (ctx.params.config.setting == Setting::GT) {
        if (ctx.params.config.gt_attention == GtAttention::Softmax) {
            auto b = label_distribution(ctx, q);
            flat = ctx.tape.reshape(
                ctx.tape.matmul(ctx.graph.edge_incidence,
                                ctx.tape.reshape(b, {ctx.params.dict.size(), 1})),
                {n * n});
        } else {
            auto fused = ctx.tape.add_rowwise(
                ctx.tape.matmul(edge_feature_matrix(ctx), ctx.params.gt_edge_fuse_w),
                ctx.params.gt_edge_fuse_b);
            auto logits = ctx.tape.matmul(fused, ctx.tape.reshape(q, {ctx.d(), 1}));
            flat = ctx.tape.sigmoid(ctx.tape.reshape(logits, {n * n}));
        }
    } else {
        flat = ctx.tape.sigmoid(
            attention_logits(ctx, ctx.graph.edge_features, ctx.params.det_edge_mlp, q));
    }
    return {mask_diagonal(ctx, ctx.tape.reshape(flat, {n, n}))};
}

NodeAttention transfer(Context& ctx, const NodeAttention& a, const EdgeAttention& w) {
    const int n = ctx.n();
    auto raw = ctx.tape.reshape(
        ctx.tape.matmul(ctx.tape.transpose(w.w), ctx.tape.reshape(a.a, {n, 1})), {n});
    auto peak = ctx.tape.max_reduce(raw);
    if (peak->data[0] > 1.0f) {
        return {ctx.tape.div_scalar(raw, peak)};
    }
    return {raw};
}

NodeAttention logic_and(Context& ctx, const NodeAttention& a, const NodeAttention& b) {
    return {ctx.tape.minimum(a.a, b.a)};
}
NodeAttention logic_or(Context& ctx, const NodeAttention& a, const NodeAttention& b) {
    return {ctx.tape.maximum(a.a, b.a)};
}
NodeAttention logic_not(Context& ctx, const NodeAttention& a) {
    return {ctx.tape.one_minus(a.a)};
}
EdgeAttention logic_and(Context& ctx, const EdgeAttention& a, const EdgeAttention& b) {
    return {ctx.tape.minimum(a.w, b.w)};
}
EdgeAttention logic_or(Context& ctx, const EdgeAttention& a, const EdgeAttention& b) {
    return {ctx.tape.maximum(a.w, b.w)};
}
EdgeAttention logic_not(Context& ctx, const EdgeAttention& a) {
    return {mask_diagonal(ctx, ctx.tape.one_minus(a.w))};
}

NodeAttention filter(Context& ctx, const NodeAttention& a, const TensorPtr& q) {
    return logic_and(ctx, a, attend_node(ctx, q));
}

NodeAttention relate(Context& ctx, const NodeAttention& a, const TensorPtr& q) {
    return transfer(ctx, a, attend_edge(ctx, q));
}

NodeAttention same(Context& ctx, const NodeAttention& a, const TensorPtr& q) {
    auto described = describe(ctx, a, q);
    return filter(ctx, logic_not(ctx, a), described.h);
}

NodeAttention intersect(Context& ctx, const NodeAttention& a, const NodeAttention& b) {
    return logic_and(ctx, a, b);
}

NodeAttention union_(Context& ctx, const NodeAttention& a, const NodeAttention& b) {
    return logic_or(ctx, a, b);
}

namespace {

FeatureValue attention_sum_feature(Context& ctx, const NodeAttention& a, const Mlp& mlp) {
    auto s = ctx.tape.reshape(ctx.tape.sum(a.a), {1, 1});
    return {ctx.tape.reshape(mlp.apply(ctx.tape, s), {ctx.d()})};
}

}  // namespace

FeatureValue exist(Context& ctx, const NodeAttention& a) {
    return attention_sum_feature(ctx, a, ctx.params.exist_mlp);
}

FeatureValue count(Context& ctx, const NodeAttention& a) {
    return attention_sum_feature(ctx, a, ctx.params.count_mlp);
}

FeatureValue describe(Context& ctx, const NodeAttention& a, const TensorPtr& q) {
    check_backend(ctx);
    const int n = ctx.n();
    auto features = node_feature_matrix(ctx);
    auto pooled = ctx.tape.matmul(ctx.tape.transpose(features), ctx.tape.reshape(a.a, {n, 1}));
    auto denom = ctx.tape.add_const(ctx.tape.sum(a.a), kPoolEpsilon);
    auto vbar = ctx.tape.div_scalar(pooled, denom);  // [dv, 1]

    auto aspect_logits = ctx.params.aspect_mlp.apply(ctx.tape, ctx.tape.reshape(q, {1, ctx.d()}));
    auto c = ctx.tape.softmax(ctx.tape.reshape(aspect_logits, {ctx.params.config.k}));

    TensorPtr h;
    for (int k = 0; k < ctx.params.config.k; ++k) {
        auto projected = ctx.tape.reshape(ctx.tape.matmul(ctx.params.describe_matrix(k), vbar),
                                          {ctx.d()});
        auto weighted = ctx.tape.mul_scalar(projected, ctx.tape.index(c, k));
        h = h ? ctx.tape.add(h, weighted) : weighted;
    }
    return {h};
}

FeatureValue compare(Context& ctx, CompareKind kind, const FeatureValue& h1,
                     const FeatureValue& h2) {
    const auto& mlp = ctx.params.compare_mlp[static_cast<int>(kind)];
    auto diff = ctx.tape.sub(h1.h, h2.h);
    return {ctx.tape.reshape(mlp.apply(ctx.tape, ctx.tape.reshape(diff, {1, ctx.d()})),
                             {ctx.d()})};
}

NodeAttention scene_module(Context& ctx) {
    check_backend(ctx);
    return {ad::Tensor::full({ctx.n()}, 1.0f)};
}

TensorPtr classify(Context& ctx, const FeatureValue& h) {
    auto logits = ctx.params.classifier.apply(ctx.tape, ctx.tape.reshape(h.h, {1, ctx.d()}));
    return ctx.tape.reshape(logits, {ctx.params.config.answer_count()});
}

}  // namespace xnm::engine
