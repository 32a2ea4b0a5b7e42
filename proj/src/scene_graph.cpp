#include "xnm/scene_graph.hpp"

#include <stdexcept>

namespace xnm::world {

using ad::Tensor;
using ad::TensorPtr;

LabelDictionary LabelDictionary::from(const std::vector<std::string>& labels) {
    LabelDictionary dict;
    dict.labels = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!dict.index.emplace(labels[i], static_cast<int>(i)).second) {
            throw std::invalid_argument("label dictionary: duplicate label " + labels[i]);
        }
    }
    return dict;
}

int LabelDictionary::row(const std::string& label) const {
    auto it = index.find(label);
    if (it == index.end()) throw std::invalid_argument("unknown label: " + label);
    return it->second;
}

std::vector<int> SceneGraph::flat_node_labels() const {
    std::vector<int> flat;
    flat.reserve(node_labels.size() * 4);
    for (const auto& labels : node_labels)
        flat.insert(flat.end(), labels.begin(), labels.end());
    return flat;
}

namespace {

TensorPtr offdiag_mask_for(int n) {
    std::vector<float> mask(static_cast<std::size_t>(n) * n, 1.0f);
    for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i) * n + i] = 0.0f;
    return Tensor::create({n, n}, std::move(mask));
}

}  // namespace

SceneGraph build_gt_graph(const Scene& scene, const TensorPtr& embedding,
                          const LabelDictionary& dict) {
    if (scene.objects.empty()) throw std::invalid_argument("build_gt_graph: empty scene");
    if (embedding->rows() != dict.size()) {
        throw std::invalid_argument("build_gt_graph: embedding rows do not match dictionary");
    }
    const int n = static_cast<int>(scene.objects.size());
    const int d = embedding->cols();

    SceneGraph g;
    g.kind = GraphKind::GT;
    g.n = n;
    g.dv = 4 * d;
    g.de = d;

    g.node_labels.reserve(n);
    for (const auto& obj : scene.objects) {
        std::array<int, 4> rows{};
        for (int c = 0; c < 4; ++c) rows[c] = dict.row(obj.attribute(c));
        g.node_labels.push_back(rows);
    }

    const RelationMap relations = spatial_relations(scene);
    g.edge_labels.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (const auto& r : relations.at(i, j))
                g.edge_labels[static_cast<std::size_t>(i) * n + j].push_back(dict.row(r));
        }

    // snapshot features from the current embedding values
    std::vector<float> nodes(static_cast<std::size_t>(n) * g.dv, 0.0f);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 4; ++c) {
            const float* src = &embedding->data[static_cast<std::size_t>(g.node_labels[i][c]) * d];
            std::copy(src, src + d, &nodes[static_cast<std::size_t>(i) * g.dv + c * d]);
        }
    g.node_features = Tensor::create({n, g.dv}, std::move(nodes));

    std::vector<float> edges(static_cast<std::size_t>(n) * n * d, 0.0f);
    for (std::size_t e = 0; e < g.edge_labels.size(); ++e)
        for (int row : g.edge_labels[e])
            for (int k = 0; k < d; ++k)
                edges[e * d + k] += embedding->data[static_cast<std::size_t>(row) * d + k];
    g.edge_features = Tensor::create({n * n, d}, std::move(edges));

    const int c_total = dict.size();
    std::vector<float> node_inc(static_cast<std::size_t>(n) * c_total, 0.0f);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 4; ++c)
            node_inc[static_cast<std::size_t>(i) * c_total + g.node_labels[i][c]] = 1.0f;
    g.node_incidence = Tensor::create({n, c_total}, std::move(node_inc));

    std::vector<float> edge_inc(static_cast<std::size_t>(n) * n * c_total, 0.0f);
    for (std::size_t e = 0; e < g.edge_labels.size(); ++e)
        for (int row : g.edge_labels[e]) edge_inc[e * c_total + row] = 1.0f;
    g.edge_incidence = Tensor::create({n * n, c_total}, std::move(edge_inc));

    g.offdiag_mask = offdiag_mask_for(n);
    return g;
}

DetProjection DetProjection::build(const WorldConfig& config, std::uint64_t projection_seed) {
    DetProjection p;
    p.dv = kDetNodeDim;
    p.combos = 1;
    for (int c = 0; c < 4; ++c) p.combos *= static_cast<int>(config.category_values(c).size());
    std::mt19937 rng(static_cast<std::uint32_t>(projection_seed));
    std::normal_distribution<float> normal(0.0f, 1.0f);
    p.table.resize(static_cast<std::size_t>(p.dv) * p.combos);
    for (auto& v : p.table) v = normal(rng);
    return p;
}

int attribute_combo_index(const WorldConfig& config, const Object& obj) {
    int idx = 0;
    for (int c = 0; c < 4; ++c) {
        const auto& vals = config.category_values(c);
        int pos = -1;
        for (std::size_t k = 0; k < vals.size(); ++k)
            if (vals[k] == obj.attribute(c)) pos = static_cast<int>(k);
        if (pos < 0) throw std::invalid_argument("unknown label: " + obj.attribute(c));
        idx = idx * static_cast<int>(vals.size()) + pos;
    }
    return idx;
}

SceneGraph build_det_graph(const Scene& scene, const WorldConfig& config,
                           const CorruptionSpec& spec, const DetProjection& projection,
                           std::mt19937& rng) {
    if (scene.objects.empty()) throw std::invalid_argument("build_det_graph: empty scene");
    spec.validate();
    const int n = static_cast<int>(scene.objects.size());

    SceneGraph g;
    g.kind = GraphKind::Det;
    g.n = n;
    g.dv = projection.dv;
    g.de = kDetEdgeDim;

    std::normal_distribution<float> noise(0.0f, 1.0f);
    std::vector<float> nodes(static_cast<std::size_t>(n) * g.dv);
    for (int i = 0; i < n; ++i) {
        const int combo = attribute_combo_index(config, scene.objects[i]);
        for (int k = 0; k < g.dv; ++k) {
            float v = projection.table[static_cast<std::size_t>(k) * projection.combos + combo];
            if (spec.feature_noise_sigma > 0.0f) v += spec.feature_noise_sigma * noise(rng);
            nodes[static_cast<std::size_t>(i) * g.dv + k] = v;
        }
    }
    g.node_features = Tensor::create({n, g.dv}, std::move(nodes));

    std::vector<float> edges(static_cast<std::size_t>(n) * n * kDetEdgeDim, 0.0f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t e = (static_cast<std::size_t>(i) * n + j) * kDetEdgeDim;
            edges[e + 0] = scene.objects[j].x - scene.objects[i].x;
            edges[e + 1] = scene.objects[j].y - scene.objects[i].y;
        }
    g.edge_features = Tensor::create({n * n, kDetEdgeDim}, std::move(edges));

    g.offdiag_mask = offdiag_mask_for(n);
    return g;
}

SceneGraph build_det_graph(const Scene& scene, const WorldConfig& config,
                           const CorruptionSpec& spec, std::uint64_t projection_seed,
                           std::mt19937& rng) {
    const DetProjection projection = DetProjection::build(config, projection_seed);
    return build_det_graph(scene, config, spec, projection, rng);
}

}  // namespace xnm::world
