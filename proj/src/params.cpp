#include "xnm/params.hpp"

#include <cmath>
#include <stdexcept>

namespace xnm::engine {

using ad::Tensor;
using ad::TensorPtr;

Setting setting_from_string(const std::string& s) {
    if (s == "gt") return Setting::GT;
    if (s == "det") return Setting::Det;
    throw std::invalid_argument("unknown setting: " + s + " (expected gt or det)");
}

std::string setting_to_string(Setting s) {
    return s == Setting::GT ? "gt" : "det";
}

std::pair<CompareKind, std::string> parse_compare_token(const std::string& token) {
    std::string kind = token;
    std::string category;
    if (auto pos = token.find(':'); pos != std::string::npos) {
        kind = token.substr(0, pos);
        category = token.substr(pos + 1);
    }
    if (kind == "eq_int") return {CompareKind::EqInt, category};
    if (kind == "greater") return {CompareKind::Greater, category};
    if (kind == "less") return {CompareKind::Less, category};
    if (kind == "eq_attr") return {CompareKind::EqAttr, category};
    throw std::invalid_argument("unknown compare kind: " + token);
}

EngineConfig EngineConfig::for_world(const world::WorldConfig& world, Setting setting, int d) {
    EngineConfig cfg;
    cfg.setting = setting;
    cfg.d = d;
    cfg.describe_mode = setting == Setting::GT ? DescribeMode::FixedGT : DescribeMode::Learned;
    cfg.labels = world.label_vocabulary();
    cfg.query_tokens = world.attribute_values();
    for (const char* r : world::kRelations) cfg.query_tokens.emplace_back(r);
    for (const char* c : world::kCategories) cfg.query_tokens.emplace_back(c);
    cfg.answers = {"yes", "no"};
    for (int i = 0; i <= 10; ++i) cfg.answers.push_back(std::to_string(i));
    for (const auto& v : world.attribute_values()) cfg.answers.push_back(v);
    return cfg;
}

int EngineConfig::answer_index(const std::string& answer) const {
    for (std::size_t i = 0; i < answers.size(); ++i)
        if (answers[i] == answer) return static_cast<int>(i);
    throw std::invalid_argument("answer not in vocabulary: " + answer);
}

TensorPtr init_uniform(std::vector<int> shape, int fan_in, std::mt19937& rng) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
    std::uniform_real_distribution<float> dist(-bound, bound);
    std::vector<float> data(ad::numel_of(shape));
    for (auto& v : data) v = dist(rng);
    return Tensor::create(std::move(shape), std::move(data), true);
}

TensorPtr init_embedding(int rows, int dim, std::mt19937& rng) {
    // lookup tables start at unit scale, like any standard embedding layer;
    // the fan-in rule applies to operator matrices
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> data(static_cast<std::size_t>(rows) * dim);
    for (auto& v : data) v = dist(rng);
    return Tensor::create({rows, dim}, std::move(data), true);
}

Mlp Mlp::make(int in, int hidden, int out, std::mt19937& rng) {
    Mlp mlp;
    mlp.w1 = init_uniform({in, hidden}, in, rng);
    mlp.b1 = Tensor::zeros({hidden}, true);
    mlp.w2 = init_uniform({hidden, out}, hidden, rng);
    mlp.b2 = Tensor::zeros({out}, true);
    return mlp;
}

TensorPtr Mlp::apply(ad::Tape& tape, const TensorPtr& x) const {
    auto h = tape.relu(tape.add_rowwise(tape.matmul(x, w1), b1));
    return tape.add_rowwise(tape.matmul(h, w2), b2);
}

namespace {

void register_mlp(Parameters& p, const std::string& prefix, const Mlp& mlp) {
    p.trainable.emplace_back(prefix + ".w1", mlp.w1);
    p.trainable.emplace_back(prefix + ".b1", mlp.b1);
    p.trainable.emplace_back(prefix + ".w2", mlp.w2);
    p.trainable.emplace_back(prefix + ".b2", mlp.b2);
}

std::vector<TensorPtr> fixed_block_selectors(int d) {
    std::vector<TensorPtr> ms;
    for (int k = 0; k < 4; ++k) {
        std::vector<float> m(static_cast<std::size_t>(d) * 4 * d, 0.0f);
        for (int r = 0; r < d; ++r) m[static_cast<std::size_t>(r) * 4 * d + k * d + r] = 1.0f;
        ms.push_back(Tensor::create({d, 4 * d}, std::move(m)));
    }
    return ms;
}

void build_query_index(Parameters& p) {
    for (std::size_t i = 0; i < p.config.query_tokens.size(); ++i)
        p.query_index[p.config.query_tokens[i]] = static_cast<int>(i);
}

}  // namespace

Parameters Parameters::init(const EngineConfig& config, std::mt19937& rng) {
    Parameters p;
    p.config = config;
    p.dict = world::LabelDictionary::from(config.labels);
    build_query_index(p);

    const int d = config.d;
    const int c_total = config.label_count();
    const int t_total = static_cast<int>(config.query_tokens.size());

    p.label_embedding = init_embedding(c_total, d, rng);
    p.query_embedding = init_embedding(t_total, d, rng);
    p.trainable.emplace_back("label_embedding", p.label_embedding);
    p.trainable.emplace_back("query_embedding", p.query_embedding);

    p.aspect_mlp = Mlp::make(d, d, config.k, rng);
    register_mlp(p, "aspect_mlp", p.aspect_mlp);

    if (config.describe_mode == DescribeMode::Learned) {
        for (int k = 0; k < config.k; ++k) {
            p.describe_m.push_back(init_uniform({d, config.dv()}, config.dv(), rng));
            p.trainable.emplace_back("describe_m." + std::to_string(k), p.describe_m.back());
        }
    } else {
        if (config.k != 4) throw std::invalid_argument("fixed describe mode requires K = 4");
        p.fixed_m = fixed_block_selectors(d);
    }

    p.exist_mlp = Mlp::make(1, d, d, rng);
    register_mlp(p, "exist_mlp", p.exist_mlp);
    p.count_mlp = Mlp::make(1, d, d, rng);
    register_mlp(p, "count_mlp", p.count_mlp);

    static const char* kCompareNames[4] = {"compare_eq_int", "compare_greater", "compare_less",
                                           "compare_eq_attr"};
    for (int k = 0; k < 4; ++k) {
        p.compare_mlp[k] = Mlp::make(d, d, d, rng);
        register_mlp(p, kCompareNames[k], p.compare_mlp[k]);
    }

    p.classifier = Mlp::make(d, d, config.answer_count(), rng);
    register_mlp(p, "classifier", p.classifier);

    if (config.setting == Setting::Det) {
        p.det_node_mlp = Mlp::make(config.det_node_dim, d, d, rng);
        register_mlp(p, "det_node_mlp", p.det_node_mlp);
        p.det_edge_mlp = Mlp::make(config.det_edge_dim, d, d, rng);
        register_mlp(p, "det_edge_mlp", p.det_edge_mlp);
    } else if (config.gt_attention == GtAttention::Sigmoid) {
        p.gt_node_fuse_w = init_uniform({4 * d, d}, 4 * d, rng);
        p.gt_node_fuse_b = Tensor::zeros({d}, true);
        p.gt_edge_fuse_w = init_uniform({d, d}, d, rng);
        p.gt_edge_fuse_b = Tensor::zeros({d}, true);
        p.trainable.emplace_back("gt_node_fuse_w", p.gt_node_fuse_w);
        p.trainable.emplace_back("gt_node_fuse_b", p.gt_node_fuse_b);
        p.trainable.emplace_back("gt_edge_fuse_w", p.gt_edge_fuse_w);
        p.trainable.emplace_back("gt_edge_fuse_b", p.gt_edge_fuse_b);
    }

    return p;
}

Parameters Parameters::symbolic(const world::WorldConfig& world) {
    // Scale chosen so float32 softmax saturates exactly: exp(-tau^2) == 0.
    constexpr float kTau = 64.0f;

    EngineConfig cfg = EngineConfig::for_world(world, Setting::GT, 0);
    cfg.d = cfg.label_count();
    cfg.describe_mode = DescribeMode::FixedGT;

    Parameters p;
    p.config = cfg;
    p.dict = world::LabelDictionary::from(cfg.labels);
    build_query_index(p);

    const int d = cfg.d;
    std::vector<float> eye(static_cast<std::size_t>(d) * d, 0.0f);
    for (int i = 0; i < d; ++i) eye[static_cast<std::size_t>(i) * d + i] = kTau;
    p.label_embedding = Tensor::create({d, d}, std::move(eye));

    const int t_total = static_cast<int>(cfg.query_tokens.size());
    std::vector<float> queries(static_cast<std::size_t>(t_total) * d, 0.0f);
    auto proxy_row = [&](const std::string& token) {
        if (p.dict.contains(token)) return p.dict.row(token);
        // category tokens borrow the row of the category's first value
        for (int c = 0; c < 4; ++c)
            if (token == world::kCategories[c]) return p.dict.row(world.category_values(c)[0]);
        throw std::invalid_argument("symbolic: no proxy row for token " + token);
    };
    for (int t = 0; t < t_total; ++t)
        queries[static_cast<std::size_t>(t) * d + proxy_row(cfg.query_tokens[t])] = kTau;
    p.query_embedding = Tensor::create({t_total, d}, std::move(queries));

    // aspect logits become tau * onehot(category) through an identity hidden layer
    std::vector<float> w1(static_cast<std::size_t>(d) * d, 0.0f);
    for (int i = 0; i < d; ++i) w1[static_cast<std::size_t>(i) * d + i] = 1.0f;
    p.aspect_mlp.w1 = Tensor::create({d, d}, std::move(w1));
    p.aspect_mlp.b1 = Tensor::zeros({d});
    std::vector<float> w2(static_cast<std::size_t>(d) * cfg.k, 0.0f);
    for (int k = 0; k < cfg.k; ++k)
        w2[static_cast<std::size_t>(p.dict.row(world.category_values(k)[0])) * cfg.k + k] = 1.0f;
    p.aspect_mlp.w2 = Tensor::create({d, cfg.k}, std::move(w2));
    p.aspect_mlp.b2 = Tensor::zeros({cfg.k});

    p.fixed_m = fixed_block_selectors(d);
    return p;
}

long Parameters::parameter_count() const {
    long total = 0;
    for (const auto& [name, t] : trainable) total += static_cast<long>(t->numel());
    return total;
}

TensorPtr Parameters::query(ad::Tape& tape, const std::string& token) const {
    auto it = query_index.find(token);
    if (it == query_index.end()) throw std::invalid_argument("unknown query token: " + token);
    return tape.reshape(tape.gather_rows(query_embedding, {it->second}), {config.d});
}

const TensorPtr& Parameters::describe_matrix(int k) const {
    const auto& ms = config.describe_mode == DescribeMode::Learned ? describe_m : fixed_m;
    if (k < 0 || k >= static_cast<int>(ms.size()))
        throw std::invalid_argument("describe_matrix: aspect out of range");
    return ms[static_cast<std::size_t>(k)];
}

}  // namespace xnm::engine
