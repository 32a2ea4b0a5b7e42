#include "xnm/oracle.hpp"

#include <algorithm>

#include "xnm/params.hpp"

namespace xnm::dsl {

namespace {

std::vector<int> eval_set(const Expr& e, const world::Scene& scene,
                          const world::RelationMap& relations) {
    const int n = static_cast<int>(scene.objects.size());
    switch (e.module) {
        case ModuleKind::Scene: {
            std::vector<int> all(n);
            for (int i = 0; i < n; ++i) all[i] = i;
            return all;
        }
        case ModuleKind::Filter: {
            std::vector<int> out;
            for (int i : eval_set(e.children[0], scene, relations)) {
                const auto& obj = scene.objects[i];
                for (int c = 0; c < 4; ++c)
                    if (obj.attribute(c) == e.token) {
                        out.push_back(i);
                        break;
                    }
            }
            return out;
        }
        case ModuleKind::Relate: {
            std::vector<bool> hit(n, false);
            for (int i : eval_set(e.children[0], scene, relations))
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const auto& labels = relations.at(i, j);
                    if (std::find(labels.begin(), labels.end(), e.token) != labels.end())
                        hit[j] = true;
                }
            std::vector<int> out;
            for (int j = 0; j < n; ++j)
                if (hit[j]) out.push_back(j);
            return out;
        }
        case ModuleKind::Same: {
            auto selected = eval_set(e.children[0], scene, relations);
            if (selected.size() != 1) {
                throw IllPosed("same requires exactly one selected object, got " +
                               std::to_string(selected.size()));
            }
            int cat = -1;
            for (int c = 0; c < 4; ++c)
                if (e.token == world::kCategories[c]) cat = c;
            if (cat < 0) throw IllPosed("same: unknown category " + e.token);
            const auto& value = scene.objects[selected[0]].attribute(cat);
            std::vector<int> out;
            for (int i = 0; i < n; ++i)
                if (i != selected[0] && scene.objects[i].attribute(cat) == value) out.push_back(i);
            return out;
        }
        case ModuleKind::Intersect: {
            auto a = eval_set(e.children[0], scene, relations);
            auto b = eval_set(e.children[1], scene, relations);
            std::vector<int> out;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
            return out;
        }
        case ModuleKind::Union: {
            auto a = eval_set(e.children[0], scene, relations);
            auto b = eval_set(e.children[1], scene, relations);
            std::vector<int> out;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
            return out;
        }
        case ModuleKind::Unique:
            return eval_set(e.children[0], scene, relations);
        default:
            throw IllPosed(std::string("module ") + module_name(e.module) +
                           " does not produce an attention value");
    }
}

struct FeatureResult {
    enum class Tag { Number, Value, YesNo } tag;
    int number = 0;
    std::string text;
};

FeatureResult eval_feature(const Expr& e, const world::Scene& scene,
                           const world::RelationMap& relations) {
    switch (e.module) {
        case ModuleKind::Exist: {
            auto set = eval_set(e.children[0], scene, relations);
            return {FeatureResult::Tag::YesNo, 0, set.empty() ? "no" : "yes"};
        }
        case ModuleKind::Count: {
            auto set = eval_set(e.children[0], scene, relations);
            return {FeatureResult::Tag::Number, static_cast<int>(set.size()), ""};
        }
        case ModuleKind::Describe: {
            auto selected = eval_set(e.children[0], scene, relations);
            if (selected.size() != 1) {
                throw IllPosed("describe requires exactly one selected object, got " +
                               std::to_string(selected.size()));
            }
            int cat = -1;
            for (int c = 0; c < 4; ++c)
                if (e.token == world::kCategories[c]) cat = c;
            if (cat < 0) throw IllPosed("describe: unknown category " + e.token);
            return {FeatureResult::Tag::Value, 0, scene.objects[selected[0]].attribute(cat)};
        }
        case ModuleKind::Compare: {
            auto [kind, category] = engine::parse_compare_token(e.token);
            auto lhs = eval_feature(e.children[0], scene, relations);
            auto rhs = eval_feature(e.children[1], scene, relations);
            bool yes = false;
            if (kind == engine::CompareKind::EqAttr) {
                if (lhs.tag != FeatureResult::Tag::Value || rhs.tag != FeatureResult::Tag::Value) {
                    throw IllPosed("eq_attr compares two attribute values");
                }
                yes = lhs.text == rhs.text;
            } else {
                if (lhs.tag != FeatureResult::Tag::Number || rhs.tag != FeatureResult::Tag::Number) {
                    throw IllPosed("numeric compare needs two counts");
                }
                switch (kind) {
                    case engine::CompareKind::EqInt: yes = lhs.number == rhs.number; break;
                    case engine::CompareKind::Greater: yes = lhs.number > rhs.number; break;
                    case engine::CompareKind::Less: yes = lhs.number < rhs.number; break;
                    default: break;
                }
            }
            return {FeatureResult::Tag::YesNo, 0, yes ? "yes" : "no"};
        }
        default:
            throw IllPosed(std::string("module ") + module_name(e.module) +
                           " does not produce a feature value");
    }
}

}  // namespace

std::vector<int> oracle_attention(const Expr& expr, const world::Scene& scene) {
    const auto relations = world::spatial_relations(scene);
    return eval_set(expr, scene, relations);
}

std::string oracle(const Program& program, const world::Scene& scene) {
    if (scene.objects.empty()) throw IllPosed("oracle: empty scene");
    const auto relations = world::spatial_relations(scene);
    const FeatureResult result = eval_feature(program.root, scene, relations);
    return result.tag == FeatureResult::Tag::Number ? std::to_string(result.number) : result.text;
}

}  // namespace xnm::dsl
