#include "xnm/generator.hpp"

#include <algorithm>

namespace xnm::dsl {

const char* family_name(Family f) {
    switch (f) {
        case Family::Count: return "count";
        case Family::Exist: return "exist";
        case Family::CompareNumbers: return "compare_numbers";
        case Family::QueryAttribute: return "query_attribute";
        case Family::CompareAttribute: return "compare_attribute";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    for (Family f : kFamilies)
        if (name == family_name(f)) return f;
    throw std::invalid_argument("unknown question family: " + name);
}

namespace {

constexpr int kMaxAttempts = 1000;

struct Gen {
    const world::Scene& scene;
    const world::WorldConfig& world;
    std::mt19937& rng;
    world::RelationMap relations;

    Gen(const world::Scene& s, const world::WorldConfig& w, std::mt19937& r)
        : scene(s), world(w), rng(r), relations(world::spatial_relations(s)) {}

    int n() const { return static_cast<int>(scene.objects.size()); }

    int rand_int(int lo, int hi) {  // inclusive
        std::uniform_int_distribution<int> dist(lo, hi);
        return dist(rng);
    }
    bool coin(double p) {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        return dist(rng) < p;
    }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[rand_int(0, static_cast<int>(v.size()) - 1)];
    }

    Expr scene_expr() { return Expr{ModuleKind::Scene, "", {}, 0}; }

    Expr wrap(ModuleKind kind, std::string token, Expr child) {
        Expr e{kind, std::move(token), {}, 0};
        e.children.push_back(std::move(child));
        return e;
    }

    Expr pair(ModuleKind kind, Expr a, Expr b) {
        Expr e{kind, "", {}, 0};
        e.children.push_back(std::move(a));
        e.children.push_back(std::move(b));
        return e;
    }

    std::vector<int> set_of(const Expr& e) { return eval_or_empty(e); }

    std::vector<int> eval_or_empty(const Expr& e) {
        try {
            return oracle_attention(e, scene);
        } catch (const IllPosed&) {
            return {};
        }
    }

    /// Some attribute value; biased towards ones present in the scene.
    std::string attribute_value(bool prefer_present) {
        if (prefer_present) {
            const auto& obj = scene.objects[rand_int(0, n() - 1)];
            return obj.attribute(rand_int(0, 3));
        }
        const int cat = rand_int(0, 3);
        return pick(world.category_values(cat));
    }

    std::string relation() { return world::kRelations[rand_int(0, 3)]; }
    std::string category() { return world::kCategories[rand_int(0, 3)]; }

    /// Filter chain isolating a single object, at most max_filters deep.
    std::optional<Expr> unique_chain(int max_filters, int preferred_target = -1) {
        for (int attempt = 0; attempt < 12; ++attempt) {
            const int target = (attempt == 0 && preferred_target >= 0)
                                   ? preferred_target
                                   : rand_int(0, n() - 1);
            std::array<int, 4> order = {0, 1, 2, 3};
            std::shuffle(order.begin(), order.end(), rng);
            Expr chain = scene_expr();
            int used = 0;
            auto selected = set_of(chain);
            for (int cat : order) {
                if (static_cast<int>(selected.size()) == 1) break;
                if (used == max_filters) break;
                chain = wrap(ModuleKind::Filter, scene.objects[target].attribute(cat),
                             std::move(chain));
                ++used;
                selected = set_of(chain);
            }
            if (selected.size() == 1 && selected[0] == target) {
                if (coin(0.25)) chain = wrap(ModuleKind::Unique, "", std::move(chain));
                return chain;
            }
        }
        return std::nullopt;
    }

    /// Attention chain for count/exist questions, depth at most 4.
    std::optional<Expr> attention_chain() {
        switch (rand_int(0, 6)) {
            case 0:
                return wrap(ModuleKind::Filter, attribute_value(coin(0.6)), scene_expr());
            case 1: {
                auto inner = wrap(ModuleKind::Filter, attribute_value(true), scene_expr());
                return wrap(ModuleKind::Filter, attribute_value(coin(0.6)), std::move(inner));
            }
            case 2: {
                auto u = unique_chain(3);
                if (!u) return std::nullopt;
                return wrap(ModuleKind::Relate, relation(), std::move(*u));
            }
            case 3: {
                auto u = unique_chain(2);
                if (!u) return std::nullopt;
                auto related = wrap(ModuleKind::Relate, relation(), std::move(*u));
                return wrap(ModuleKind::Filter, attribute_value(coin(0.6)), std::move(related));
            }
            case 4: {
                auto u = unique_chain(3);
                if (!u) return std::nullopt;
                return wrap(ModuleKind::Same, category(), std::move(*u));
            }
            case 5: {
                auto lhs = wrap(ModuleKind::Filter, attribute_value(true), scene_expr());
                auto rhs = wrap(ModuleKind::Filter, attribute_value(true), scene_expr());
                return pair(coin(0.5) ? ModuleKind::Union : ModuleKind::Intersect, std::move(lhs),
                            std::move(rhs));
            }
            default:
                return scene_expr();
        }
    }

    std::optional<Program> build(Family family) {
        switch (family) {
            case Family::Count: {
                auto chain = attention_chain();
                if (!chain) return std::nullopt;
                return Program{wrap(ModuleKind::Count, "", std::move(*chain))};
            }
            case Family::Exist: {
                auto chain = attention_chain();
                if (!chain) return std::nullopt;
                if (chain->module == ModuleKind::Scene) return std::nullopt;  // trivially yes
                return Program{wrap(ModuleKind::Exist, "", std::move(*chain))};
            }
            case Family::CompareNumbers: {
                auto lhs = attention_chain();
                auto rhs = attention_chain();
                if (!lhs || !rhs) return std::nullopt;
                static const char* kinds[3] = {"eq_int", "greater", "less"};
                auto program = pair(ModuleKind::Compare,
                                    wrap(ModuleKind::Count, "", std::move(*lhs)),
                                    wrap(ModuleKind::Count, "", std::move(*rhs)));
                program.token = kinds[rand_int(0, 2)];
                return Program{std::move(program)};
            }
            case Family::QueryAttribute: {
                auto u = unique_chain(3);
                if (!u) return std::nullopt;
                return Program{wrap(ModuleKind::Describe, category(), std::move(*u))};
            }
            case Family::CompareAttribute: {
                const std::string cat = category();
                auto u1 = unique_chain(3);
                if (!u1) return std::nullopt;
                auto first = set_of(*u1);
                int preferred = -1;
                if (coin(0.5) && first.size() == 1) {
                    // aim for a matching value half the time
                    const int catIdx = static_cast<int>(
                        std::find(world::kCategories.begin(), world::kCategories.end(), cat) -
                        world::kCategories.begin());
                    std::vector<int> mates;
                    for (int i = 0; i < n(); ++i)
                        if (i != first[0] && scene.objects[i].attribute(catIdx) ==
                                                 scene.objects[first[0]].attribute(catIdx))
                            mates.push_back(i);
                    if (!mates.empty()) preferred = mates[rand_int(0, static_cast<int>(mates.size()) - 1)];
                }
                auto u2 = unique_chain(3, preferred);
                if (!u2) return std::nullopt;
                auto program = pair(ModuleKind::Compare,
                                    wrap(ModuleKind::Describe, cat, std::move(*u1)),
                                    wrap(ModuleKind::Describe, cat, std::move(*u2)));
                program.token = "eq_attr:" + cat;
                return Program{std::move(program)};
            }
        }
        return std::nullopt;
    }
};

}  // namespace

GeneratedQuestion generate(const world::Scene& scene, Family family,
                           const world::WorldConfig& world, std::mt19937& rng) {
    if (scene.objects.empty()) throw std::invalid_argument("generate: empty scene");
    if (scene.objects.size() > 10) {
        throw std::invalid_argument("generate: scenes above 10 objects exceed the answer vocabulary");
    }
    Gen gen(scene, world, rng);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto program = gen.build(family);
        if (!program) continue;
        try {
            std::string answer = oracle(*program, scene);
            return {std::move(*program), std::move(answer), family};
        } catch (const IllPosed&) {
            continue;
        }
    }
    throw TemplateExhausted(std::string("no well-posed ") + family_name(family) +
                            " question after 1000 rejections (scene too small?)");
}

namespace {

double family_cap(Family family) {
    switch (family) {
        case Family::Exist:
        case Family::CompareNumbers:
        case Family::CompareAttribute:
            return 0.55;  // keeps yes/no inside 45..55%
        case Family::Count:
            return 0.32;
        case Family::QueryAttribute:
            return 0.45;
    }
    return 1.0;
}

}  // namespace

bool BalanceTracker::accept(Family family, const std::string& answer) const {
    const auto idx = static_cast<std::size_t>(family);
    const int total = totals_[idx] + 1;
    const auto& hist = counts_[idx];
    const auto it = hist.find(answer);
    const int count = (it == hist.end() ? 0 : it->second) + 1;
    return count <= std::max(3.0, family_cap(family) * total);
}

void BalanceTracker::add(Family family, const std::string& answer) {
    const auto idx = static_cast<std::size_t>(family);
    counts_[idx][answer] += 1;
    totals_[idx] += 1;
}

const std::unordered_map<std::string, int>& BalanceTracker::histogram(Family family) const {
    return counts_[static_cast<std::size_t>(family)];
}

}  // namespace xnm::dsl
