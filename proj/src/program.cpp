#include "xnm/program.hpp"

#include <algorithm>
#include <cctype>

#include "xnm/params.hpp"

namespace xnm::dsl {

namespace {

struct ModuleInfo {
    ModuleKind kind;
    const char* name;
    int arity;
    bool token;
    ValueKind out;
};

constexpr ModuleInfo kModules[] = {
    {ModuleKind::Scene, "scene", 0, false, ValueKind::Attention},
    {ModuleKind::Filter, "filter", 1, true, ValueKind::Attention},
    {ModuleKind::Relate, "relate", 1, true, ValueKind::Attention},
    {ModuleKind::Same, "same", 1, true, ValueKind::Attention},
    {ModuleKind::Intersect, "intersect", 2, false, ValueKind::Attention},
    {ModuleKind::Union, "union", 2, false, ValueKind::Attention},
    {ModuleKind::Unique, "unique", 1, false, ValueKind::Attention},
    {ModuleKind::Exist, "exist", 1, false, ValueKind::Feature},
    {ModuleKind::Count, "count", 1, false, ValueKind::Feature},
    {ModuleKind::Describe, "describe", 1, true, ValueKind::Feature},
    {ModuleKind::Compare, "compare", 2, true, ValueKind::Feature},
};

const ModuleInfo& info(ModuleKind kind) {
    for (const auto& m : kModules)
        if (m.kind == kind) return m;
    throw std::logic_error("unknown module kind");
}

const ModuleInfo* info_by_name(const std::string& name) {
    for (const auto& m : kModules)
        if (name == m.name) return &m;
    return nullptr;
}

}  // namespace

const char* module_name(ModuleKind kind) { return info(kind).name; }
ValueKind output_kind(ModuleKind kind) { return info(kind).out; }
bool takes_token(ModuleKind kind) { return info(kind).token; }
int arity(ModuleKind kind) { return info(kind).arity; }

int Expr::node_count() const {
    int n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Program run() {
        Expr root = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(static_cast<int>(pos_), "expected end of input");
        if (output_kind(root.module) != ValueKind::Feature) {
            throw ParseError(root.offset, "root module must produce a feature value");
        }
        return {std::move(root)};
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            throw ParseError(static_cast<int>(pos_), what);
        }
        ++pos_;
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool token_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }

    Expr expr() {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
            throw ParseError(static_cast<int>(pos_), "expected expression");
        }
        const int start = static_cast<int>(pos_);
        std::string name;
        while (pos_ < text_.size() && ident_char(text_[pos_])) name += text_[pos_++];
        const ModuleInfo* mod = info_by_name(name);
        if (!mod) throw ParseError(start, "unknown module '" + name + "'");

        Expr node;
        node.module = mod->kind;
        node.offset = start;

        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '[') {
            const int bracket = static_cast<int>(pos_);
            if (!mod->token) {
                throw ParseError(bracket, std::string("module '") + mod->name +
                                              "' does not take a bracket token");
            }
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && token_char(text_[pos_])) node.token += text_[pos_++];
            if (node.token.empty()) throw ParseError(static_cast<int>(pos_), "expected token");
            expect(']', "expected ']'");
        } else if (mod->token) {
            throw ParseError(static_cast<int>(pos_),
                             std::string("module '") + mod->name + "' requires a bracket token");
        }

        expect('(', "expected '('");
        if (!peek_is(')')) {
            node.children.push_back(expr());
            while (peek_is(',')) {
                ++pos_;
                node.children.push_back(expr());
            }
        }
        expect(')', "expected ')'");

        if (static_cast<int>(node.children.size()) != mod->arity) {
            throw ParseError(start, std::string("module '") + mod->name + "' takes " +
                                        std::to_string(mod->arity) + " argument(s), got " +
                                        std::to_string(node.children.size()));
        }
        const ValueKind want =
            mod->kind == ModuleKind::Compare ? ValueKind::Feature : ValueKind::Attention;
        for (const auto& child : node.children) {
            if (output_kind(child.module) != want) {
                throw ParseError(child.offset,
                                 std::string("module '") + mod->name + "' expects " +
                                     (want == ValueKind::Attention ? "attention" : "feature") +
                                     " arguments");
            }
        }
        return node;
    }
};

void print_expr(const Expr& e, std::string& out) {
    out += module_name(e.module);
    if (!e.token.empty()) {
        out += '[';
        out += e.token;
        out += ']';
    }
    out += '(';
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ',';
        print_expr(e.children[i], out);
    }
    out += ')';
}

}  // namespace

Program parse(const std::string& text) { return Parser(text).run(); }

std::string print(const Expr& expr) {
    std::string out;
    print_expr(expr, out);
    return out;
}

std::string print(const Program& program) { return print(program.root); }

namespace {

void validate_expr_tokens(const Expr& e, const world::WorldConfig& world,
                          const std::vector<std::string>& values) {
    switch (e.module) {
        case ModuleKind::Filter:
            if (std::find(values.begin(), values.end(), e.token) == values.end()) {
                throw ParseError(e.offset, "unknown attribute value '" + e.token + "'");
            }
            break;
        case ModuleKind::Relate: {
            bool ok = false;
            for (const char* r : world::kRelations) ok = ok || e.token == r;
            if (!ok) throw ParseError(e.offset, "unknown relation '" + e.token + "'");
            break;
        }
        case ModuleKind::Same:
        case ModuleKind::Describe: {
            bool ok = false;
            for (const char* c : world::kCategories) ok = ok || e.token == c;
            if (!ok) throw ParseError(e.offset, "unknown category '" + e.token + "'");
            break;
        }
        case ModuleKind::Compare: {
            auto [kind, category] = engine::parse_compare_token(e.token);
            if (!category.empty()) {
                if (kind != engine::CompareKind::EqAttr) {
                    throw ParseError(e.offset, "only eq_attr takes a category");
                }
                bool ok = false;
                for (const char* c : world::kCategories) ok = ok || category == c;
                if (!ok) throw ParseError(e.offset, "unknown category '" + category + "'");
            }
            break;
        }
        default:
            break;
    }
    for (const auto& child : e.children) validate_expr_tokens(child, world, values);
}

}  // namespace

void validate_tokens(const Program& program, const world::WorldConfig& world) {
    const auto values = world.attribute_values();
    try {
        validate_expr_tokens(program.root, world, values);
    } catch (const std::invalid_argument& err) {
        throw ParseError(0, err.what());
    }
}

}  // namespace xnm::dsl
