#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xnm/scene.hpp"

namespace xnm::dsl {

enum class ModuleKind {
    Scene,
    Filter,
    Relate,
    Same,
    Intersect,
    Union,
    Unique,
    Exist,
    Count,
    Describe,
    Compare,
};

enum class ValueKind { Attention, Feature };

const char* module_name(ModuleKind kind);
ValueKind output_kind(ModuleKind kind);
bool takes_token(ModuleKind kind);
int arity(ModuleKind kind);

struct Expr {
    ModuleKind module = ModuleKind::Scene;
    std::string token;
    std::vector<Expr> children;
    int offset = 0;  // byte offset of the module name in the source

    int node_count() const;
};

struct Program {
    Expr root;
};

/// Parse or validation failure, carrying the byte offset and what was
/// expected there.
class ParseError : public std::runtime_error {
public:
    ParseError(int offset, const std::string& expected)
        : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + expected),
          offset(offset),
          expected(expected) {}

    int offset;
    std::string expected;
};

/// expr := IDENT ('[' TOKEN ']')? '(' (expr (',' expr)*)? ')'
/// Whitespace-insensitive. Checks module names, arity, token presence and
/// value kinds; the root must produce a Feature.
Program parse(const std::string& text);

/// Canonical text: no whitespace, single bracket-token form. Inverse of parse.
std::string print(const Program& program);
std::string print(const Expr& expr);

/// Vocabulary-level checks: relate tokens must be relations, same/describe
/// tokens categories, compare tokens valid kinds, filter tokens attribute
/// values of the given world.
void validate_tokens(const Program& program, const world::WorldConfig& world);

}  // namespace xnm::dsl
