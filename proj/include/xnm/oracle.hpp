#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xnm/program.hpp"
#include "xnm/scene.hpp"

namespace xnm::dsl {

/// Program is ill-posed for the given scene (e.g. describe over a set that
/// is not a single object). The generator never emits these.
class IllPosed : public std::runtime_error {
public:
    explicit IllPosed(const std::string& what) : std::runtime_error(what) {}
};

/// Exact set evaluation of an attention expression: indices of selected
/// objects, sorted ascending.
std::vector<int> oracle_attention(const Expr& expr, const world::Scene& scene);

/// Exact answer under brute-force set semantics.
std::string oracle(const Program& program, const world::Scene& scene);

}  // namespace xnm::dsl
