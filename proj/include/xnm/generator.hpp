#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "xnm/oracle.hpp"
#include "xnm/program.hpp"
#include "xnm/scene.hpp"

namespace xnm::dsl {

enum class Family { Count, Exist, CompareNumbers, QueryAttribute, CompareAttribute };

inline constexpr std::array<Family, 5> kFamilies = {Family::Count, Family::Exist,
                                                    Family::CompareNumbers,
                                                    Family::QueryAttribute,
                                                    Family::CompareAttribute};

const char* family_name(Family f);
Family family_from_string(const std::string& name);

struct GeneratedQuestion {
    Program program;
    std::string answer;
    Family family;
};

/// Scene cannot support the requested family (too small / too uniform):
/// 1000 template draws were rejected.
class TemplateExhausted : public std::runtime_error {
public:
    explicit TemplateExhausted(const std::string& what) : std::runtime_error(what) {}
};

/// Samples a well-posed (program, answer) pair for the family. Chains stay
/// within depth 4; subchains feeding relate/same/describe select exactly
/// one object under oracle semantics.
GeneratedQuestion generate(const world::Scene& scene, Family family,
                           const world::WorldConfig& world, std::mt19937& rng);

/// Running per-family answer histogram used to keep generated datasets
/// balanced (yes/no families near 50/50, counts spread out).
class BalanceTracker {
public:
    bool accept(Family family, const std::string& answer) const;
    void add(Family family, const std::string& answer);
    const std::unordered_map<std::string, int>& histogram(Family family) const;

private:
    std::array<std::unordered_map<std::string, int>, 5> counts_;
    std::array<int, 5> totals_{};
};

}  // namespace xnm::dsl
