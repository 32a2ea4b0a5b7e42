#pragma once

#include <string>
#include <vector>

#include "xnm/modules.hpp"
#include "xnm/program.hpp"

namespace xnm::runtime {

struct TraceStep {
    std::string module;
    std::string token;           // empty when the module takes none
    std::vector<int> inputs;     // step indices of the children
    std::string kind;            // "attention" | "feature"
    std::vector<float> values;
};

struct Trace {
    std::vector<TraceStep> steps;  // one per program node, post-order
    std::vector<float> logits;     // classifier output over the answers
};

struct ExecResult {
    ad::TensorPtr logits;
    Trace trace;
};

/// Post-order evaluation of the program through the engine modules, ending
/// in the answer classifier. Records every intermediate value when tracing.
ExecResult execute(ad::Tape& tape, const dsl::Program& program, const world::SceneGraph& graph,
                   const engine::Parameters& params, bool want_trace = true);

/// Trace JSON: {"steps":[{"module","token","inputs","kind","values"},...]};
/// values rounded to 6 decimals, byte-stable for a fixed trace.
std::string dump_trace(const Trace& trace);

/// Hard-mode answer: attention modules run through the engine (use with
/// Parameters::symbolic), output modules decoded exactly (threshold 0.5,
/// rounded counts, argmax label readout).
std::string hard_answer(const dsl::Program& program, const world::SceneGraph& graph,
                        const engine::Parameters& params);

}  // namespace xnm::runtime
