#include "xnm/executor.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace xnm::runtime {

using dsl::Expr;
using dsl::ModuleKind;
using engine::Context;
using engine::FeatureValue;
using engine::NodeAttention;

namespace {

struct Value {
    bool is_attention = false;
    NodeAttention attention;
    FeatureValue feature;
};

struct Executor {
    Context ctx;
    Trace* trace;

    int record(const Expr& e, const std::vector<int>& inputs, const Value& v) {
        if (!trace) return -1;
        TraceStep step;
        step.module = dsl::module_name(e.module);
        step.token = e.token;
        step.inputs = inputs;
        step.kind = v.is_attention ? "attention" : "feature";
        const auto& t = v.is_attention ? v.attention.a : v.feature.h;
        step.values = t->data;
        trace->steps.push_back(std::move(step));
        return static_cast<int>(trace->steps.size()) - 1;
    }

    std::pair<Value, int> eval(const Expr& e) {
        std::vector<Value> args;
        std::vector<int> arg_steps;
        for (const auto& child : e.children) {
            auto [v, step] = eval(child);
            args.push_back(std::move(v));
            arg_steps.push_back(step);
        }
        Value out;
        switch (e.module) {
            case ModuleKind::Scene:
                out.is_attention = true;
                out.attention = engine::scene_module(ctx);
                break;
            case ModuleKind::Filter:
                out.is_attention = true;
                out.attention = engine::filter(ctx, args[0].attention, ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Relate:
                out.is_attention = true;
                out.attention = engine::relate(ctx, args[0].attention, ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Same:
                out.is_attention = true;
                out.attention = engine::same(ctx, args[0].attention, ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Intersect:
                out.is_attention = true;
                out.attention = engine::intersect(ctx, args[0].attention, args[1].attention);
                break;
            case ModuleKind::Union:
                out.is_attention = true;
                out.attention = engine::union_(ctx, args[0].attention, args[1].attention);
                break;
            case ModuleKind::Unique:
                out.is_attention = true;
                out.attention = args[0].attention;  // placeholder, no actual operation
                break;
            case ModuleKind::Exist:
                out.feature = engine::exist(ctx, args[0].attention);
                break;
            case ModuleKind::Count:
                out.feature = engine::count(ctx, args[0].attention);
                break;
            case ModuleKind::Describe:
                out.feature = engine::describe(ctx, args[0].attention, ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Compare: {
                const auto kind = engine::parse_compare_token(e.token).first;
                out.feature = engine::compare(ctx, kind, args[0].feature, args[1].feature);
                break;
            }
        }
        return {out, record(e, arg_steps, out)};
    }
};

}  // namespace

ExecResult execute(ad::Tape& tape, const dsl::Program& program, const world::SceneGraph& graph,
                   const engine::Parameters& params, bool want_trace) {
    engine::check_backend({tape, graph, params});
    ExecResult result;
    Executor exec{Context{tape, graph, params}, want_trace ? &result.trace : nullptr};
    auto [value, step] = exec.eval(program.root);
    if (value.is_attention) {
        throw std::invalid_argument("program root must produce a feature value");
    }
    result.logits = engine::classify(exec.ctx, value.feature);
    if (want_trace) result.trace.logits = result.logits->data;
    return result;
}

namespace {

// %.6f keeps the dump byte-stable and bounded in size
void append_rounded(std::string& out, float v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(v));
    out += buf;
}

}  // namespace

std::string dump_trace(const Trace& trace) {
    std::string out = "{\"steps\":[";
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const auto& step = trace.steps[s];
        if (s) out += ',';
        out += "{\"module\":\"" + step.module + "\"";
        if (!step.token.empty()) out += ",\"token\":\"" + step.token + "\"";
        out += ",\"inputs\":[";
        for (std::size_t i = 0; i < step.inputs.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(step.inputs[i]);
        }
        out += "],\"kind\":\"" + step.kind + "\",\"values\":[";
        for (std::size_t i = 0; i < step.values.size(); ++i) {
            if (i) out += ',';
            append_rounded(out, step.values[i]);
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

namespace {

struct HardValue {
    enum class Tag { Attention, Number, Label, YesNo } tag;
    NodeAttention attention;
    int number = 0;
    std::string text;
};

struct HardExecutor {
    Context ctx;

    HardValue eval(const Expr& e) {
        switch (e.module) {
            case ModuleKind::Exist: {
                auto a = eval(e.children[0]);
                float total = 0.0f;
                for (float v : a.attention.a->data) total += v;
                return {HardValue::Tag::YesNo, {}, 0, total >= 0.5f ? "yes" : "no"};
            }
            case ModuleKind::Count: {
                auto a = eval(e.children[0]);
                float total = 0.0f;
                for (float v : a.attention.a->data) total += v;
                return {HardValue::Tag::Number, {}, static_cast<int>(std::lround(total)), ""};
            }
            case ModuleKind::Describe: {
                auto a = eval(e.children[0]);
                auto h = engine::describe(ctx, a.attention, ctx.params.query(ctx.tape, e.token));
                int best = 0;
                for (std::size_t i = 1; i < h.h->data.size(); ++i)
                    if (h.h->data[i] > h.h->data[best]) best = static_cast<int>(i);
                return {HardValue::Tag::Label, {}, 0, ctx.params.dict.labels[best]};
            }
            case ModuleKind::Compare: {
                const auto kind = engine::parse_compare_token(e.token).first;
                auto lhs = eval(e.children[0]);
                auto rhs = eval(e.children[1]);
                bool yes = false;
                switch (kind) {
                    case engine::CompareKind::EqInt: yes = lhs.number == rhs.number; break;
                    case engine::CompareKind::Greater: yes = lhs.number > rhs.number; break;
                    case engine::CompareKind::Less: yes = lhs.number < rhs.number; break;
                    case engine::CompareKind::EqAttr: yes = lhs.text == rhs.text; break;
                }
                return {HardValue::Tag::YesNo, {}, 0, yes ? "yes" : "no"};
            }
            default: break;
        }
        HardValue out;
        out.tag = HardValue::Tag::Attention;
        switch (e.module) {
            case ModuleKind::Scene:
                out.attention = engine::scene_module(ctx);
                break;
            case ModuleKind::Filter:
                out.attention = engine::filter(ctx, eval(e.children[0]).attention,
                                               ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Relate:
                out.attention = engine::relate(ctx, eval(e.children[0]).attention,
                                               ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Same:
                out.attention = engine::same(ctx, eval(e.children[0]).attention,
                                             ctx.params.query(ctx.tape, e.token));
                break;
            case ModuleKind::Intersect:
                out.attention = engine::intersect(ctx, eval(e.children[0]).attention,
                                                  eval(e.children[1]).attention);
                break;
            case ModuleKind::Union:
                out.attention = engine::union_(ctx, eval(e.children[0]).attention,
                                               eval(e.children[1]).attention);
                break;
            case ModuleKind::Unique:
                out.attention = eval(e.children[0]).attention;
                break;
            default:
                throw std::logic_error("hard executor: unexpected module");
        }
        return out;
    }
};

}  // namespace

std::string hard_answer(const dsl::Program& program, const world::SceneGraph& graph,
                        const engine::Parameters& params) {
    ad::Tape tape;
    tape.grad_enabled = false;
    HardExecutor exec{Context{tape, graph, params}};
    HardValue v = exec.eval(program.root);
    switch (v.tag) {
        case HardValue::Tag::Number: return std::to_string(v.number);
        case HardValue::Tag::Label:
        case HardValue::Tag::YesNo: return v.text;
        default: throw std::invalid_argument("program root must produce a feature value");
    }
}

}  // namespace xnm::runtime
