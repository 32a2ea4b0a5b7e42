#pragma once

#include "xnm/tensor.hpp"

namespace xnm::ad {

struct AdamState {
    float lr = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float epsilon = 1e-8f;
    long step_count = 0;
};

/// Adam with bias correction. Gradients are zeroed after each step.
class Adam {
public:
    explicit Adam(float lr = 1e-3f) { state_.lr = lr; }

    void add_parameter(const TensorPtr& p);
    void set_lr(float lr) { state_.lr = lr; }
    float lr() const { return state_.lr; }
    const AdamState& state() const { return state_; }

    void step();
    void zero_grad();

private:
    AdamState state_;
    std::vector<TensorPtr> params_;
    std::vector<std::vector<float>> m_;
    std::vector<std::vector<float>> v_;
};

}  // namespace xnm::ad
