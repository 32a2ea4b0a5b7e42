#include "xnm/adam.hpp"

#include <cmath>

namespace xnm::ad {

void Adam::add_parameter(const TensorPtr& p) {
    if (!p->requires_grad) {
        throw std::invalid_argument("adam: parameter does not require gradients");
    }
    p->ensure_grad();
    params_.push_back(p);
    m_.emplace_back(p->data.size(), 0.0f);
    v_.emplace_back(p->data.size(), 0.0f);
}

void Adam::step() {
    state_.step_count += 1;
    const float t = static_cast<float>(state_.step_count);
    const float bc1 = 1.0f - std::pow(state_.beta1, t);
    const float bc2 = 1.0f - std::pow(state_.beta2, t);
    for (std::size_t k = 0; k < params_.size(); ++k) {
        Tensor& p = *params_[k];
        if (p.grad.size() != p.data.size()) {
            throw std::runtime_error("adam: missing gradient on registered parameter");
        }
        auto& m = m_[k];
        auto& v = v_[k];
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const float g = p.grad[i];
            m[i] = state_.beta1 * m[i] + (1.0f - state_.beta1) * g;
            v[i] = state_.beta2 * v[i] + (1.0f - state_.beta2) * g * g;
            const float mhat = m[i] / bc1;
            const float vhat = v[i] / bc2;
            p.data[i] -= state_.lr * mhat / (std::sqrt(vhat) + state_.epsilon);
        }
        p.zero_grad();
    }
}

void Adam::zero_grad() {
    for (auto& p : params_) p->zero_grad();
}

}  // namespace xnm::ad
