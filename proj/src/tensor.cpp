#include "xnm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace xnm::ad {

std::int64_t numel_of(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

std::string shape_to_string(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

TensorPtr Tensor::create(std::vector<int> shape, std::vector<float> data, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    if (numel_of(shape) != static_cast<std::int64_t>(data.size())) {
        throw std::invalid_argument("tensor: shape " + shape_to_string(shape) + " does not match " +
                                    std::to_string(data.size()) + " values");
    }
    t->shape = std::move(shape);
    t->data = std::move(data);
    t->requires_grad = requires_grad;
    if (requires_grad) t->ensure_grad();
    return t;
}

TensorPtr Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto n = numel_of(shape);
    return create(std::move(shape), std::vector<float>(n, 0.0f), requires_grad);
}

TensorPtr Tensor::full(std::vector<int> shape, float value, bool requires_grad) {
    auto n = numel_of(shape);
    return create(std::move(shape), std::vector<float>(n, value), requires_grad);
}

TensorPtr Tensor::scalar(float value, bool requires_grad) {
    return create({1}, {value}, requires_grad);
}

std::int64_t Tensor::numel() const {
    return static_cast<std::int64_t>(data.size());
}

int Tensor::rows() const {
    if (shape.size() != 2) throw std::invalid_argument("rows(): tensor is not rank-2");
    return shape[0];
}

int Tensor::cols() const {
    if (shape.size() != 2) throw std::invalid_argument("cols(): tensor is not rank-2");
    return shape[1];
}

float Tensor::at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols() + c];
}

void Tensor::ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0f);
}

void Tensor::zero_grad() {
    std::fill(grad.begin(), grad.end(), 0.0f);
}

std::string Tensor::shape_str() const {
    return shape_to_string(shape);
}

namespace {

void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->shape != b->shape) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a->shape_str() +
                                    " vs " + b->shape_str());
    }
}

}  // namespace

// Allocates the op output and, when gradients are needed, reserves a tape
// slot whose backprop rule the caller fills in via nodes_.back().
TensorPtr Tape::make(std::vector<int> shape, std::vector<float> data,
                     const std::vector<TensorPtr>& inputs) {
    bool needs = false;
    if (grad_enabled) {
        for (const auto& in : inputs) needs = needs || in->requires_grad;
    }
    auto out = Tensor::create(std::move(shape), std::move(data), needs);
    if (needs) {
        for (const auto& in : inputs) {
            if (in->requires_grad) in->ensure_grad();
        }
        nodes_.push_back({nullptr});
    }
    return out;
}

TensorPtr Tape::matmul(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[0]) {
        throw std::invalid_argument("matmul: incompatible shapes " + a->shape_str() + " and " +
                                    b->shape_str());
    }
    const int m = a->shape[0], k = a->shape[1], n = b->shape[1];
    std::vector<float> out(static_cast<std::size_t>(m) * n, 0.0f);
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const float av = a->data[static_cast<std::size_t>(i) * k + p];
            if (av == 0.0f) continue;
            const float* brow = &b->data[static_cast<std::size_t>(p) * n];
            float* orow = &out[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    TensorPtr result;
    result = make({m, n}, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result, m, k, n]() {
            // a.grad += g * b^T ; b.grad += a^T * g
            if (a->requires_grad) {
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < k; ++p) {
                        float acc = 0.0f;
                        for (int j = 0; j < n; ++j)
                            acc += result->grad[static_cast<std::size_t>(i) * n + j] *
                                   b->data[static_cast<std::size_t>(p) * n + j];
                        a->grad[static_cast<std::size_t>(i) * k + p] += acc;
                    }
            }
            if (b->requires_grad) {
                for (int p = 0; p < k; ++p)
                    for (int j = 0; j < n; ++j) {
                        float acc = 0.0f;
                        for (int i = 0; i < m; ++i)
                            acc += a->data[static_cast<std::size_t>(i) * k + p] *
                                   result->grad[static_cast<std::size_t>(i) * n + j];
                        b->grad[static_cast<std::size_t>(p) * n + j] += acc;
                    }
            }
        };
    }
    return result;
}

TensorPtr Tape::transpose(const TensorPtr& a) {
    const int m = a->rows(), n = a->cols();
    std::vector<float> out(a->data.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<std::size_t>(j) * m + i] = a->data[static_cast<std::size_t>(i) * n + j];
    TensorPtr result;
    result = make({n, m}, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result, m, n]() {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    a->grad[static_cast<std::size_t>(i) * n + j] +=
                        result->grad[static_cast<std::size_t>(j) * m + i];
        };
    }
    return result;
}

TensorPtr Tape::reshape(const TensorPtr& a, std::vector<int> new_shape) {
    if (numel_of(new_shape) != a->numel()) {
        throw std::invalid_argument("reshape: element count mismatch " + a->shape_str() + " to " +
                                    shape_to_string(new_shape));
    }
    TensorPtr result;
    result = make(std::move(new_shape), a->data, {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::add(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "add");
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] + b->data[i];
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] += result->grad[i];
            if (b->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i) b->grad[i] += result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::sub(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "sub");
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] - b->data[i];
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] += result->grad[i];
            if (b->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i) b->grad[i] -= result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::mul(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "mul");
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] * b->data[i];
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    a->grad[i] += result->grad[i] * b->data[i];
            if (b->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    b->grad[i] += result->grad[i] * a->data[i];
        };
    }
    return result;
}

TensorPtr Tape::add_rowwise(const TensorPtr& a, const TensorPtr& bias) {
    const int m = a->rows(), n = a->cols();
    if (bias->shape != std::vector<int>{n}) {
        throw std::invalid_argument("add_rowwise: bias " + bias->shape_str() +
                                    " does not match row width of " + a->shape_str());
    }
    std::vector<float> out(a->data.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<std::size_t>(i) * n + j] =
                a->data[static_cast<std::size_t>(i) * n + j] + bias->data[j];
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, bias});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, bias, result, m, n]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] += result->grad[i];
            if (bias->requires_grad)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j)
                        bias->grad[j] += result->grad[static_cast<std::size_t>(i) * n + j];
        };
    }
    return result;
}

TensorPtr Tape::mul_scalar(const TensorPtr& a, const TensorPtr& s) {
    if (!s->is_scalar()) throw std::invalid_argument("mul_scalar: multiplier is not scalar");
    const float sv = s->data[0];
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] * sv;
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, s});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, s, result, sv]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    a->grad[i] += result->grad[i] * sv;
            if (s->requires_grad) {
                float acc = 0.0f;
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    acc += result->grad[i] * a->data[i];
                s->grad[0] += acc;
            }
        };
    }
    return result;
}

TensorPtr Tape::div_scalar(const TensorPtr& a, const TensorPtr& s) {
    if (!s->is_scalar()) throw std::invalid_argument("div_scalar: divisor is not scalar");
    const float sv = s->data[0];
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] / sv;
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, s});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, s, result, sv]() {
            if (a->requires_grad)
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    a->grad[i] += result->grad[i] / sv;
            if (s->requires_grad) {
                float acc = 0.0f;
                for (std::size_t i = 0; i < result->grad.size(); ++i)
                    acc += result->grad[i] * a->data[i];
                s->grad[0] -= acc / (sv * sv);
            }
        };
    }
    return result;
}

TensorPtr Tape::scale(const TensorPtr& a, float c) {
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] * c;
    TensorPtr result;
    result = make(a->shape, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result, c]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] += result->grad[i] * c;
        };
    }
    return result;
}

TensorPtr Tape::add_const(const TensorPtr& a, float c) {
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] + c;
    TensorPtr result;
    result = make(a->shape, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] += result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::sum(const TensorPtr& a) {
    float acc = 0.0f;
    for (float v : a->data) acc += v;
    TensorPtr result;
    result = make({1}, {acc}, {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += result->grad[0];
        };
    }
    return result;
}

TensorPtr Tape::max_reduce(const TensorPtr& a) {
    if (a->numel() == 0) throw std::invalid_argument("max_reduce: empty tensor");
    float best = a->data[0];
    for (float v : a->data) best = std::max(best, v);
    TensorPtr result;
    result = make({1}, {best}, {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result, best]() {
            int ties = 0;
            for (float v : a->data) ties += (v == best);
            const float share = result->grad[0] / static_cast<float>(ties);
            for (std::size_t i = 0; i < a->data.size(); ++i)
                if (a->data[i] == best) a->grad[i] += share;
        };
    }
    return result;
}

TensorPtr Tape::minimum(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "min");
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a->data[i], b->data[i]);
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result]() {
            // gradient goes to the selected input; exact ties split 50/50
            for (std::size_t i = 0; i < result->grad.size(); ++i) {
                const float g = result->grad[i];
                if (a->data[i] == b->data[i]) {
                    if (a->requires_grad) a->grad[i] += 0.5f * g;
                    if (b->requires_grad) b->grad[i] += 0.5f * g;
                } else if (a->data[i] < b->data[i]) {
                    if (a->requires_grad) a->grad[i] += g;
                } else {
                    if (b->requires_grad) b->grad[i] += g;
                }
            }
        };
    }
    return result;
}

TensorPtr Tape::maximum(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "max");
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(a->data[i], b->data[i]);
    TensorPtr result;
    result = make(a->shape, std::move(out), {a, b});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, b, result]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i) {
                const float g = result->grad[i];
                if (a->data[i] == b->data[i]) {
                    if (a->requires_grad) a->grad[i] += 0.5f * g;
                    if (b->requires_grad) b->grad[i] += 0.5f * g;
                } else if (a->data[i] > b->data[i]) {
                    if (a->requires_grad) a->grad[i] += g;
                } else {
                    if (b->requires_grad) b->grad[i] += g;
                }
            }
        };
    }
    return result;
}

TensorPtr Tape::one_minus(const TensorPtr& a) {
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0f - a->data[i];
    TensorPtr result;
    result = make(a->shape, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i) a->grad[i] -= result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::relu(const TensorPtr& a) {
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] > 0.0f ? a->data[i] : 0.0f;
    TensorPtr result;
    result = make(a->shape, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i)
                if (a->data[i] > 0.0f) a->grad[i] += result->grad[i];
        };
    }
    return result;
}

TensorPtr Tape::sigmoid(const TensorPtr& a) {
    std::vector<float> out(a->data.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const float x = a->data[i];
        // branch keeps exp() argument negative, so no overflow either way
        out[i] = x >= 0.0f ? 1.0f / (1.0f + std::exp(-x))
                           : std::exp(x) / (1.0f + std::exp(x));
    }
    TensorPtr result;
    result = make(a->shape, std::move(out), {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result]() {
            for (std::size_t i = 0; i < result->grad.size(); ++i) {
                const float y = result->data[i];
                a->grad[i] += result->grad[i] * y * (1.0f - y);
            }
        };
    }
    return result;
}

TensorPtr Tape::softmax(const TensorPtr& x) {
    if (x->numel() < 1) throw std::invalid_argument("softmax: empty input");
    float m = x->data[0];
    for (float v : x->data) m = std::max(m, v);
    std::vector<float> out(x->data.size());
    float denom = 0.0f;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(x->data[i] - m);
        denom += out[i];
    }
    for (float& v : out) v /= denom;
    TensorPtr result;
    result = make(x->shape, std::move(out), {x});
    if (result->requires_grad) {
        nodes_.back().backprop = [x, result]() {
            float dot = 0.0f;
            for (std::size_t i = 0; i < result->grad.size(); ++i)
                dot += result->grad[i] * result->data[i];
            for (std::size_t i = 0; i < result->grad.size(); ++i)
                x->grad[i] += result->data[i] * (result->grad[i] - dot);
        };
    }
    return result;
}

TensorPtr Tape::index(const TensorPtr& a, int i) {
    if (i < 0 || i >= a->numel()) throw std::invalid_argument("index: out of range");
    TensorPtr result;
    result = make({1}, {a->data[static_cast<std::size_t>(i)]}, {a});
    if (result->requires_grad) {
        nodes_.back().backprop = [a, result, i]() {
            a->grad[static_cast<std::size_t>(i)] += result->grad[0];
        };
    }
    return result;
}

TensorPtr Tape::gather_rows(const TensorPtr& m, std::vector<int> row_indices) {
    const int rows = m->rows(), cols = m->cols();
    std::vector<float> out;
    out.reserve(row_indices.size() * cols);
    for (int r : row_indices) {
        if (r < 0 || r >= rows) throw std::invalid_argument("gather_rows: row out of range");
        const float* src = &m->data[static_cast<std::size_t>(r) * cols];
        out.insert(out.end(), src, src + cols);
    }
    TensorPtr result;
    result = make({static_cast<int>(row_indices.size()), cols}, std::move(out), {m});
    if (result->requires_grad) {
        nodes_.back().backprop = [m, result, idx = std::move(row_indices), cols]() {
            for (std::size_t k = 0; k < idx.size(); ++k)
                for (int j = 0; j < cols; ++j)
                    m->grad[static_cast<std::size_t>(idx[k]) * cols + j] +=
                        result->grad[k * cols + j];
        };
    }
    return result;
}

TensorPtr Tape::cross_entropy(const TensorPtr& logits, int target) {
    const auto n = logits->numel();
    if (target < 0 || target >= n) throw std::invalid_argument("cross_entropy: target out of range");
    float m = logits->data[0];
    for (float v : logits->data) m = std::max(m, v);
    float denom = 0.0f;
    for (float v : logits->data) denom += std::exp(v - m);
    const float loss = std::log(denom) - (logits->data[static_cast<std::size_t>(target)] - m);
    TensorPtr result;
    result = make({1}, {loss}, {logits});
    if (result->requires_grad) {
        nodes_.back().backprop = [logits, result, target, m, denom]() {
            const float g = result->grad[0];
            for (std::size_t i = 0; i < logits->data.size(); ++i) {
                float p = std::exp(logits->data[i] - m) / denom;
                if (static_cast<int>(i) == target) p -= 1.0f;
                logits->grad[i] += g * p;
            }
        };
    }
    return result;
}

void Tape::backward(const TensorPtr& loss, float seed) {
    if (!loss->is_scalar()) throw std::invalid_argument("backward: loss is not scalar");
    if (!loss->requires_grad) return;  // constant loss: every gradient stays zero
    loss->ensure_grad();
    loss->grad[0] += seed;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backprop();
}

}  // namespace xnm::ad
