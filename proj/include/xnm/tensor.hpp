#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace xnm::ad {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

/// Dense row-major float32 tensor. Data is immutable after construction
/// except for the grad buffer, which backward() accumulates into.
class Tensor {
public:
    std::vector<int> shape;
    std::vector<float> data;
    std::vector<float> grad;  // same length as data once allocated
    bool requires_grad = false;

    static TensorPtr create(std::vector<int> shape, std::vector<float> data,
                            bool requires_grad = false);
    static TensorPtr zeros(std::vector<int> shape, bool requires_grad = false);
    static TensorPtr full(std::vector<int> shape, float value, bool requires_grad = false);
    static TensorPtr scalar(float value, bool requires_grad = false);

    std::int64_t numel() const;
    bool is_scalar() const { return numel() == 1; }
    int rows() const;
    int cols() const;
    float at(int r, int c) const;

    void ensure_grad();
    void zero_grad();
    std::string shape_str() const;
};

std::int64_t numel_of(const std::vector<int>& shape);
std::string shape_to_string(const std::vector<int>& shape);

/// Records one forward pass; backward() replays the recorded ops in
/// reverse. Single-threaded; one tape per execution.
class Tape {
public:
    /// When false, ops still compute forward values but record nothing.
    bool grad_enabled = true;

    TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
    TensorPtr transpose(const TensorPtr& a);
    TensorPtr reshape(const TensorPtr& a, std::vector<int> new_shape);
    TensorPtr add(const TensorPtr& a, const TensorPtr& b);
    TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
    TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
    TensorPtr add_rowwise(const TensorPtr& a, const TensorPtr& bias);
    TensorPtr mul_scalar(const TensorPtr& a, const TensorPtr& s);
    TensorPtr div_scalar(const TensorPtr& a, const TensorPtr& s);
    TensorPtr scale(const TensorPtr& a, float c);
    TensorPtr add_const(const TensorPtr& a, float c);
    TensorPtr sum(const TensorPtr& a);
    TensorPtr max_reduce(const TensorPtr& a);
    TensorPtr minimum(const TensorPtr& a, const TensorPtr& b);
    TensorPtr maximum(const TensorPtr& a, const TensorPtr& b);
    TensorPtr one_minus(const TensorPtr& a);
    TensorPtr relu(const TensorPtr& a);
    TensorPtr sigmoid(const TensorPtr& a);
    TensorPtr softmax(const TensorPtr& x);
    TensorPtr index(const TensorPtr& a, int i);
    TensorPtr gather_rows(const TensorPtr& m, std::vector<int> row_indices);
    TensorPtr cross_entropy(const TensorPtr& logits, int target);

    /// Seeds d(loss)/d(loss) = seed and accumulates gradients into every
    /// requires_grad tensor reachable backwards from loss. Repeated calls
    /// accumulate; callers reset grads between steps.
    void backward(const TensorPtr& loss, float seed = 1.0f);

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    struct Node {
        std::function<void()> backprop;
    };
    std::vector<Node> nodes_;

    TensorPtr make(std::vector<int> shape, std::vector<float> data,
                   const std::vector<TensorPtr>& inputs);
};

}  // namespace xnm::ad
