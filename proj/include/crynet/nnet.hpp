#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crynet/tensor.hpp"

namespace crynet::nnet {

// ---------------------------------------------------------------------------
// Layer primitives. Forward/backward pairs over HWC tensors; gradients are
// hand-derived and checked against central finite differences in the tests.
// ---------------------------------------------------------------------------

// Cross-correlation (no kernel flip). Weights are (k, k, in_ch*out_ch) with
// layout ((ky*k + kx)*in_ch + ci)*out_ch + f, i.e. filters contiguous, so the
// inner loops are axpy/dot over the filter axis. Bias is flat (out_ch).
// Output spatial dims: floor((in + 2*pad - k)/stride) + 1.
Tensor conv2d_forward(const Tensor& in, const Tensor& w, const Tensor& b, int stride, int pad);
void conv2d_backward(const Tensor& dout, const Tensor& in, const Tensor& w, int stride, int pad,
                     Tensor& din, Tensor& dw, Tensor& db);

// pad for "same" output at stride 1 (odd k only).
int same_pad(int kernel);

// Non-overlapping by default (stride = pool size). The argmax cache routes the
// backward pass; ties go to the first element in window scan order.
Tensor maxpool_forward(const Tensor& in, int pool, int stride, std::vector<int>* argmax);
Tensor maxpool_backward(const Tensor& dout, const Tensor& in, int pool, int stride,
                        const std::vector<int>& argmax);

Tensor avgpool_forward(const Tensor& in, int pool, int stride);
Tensor avgpool_backward(const Tensor& dout, const Tensor& in, int pool, int stride);

// Weights (1, in_dim, units), bias flat (units).
Tensor dense_forward(const Tensor& in, const Tensor& w, const Tensor& b);
void dense_backward(const Tensor& dout, const Tensor& in, const Tensor& w, Tensor& din, Tensor& dw,
                    Tensor& db);

Tensor relu_forward(const Tensor& in);
Tensor relu_backward(const Tensor& dout, const Tensor& in);

double sigmoid(double x);  // stable for |x| up to ~500
Tensor sigmoid_forward(const Tensor& in);
Tensor sigmoid_backward(const Tensor& dout, const Tensor& out);

// Inverted dropout: kept activations are scaled by 1/keep_prob during
// training so inference runs the identity. The mask is returned for backward.
Tensor dropout_forward(const Tensor& in, double keep_prob, uint64_t rng_seed, Tensor* mask);
Tensor dropout_backward(const Tensor& dout, const Tensor& mask);

Tensor flatten_forward(const Tensor& in);
Tensor flatten_backward(const Tensor& dout, const Tensor& in);

// All inputs must share spatial dims; channels stack in argument order.
Tensor concat_channels_forward(const std::vector<const Tensor*>& ins);
std::vector<Tensor> concat_channels_backward(const Tensor& dout,
                                             const std::vector<const Tensor*>& ins);

// Binary cross-entropy on a clamped probability, plus an optional precomputed
// L2 penalty term. Returns {loss, dloss/dp}.
struct BceResult {
    double loss;
    double dp;
};
BceResult bce_loss(double prediction, double label, double l2_penalty = 0.0);

// ---------------------------------------------------------------------------
// Graph: a small static DAG assembled once, walked for forward/backward.
// ---------------------------------------------------------------------------

enum class LayerKind : uint32_t {
    Input = 0,
    Conv2D = 1,
    MaxPool = 2,
    AvgPool = 3,
    Dense = 4,
    ReLU = 5,
    Sigmoid = 6,
    Dropout = 7,
    Flatten = 8,
    ConcatChannels = 9,
};

const char* layer_kind_name(LayerKind kind);

struct LayerSpec {
    LayerKind kind = LayerKind::Input;
    int filters = 0;       // conv
    int kernel = 0;        // conv
    int stride = 1;        // conv
    bool pad_same = false; // conv
    int pool = 0;          // pools; stride defaults to pool
    int pool_stride = 0;
    int units = 0;         // dense
    double l2 = 0.0;       // dense weight penalty coefficient
    double keep_prob = 1.0;  // dropout

    void validate() const;
};

struct Shape {
    int h = 0, w = 0, c = 0;
    std::string str() const {
        return "(" + std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) + ")";
    }
    bool operator==(const Shape&) const = default;
};

struct Node {
    std::string name;
    LayerSpec spec;
    std::vector<int> inputs;
    Shape out_shape;  // filled by finalize()
    Tensor w, b;      // parameters, empty for parameterless kinds
};

// Per-sample forward state kept for the backward walk.
struct Trace {
    std::vector<Tensor> acts;
    std::vector<Tensor> dropout_masks;
    std::vector<std::vector<int>> pool_argmax;
};

// Parameter gradients aligned with graph nodes.
struct Grads {
    std::vector<Tensor> dw, db;
    void init_like(const class Graph& g);
    void zero();
    void add(const Grads& other);  // fixed-order reduction helper
};

class Graph {
public:
    int add_input(const std::string& name);
    int add(const std::string& name, const LayerSpec& spec, std::vector<int> inputs);

    // Shape inference + He-uniform (fan-in) parameter init from `seed`.
    void finalize(Shape input_shape, uint64_t seed);

    size_t param_count() const;
    size_t node_count() const { return nodes_.size(); }
    const Node& node(int i) const { return nodes_[size_t(i)]; }
    Node& node(int i) { return nodes_[size_t(i)]; }
    Shape input_shape() const { return input_shape_; }
    Shape output_shape() const { return nodes_.back().out_shape; }
    bool finalized() const { return finalized_; }

    // Sum of l2 * ||W||^2 over nodes carrying an L2 coefficient.
    double l2_penalty() const;
    // Adds 2*l2*W into the matching gradient slots.
    void add_l2_gradients(Grads& grads) const;

    Tensor forward(const Tensor& input, bool training, uint64_t dropout_seed,
                   Trace* trace = nullptr) const;
    // Accumulates parameter gradients into `grads` (does not zero them first).
    void backward(const Trace& trace, const Tensor& dout_last, Grads& grads) const;

    // One-line-per-layer description with shapes and parameter counts.
    std::string summary() const;

private:
    friend struct Grads;
    Shape infer_shape(const Node& n) const;

    std::vector<Node> nodes_;
    Shape input_shape_{};
    bool finalized_ = false;
};

// ---------------------------------------------------------------------------
// RMSprop
// ---------------------------------------------------------------------------

struct RmsPropConfig {
    double learning_rate = 0.0001;
    double rho = 0.9;
    double eps = 1e-8;
};

class RmsProp {
public:
    RmsProp(const Graph& g, RmsPropConfig config);
    // acc <- rho*acc + (1-rho)*g^2 ; theta <- theta - lr*g/sqrt(acc+eps).
    // Throws DivergenceError naming the node if a gradient is non-finite.
    void step(Graph& g, const Grads& grads);
    const RmsPropConfig& config() const { return cfg_; }
    const std::vector<Tensor>& acc_w() const { return acc_w_; }
    const std::vector<Tensor>& acc_b() const { return acc_b_; }

private:
    RmsPropConfig cfg_;
    std::vector<Tensor> acc_w_, acc_b_;
};

}  // namespace crynet::nnet
