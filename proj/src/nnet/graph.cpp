#include <cmath>
#include <sstream>

#include "crynet/kernels.hpp"
#include "crynet/nnet.hpp"
#include "crynet/rng.hpp"

namespace crynet::nnet {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Input: return "input";
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::AvgPool: return "avgpool";
        case LayerKind::Dense: return "dense";
        case LayerKind::ReLU: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::ConcatChannels: return "concat";
    }
    return "?";
}

void LayerSpec::validate() const {
    switch (kind) {
        case LayerKind::Conv2D:
            if (filters < 1 || kernel < 1 || stride < 1) {
                throw ValidationError("conv2d spec: filters/kernel/stride must be positive");
            }
            if (pad_same && kernel % 2 == 0) {
                throw ValidationError("conv2d spec: same padding needs an odd kernel");
            }
            break;
        case LayerKind::MaxPool:
        case LayerKind::AvgPool:
            if (pool < 1) throw ValidationError("pool spec: window must be positive");
            break;
        case LayerKind::Dense:
            if (units < 1) throw ValidationError("dense spec: units must be positive");
            if (l2 < 0.0) throw ValidationError("dense spec: l2 coefficient must be >= 0");
            break;
        case LayerKind::Dropout:
            if (!(keep_prob > 0.0) || keep_prob > 1.0) {
                throw ValidationError("dropout spec: keep probability must be in (0, 1]");
            }
            break;
        default:
            break;
    }
}

int Graph::add_input(const std::string& name) {
    if (!nodes_.empty()) throw ValidationError("graph: input node must be added first");
    Node n;
    n.name = name;
    n.spec.kind = LayerKind::Input;
    nodes_.push_back(std::move(n));
    return 0;
}

int Graph::add(const std::string& name, const LayerSpec& spec, std::vector<int> inputs) {
    if (nodes_.empty()) throw ValidationError("graph: add an input node first");
    spec.validate();
    if (inputs.empty()) throw ValidationError("graph: node '" + name + "' has no inputs");
    for (int i : inputs) {
        if (i < 0 || size_t(i) >= nodes_.size()) {
            throw ValidationError("graph: node '" + name + "' references unknown input " +
                                  std::to_string(i));
        }
    }
    if (spec.kind != LayerKind::ConcatChannels && inputs.size() != 1) {
        throw ValidationError("graph: node '" + name + "' takes exactly one input");
    }
    Node n;
    n.name = name;
    n.spec = spec;
    n.inputs = std::move(inputs);
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

Shape Graph::infer_shape(const Node& n) const {
    auto in_shape = [&](size_t idx) { return nodes_[size_t(n.inputs[idx])].out_shape; };
    switch (n.spec.kind) {
        case LayerKind::Input:
            return input_shape_;
        case LayerKind::Conv2D: {
            Shape s = in_shape(0);
            const int pad = n.spec.pad_same ? same_pad(n.spec.kernel) : 0;
            const int oh = (s.h + 2 * pad - n.spec.kernel) / n.spec.stride + 1;
            const int ow = (s.w + 2 * pad - n.spec.kernel) / n.spec.stride + 1;
            if (oh < 1 || ow < 1) {
                throw DimensionError("graph: conv '" + n.name + "' kernel does not fit " + s.str());
            }
            return {oh, ow, n.spec.filters};
        }
        case LayerKind::MaxPool:
        case LayerKind::AvgPool: {
            Shape s = in_shape(0);
            const int stride = n.spec.pool_stride > 0 ? n.spec.pool_stride : n.spec.pool;
            if (n.spec.pool > s.h || n.spec.pool > s.w) {
                throw DimensionError("graph: pool '" + n.name + "' window " +
                                     std::to_string(n.spec.pool) + " larger than " + s.str());
            }
            return {(s.h - n.spec.pool) / stride + 1, (s.w - n.spec.pool) / stride + 1, s.c};
        }
        case LayerKind::Dense: {
            Shape s = in_shape(0);
            if (s.h != 1 || s.w != 1) {
                throw DimensionError("graph: dense '" + n.name + "' needs a flat input, got " +
                                     s.str());
            }
            return {1, 1, n.spec.units};
        }
        case LayerKind::ReLU:
        case LayerKind::Sigmoid:
        case LayerKind::Dropout:
            return in_shape(0);
        case LayerKind::Flatten: {
            Shape s = in_shape(0);
            return {1, 1, s.h * s.w * s.c};
        }
        case LayerKind::ConcatChannels: {
            Shape first = in_shape(0);
            int total_c = 0;
            std::string all;
            bool mismatch = false;
            for (size_t i = 0; i < n.inputs.size(); ++i) {
                Shape s = in_shape(i);
                all += nodes_[size_t(n.inputs[i])].name + s.str() + " ";
                if (s.h != first.h || s.w != first.w) mismatch = true;
                total_c += s.c;
            }
            if (mismatch) {
                throw DimensionError("graph: concat '" + n.name +
                                     "' inputs disagree on spatial dims: " + all);
            }
            return {first.h, first.w, total_c};
        }
    }
    throw ValidationError("graph: unknown layer kind");
}

void Graph::finalize(Shape input_shape, uint64_t seed) {
    if (nodes_.empty() || nodes_[0].spec.kind != LayerKind::Input) {
        throw ValidationError("graph: missing input node");
    }
    if (input_shape.h < 1 || input_shape.w < 1 || input_shape.c < 1) {
        throw ValidationError("graph: bad input shape " + input_shape.str());
    }
    input_shape_ = input_shape;
    Rng rng(seed);
    for (auto& n : nodes_) {
        n.out_shape = infer_shape(n);
        if (n.spec.kind == LayerKind::Conv2D) {
            const Shape in = nodes_[size_t(n.inputs[0])].out_shape;
            const int k = n.spec.kernel;
            n.w = Tensor(k, k, in.c * n.spec.filters);
            n.b = Tensor::flat(n.spec.filters);
            const double limit = std::sqrt(6.0 / (double(k) * k * in.c));
            for (double& v : n.w.v) v = rng.uniform(-limit, limit);
        } else if (n.spec.kind == LayerKind::Dense) {
            const Shape in = nodes_[size_t(n.inputs[0])].out_shape;
            n.w = Tensor(1, in.c, n.spec.units);
            n.b = Tensor::flat(n.spec.units);
            const double limit = std::sqrt(6.0 / double(in.c));
            for (double& v : n.w.v) v = rng.uniform(-limit, limit);
        }
    }
    finalized_ = true;
}

size_t Graph::param_count() const {
    size_t n = 0;
    for (const auto& node : nodes_) n += node.w.size() + node.b.size();
    return n;
}

double Graph::l2_penalty() const {
    double p = 0.0;
    for (const auto& n : nodes_) {
        if (n.spec.l2 > 0.0 && !n.w.empty()) {
            p += n.spec.l2 * kernels::dot(n.w.data(), n.w.data(), n.w.size());
        }
    }
    return p;
}

void Graph::add_l2_gradients(Grads& grads) const {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.spec.l2 > 0.0 && !n.w.empty()) {
            kernels::axpy(2.0 * n.spec.l2, n.w.data(), grads.dw[i].data(), n.w.size());
        }
    }
}

Tensor Graph::forward(const Tensor& input, bool training, uint64_t dropout_seed,
                      Trace* trace) const {
    if (!finalized_) throw ValidationError("graph: forward before finalize");
    if (input.h != input_shape_.h || input.w != input_shape_.w || input.c != input_shape_.c) {
        throw DimensionError("graph: input " + input.shape_str() + " does not match " +
                             input_shape_.str());
    }
    Trace local;
    Trace& tr = trace ? *trace : local;
    tr.acts.assign(nodes_.size(), {});
    tr.dropout_masks.assign(nodes_.size(), {});
    tr.pool_argmax.assign(nodes_.size(), {});
    tr.acts[0] = input;

    for (size_t i = 1; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        const Tensor& a = tr.acts[size_t(n.inputs[0])];
        switch (n.spec.kind) {
            case LayerKind::Conv2D:
                tr.acts[i] = conv2d_forward(a, n.w, n.b, n.spec.stride,
                                            n.spec.pad_same ? same_pad(n.spec.kernel) : 0);
                break;
            case LayerKind::MaxPool:
                tr.acts[i] = maxpool_forward(a, n.spec.pool, n.spec.pool_stride,
                                             &tr.pool_argmax[i]);
                break;
            case LayerKind::AvgPool:
                tr.acts[i] = avgpool_forward(a, n.spec.pool, n.spec.pool_stride);
                break;
            case LayerKind::Dense:
                tr.acts[i] = dense_forward(a, n.w, n.b);
                break;
            case LayerKind::ReLU:
                tr.acts[i] = relu_forward(a);
                break;
            case LayerKind::Sigmoid:
                tr.acts[i] = sigmoid_forward(a);
                break;
            case LayerKind::Dropout:
                if (training && n.spec.keep_prob < 1.0) {
                    tr.acts[i] = dropout_forward(a, n.spec.keep_prob,
                                                 Rng::derive(dropout_seed, uint64_t(i)),
                                                 &tr.dropout_masks[i]);
                } else {
                    tr.acts[i] = a;
                }
                break;
            case LayerKind::Flatten:
                tr.acts[i] = flatten_forward(a);
                break;
            case LayerKind::ConcatChannels: {
                std::vector<const Tensor*> ins;
                ins.reserve(n.inputs.size());
                for (int idx : n.inputs) ins.push_back(&tr.acts[size_t(idx)]);
                tr.acts[i] = concat_channels_forward(ins);
                break;
            }
            case LayerKind::Input:
                throw ValidationError("graph: duplicate input node");
        }
    }
    return tr.acts.back();
}

void Grads::init_like(const Graph& g) {
    dw.assign(g.nodes_.size(), {});
    db.assign(g.nodes_.size(), {});
    for (size_t i = 0; i < g.nodes_.size(); ++i) {
        const Node& n = g.nodes_[i];
        if (!n.w.empty()) {
            dw[i] = Tensor(n.w.h, n.w.w, n.w.c);
            db[i] = Tensor(n.b.h, n.b.w, n.b.c);
        }
    }
}

void Grads::zero() {
    for (auto& t : dw) t.fill(0.0);
    for (auto& t : db) t.fill(0.0);
}

void Grads::add(const Grads& other) {
    for (size_t i = 0; i < dw.size(); ++i) {
        if (dw[i].empty()) continue;
        kernels::axpy(1.0, other.dw[i].data(), dw[i].data(), dw[i].size());
        kernels::axpy(1.0, other.db[i].data(), db[i].data(), db[i].size());
    }
}

void Graph::backward(const Trace& trace, const Tensor& dout_last, Grads& grads) const {
    if (trace.acts.size() != nodes_.size()) {
        throw ValidationError("graph: backward needs a trace from forward");
    }
    std::vector<Tensor> dacts(nodes_.size());
    dacts.back() = dout_last;

    auto accumulate = [](Tensor& slot, Tensor&& delta) {
        if (slot.empty()) {
            slot = std::move(delta);
        } else {
            kernels::axpy(1.0, delta.data(), slot.data(), slot.size());
        }
    };

    for (size_t i = nodes_.size(); i-- > 1;) {
        const Node& n = nodes_[i];
        if (dacts[i].empty()) continue;  // dead branch
        const Tensor& dout = dacts[i];
        const Tensor& a = trace.acts[size_t(n.inputs[0])];
        switch (n.spec.kind) {
            case LayerKind::Conv2D: {
                Tensor din, dw_local, db_local;
                conv2d_backward(dout, a, n.w, n.spec.stride,
                                n.spec.pad_same ? same_pad(n.spec.kernel) : 0, din, dw_local,
                                db_local);
                kernels::axpy(1.0, dw_local.data(), grads.dw[i].data(), dw_local.size());
                kernels::axpy(1.0, db_local.data(), grads.db[i].data(), db_local.size());
                accumulate(dacts[size_t(n.inputs[0])], std::move(din));
                break;
            }
            case LayerKind::MaxPool:
                accumulate(dacts[size_t(n.inputs[0])],
                           maxpool_backward(dout, a, n.spec.pool, n.spec.pool_stride,
                                            trace.pool_argmax[i]));
                break;
            case LayerKind::AvgPool:
                accumulate(dacts[size_t(n.inputs[0])],
                           avgpool_backward(dout, a, n.spec.pool, n.spec.pool_stride));
                break;
            case LayerKind::Dense: {
                Tensor din, dw_local, db_local;
                dense_backward(dout, a, n.w, din, dw_local, db_local);
                kernels::axpy(1.0, dw_local.data(), grads.dw[i].data(), dw_local.size());
                kernels::axpy(1.0, db_local.data(), grads.db[i].data(), db_local.size());
                accumulate(dacts[size_t(n.inputs[0])], std::move(din));
                break;
            }
            case LayerKind::ReLU:
                accumulate(dacts[size_t(n.inputs[0])], relu_backward(dout, a));
                break;
            case LayerKind::Sigmoid:
                accumulate(dacts[size_t(n.inputs[0])], sigmoid_backward(dout, trace.acts[i]));
                break;
            case LayerKind::Dropout:
                if (!trace.dropout_masks[i].empty()) {
                    accumulate(dacts[size_t(n.inputs[0])],
                               dropout_backward(dout, trace.dropout_masks[i]));
                } else {
                    accumulate(dacts[size_t(n.inputs[0])], Tensor(dout));
                }
                break;
            case LayerKind::Flatten:
                accumulate(dacts[size_t(n.inputs[0])], flatten_backward(dout, a));
                break;
            case LayerKind::ConcatChannels: {
                std::vector<const Tensor*> ins;
                ins.reserve(n.inputs.size());
                for (int idx : n.inputs) ins.push_back(&trace.acts[size_t(idx)]);
                auto dins = concat_channels_backward(dout, ins);
                for (size_t j = 0; j < n.inputs.size(); ++j) {
                    accumulate(dacts[size_t(n.inputs[j])], std::move(dins[j]));
                }
                break;
            }
            case LayerKind::Input:
                break;
        }
    }
}

std::string Graph::summary() const {
    std::ostringstream ss;
    size_t total = 0;
    for (const auto& n : nodes_) {
        const size_t p = n.w.size() + n.b.size();
        total += p;
        ss << "  " << n.name << " [" << layer_kind_name(n.spec.kind) << "] -> "
           << n.out_shape.str();
        if (p > 0) ss << "  params=" << p;
        ss << "\n";
    }
    ss << "  total parameters: " << total << "\n";
    return ss.str();
}

RmsProp::RmsProp(const Graph& g, RmsPropConfig config) : cfg_(config) {
    acc_w_.resize(g.node_count());
    acc_b_.resize(g.node_count());
    for (size_t i = 0; i < g.node_count(); ++i) {
        const Node& n = g.node(int(i));
        if (!n.w.empty()) {
            acc_w_[i] = Tensor(n.w.h, n.w.w, n.w.c);
            acc_b_[i] = Tensor(n.b.h, n.b.w, n.b.c);
        }
    }
}

void RmsProp::step(Graph& g, const Grads& grads) {
    for (size_t i = 0; i < g.node_count(); ++i) {
        Node& n = g.node(int(i));
        if (n.w.empty()) continue;
        for (double v : grads.dw[i].v) {
            if (!std::isfinite(v)) {
                throw DivergenceError("rmsprop: non-finite weight gradient in layer '" + n.name +
                                      "'");
            }
        }
        for (double v : grads.db[i].v) {
            if (!std::isfinite(v)) {
                throw DivergenceError("rmsprop: non-finite bias gradient in layer '" + n.name +
                                      "'");
            }
        }
        kernels::rmsprop_update(n.w.data(), grads.dw[i].data(), acc_w_[i].data(), n.w.size(),
                                cfg_.learning_rate, cfg_.rho, cfg_.eps);
        kernels::rmsprop_update(n.b.data(), grads.db[i].data(), acc_b_[i].data(), n.b.size(),
                                cfg_.learning_rate, cfg_.rho, cfg_.eps);
    }
}

}  // namespace crynet::nnet
