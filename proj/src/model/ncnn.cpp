#include <sstream>

#include "crynet/model.hpp"

namespace crynet::model {

using nnet::LayerKind;
using nnet::LayerSpec;

nnet::Graph build_ncnn(const NcnnConfig& config) {
    if (config.input_height < 20 || config.input_width < 20 || config.input_channels < 1) {
        throw ValidationError("ncnn config: input too small");
    }
    nnet::Graph g;
    const int input = g.add_input("input");

    auto conv = [&](const std::string& name, int filters, int in_node) {
        LayerSpec s;
        s.kind = LayerKind::Conv2D;
        s.filters = filters;
        s.kernel = 5;
        s.stride = 1;
        s.pad_same = true;
        return g.add(name, s, {in_node});
    };
    auto pool = [&](const std::string& name, int size, int in_node) {
        LayerSpec s;
        s.kind = config.average_pooling ? LayerKind::AvgPool : LayerKind::MaxPool;
        s.pool = size;
        return g.add(name, s, {in_node});
    };

    // left: a bare pooling branch
    const int left = pool("left_pool", 10, input);

    // right: wide conv then the same pooling
    const int right = pool("right_pool", 10, conv("right_conv", config.right_filters, input));

    // center: two conv+pool stages
    const int c1 = pool("center_pool1", 2, conv("center_conv1", config.center_filters, input));
    const int center = pool("center_pool2", 5, conv("center_conv2", config.center_filters, c1));

    LayerSpec merge_spec;
    merge_spec.kind = LayerKind::ConcatChannels;
    const int merge = g.add("merge", merge_spec, {left, right, center});

    const int head = pool("head_pool", 2, conv("head_conv", config.head_filters, merge));

    LayerSpec flat_spec;
    flat_spec.kind = LayerKind::Flatten;
    const int flat = g.add("flatten", flat_spec, {head});

    LayerSpec fc1_spec;
    fc1_spec.kind = LayerKind::Dense;
    fc1_spec.units = config.dense_units;
    fc1_spec.l2 = config.dense_l2;
    const int fc1 = g.add("fc1", fc1_spec, {flat});

    LayerSpec relu_spec;
    relu_spec.kind = LayerKind::ReLU;
    const int act = g.add("fc1_relu", relu_spec, {fc1});

    LayerSpec drop_spec;
    drop_spec.kind = LayerKind::Dropout;
    drop_spec.keep_prob = config.dropout_keep;
    const int drop = g.add("dropout", drop_spec, {act});

    LayerSpec fc2_spec;
    fc2_spec.kind = LayerKind::Dense;
    fc2_spec.units = 1;
    fc2_spec.l2 = config.dense_l2;
    const int fc2 = g.add("fc2", fc2_spec, {drop});

    LayerSpec sig_spec;
    sig_spec.kind = LayerKind::Sigmoid;
    g.add("output", sig_spec, {fc2});

    g.finalize({config.input_height, config.input_width, config.input_channels}, config.seed);
    return g;
}

std::string ncnn_summary(const nnet::Graph& g) {
    std::ostringstream ss;
    ss << "N-CNN\n" << g.summary();
    const auto count = g.param_count();
    const long long delta = (long long)count - (long long)kReferenceNcnnParams;
    ss << "  published N-CNN reports " << kReferenceNcnnParams
       << " parameters; this build has " << count << " (delta " << (delta >= 0 ? "+" : "")
       << delta << ")\n";
    return ss.str();
}

}  // namespace crynet::model
