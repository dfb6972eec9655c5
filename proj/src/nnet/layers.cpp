#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "crynet/kernels.hpp"
#include "crynet/nnet.hpp"
#include "crynet/rng.hpp"

namespace crynet::nnet {

namespace {

int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

void check_conv_shapes(const Tensor& in, const Tensor& w, const Tensor& b) {
    if (w.h != w.w || w.h < 1) {
        throw DimensionError("conv2d: kernel must be square, got " + w.shape_str());
    }
    const int out_ch = b.c;
    if (out_ch < 1 || w.c % out_ch != 0) {
        throw DimensionError("conv2d: weight channels " + w.shape_str() +
                             " not divisible by bias size " + std::to_string(out_ch));
    }
    const int in_ch = w.c / out_ch;
    if (in.c != in_ch) {
        throw DimensionError("conv2d: input " + in.shape_str() + " has " + std::to_string(in.c) +
                             " channels, filters expect " + std::to_string(in_ch));
    }
}

}  // namespace

int same_pad(int kernel) { return (kernel - 1) / 2; }

Tensor conv2d_forward(const Tensor& in, const Tensor& w, const Tensor& b, int stride, int pad) {
    check_conv_shapes(in, w, b);
    const int k = w.h;
    const int out_ch = b.c;
    const int in_ch = in.c;
    const int oh = conv_out_dim(in.h, k, stride, pad);
    const int ow = conv_out_dim(in.w, k, stride, pad);
    if (oh < 1 || ow < 1) {
        throw DimensionError("conv2d: kernel " + std::to_string(k) + " does not fit input " +
                             in.shape_str());
    }
    Tensor out(oh, ow, out_ch);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            double* op = out.px(oy, ox);
            std::memcpy(op, b.data(), size_t(out_ch) * sizeof(double));
            for (int ky = 0; ky < k; ++ky) {
                const int iy = oy * stride + ky - pad;
                if (iy < 0 || iy >= in.h) continue;
                for (int kx = 0; kx < k; ++kx) {
                    const int ix = ox * stride + kx - pad;
                    if (ix < 0 || ix >= in.w) continue;
                    const double* ip = in.px(iy, ix);
                    const double* wp = w.data() + size_t((ky * k + kx) * in_ch) * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        kernels::axpy(ip[ci], wp + size_t(ci) * out_ch, op, size_t(out_ch));
                    }
                }
            }
        }
    }
    return out;
}

void conv2d_backward(const Tensor& dout, const Tensor& in, const Tensor& w, int stride, int pad,
                     Tensor& din, Tensor& dw, Tensor& db) {
    const int k = w.h;
    const int in_ch = in.c;
    const int out_ch = dout.c;
    if (w.c != in_ch * out_ch) {
        throw DimensionError("conv2d_backward: weight " + w.shape_str() +
                             " does not match in/out channels");
    }
    const int oh = conv_out_dim(in.h, k, stride, pad);
    const int ow = conv_out_dim(in.w, k, stride, pad);
    if (dout.h != oh || dout.w != ow) {
        throw DimensionError("conv2d_backward: upstream " + dout.shape_str() +
                             " does not match forward output (" + std::to_string(oh) + "x" +
                             std::to_string(ow) + "x" + std::to_string(out_ch) + ")");
    }
    din = Tensor(in.h, in.w, in.c);
    dw = Tensor(w.h, w.w, w.c);
    db = Tensor::flat(out_ch);

    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const double* dop = dout.px(oy, ox);
            kernels::axpy(1.0, dop, db.data(), size_t(out_ch));
            for (int ky = 0; ky < k; ++ky) {
                const int iy = oy * stride + ky - pad;
                if (iy < 0 || iy >= in.h) continue;
                for (int kx = 0; kx < k; ++kx) {
                    const int ix = ox * stride + kx - pad;
                    if (ix < 0 || ix >= in.w) continue;
                    const double* ip = in.px(iy, ix);
                    double* dip = din.px(iy, ix);
                    const size_t base = size_t((ky * k + kx) * in_ch) * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        dip[ci] += kernels::dot(dop, w.data() + base + size_t(ci) * out_ch,
                                                size_t(out_ch));
                        kernels::axpy(ip[ci], dop, dw.data() + base + size_t(ci) * out_ch,
                                      size_t(out_ch));
                    }
                }
            }
        }
    }
}

Tensor maxpool_forward(const Tensor& in, int pool, int stride, std::vector<int>* argmax) {
    if (stride <= 0) stride = pool;
    if (pool < 1 || pool > in.h || pool > in.w) {
        throw DimensionError("maxpool: window " + std::to_string(pool) + " larger than input " +
                             in.shape_str());
    }
    const int oh = (in.h - pool) / stride + 1;
    const int ow = (in.w - pool) / stride + 1;
    Tensor out(oh, ow, in.c);
    if (argmax) argmax->assign(out.size(), -1);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int ch = 0; ch < in.c; ++ch) {
                double best = -std::numeric_limits<double>::infinity();
                int best_idx = -1;
                for (int ky = 0; ky < pool; ++ky) {
                    for (int kx = 0; kx < pool; ++kx) {
                        const int iy = oy * stride + ky;
                        const int ix = ox * stride + kx;
                        const int idx = (iy * in.w + ix) * in.c + ch;
                        const double v = in.v[size_t(idx)];
                        if (v > best) {  // strict: first index wins ties
                            best = v;
                            best_idx = idx;
                        }
                    }
                }
                const size_t oidx = (size_t(oy) * ow + ox) * in.c + ch;
                out.v[oidx] = best;
                if (argmax) (*argmax)[oidx] = best_idx;
            }
        }
    }
    return out;
}

Tensor maxpool_backward(const Tensor& dout, const Tensor& in, int pool, int stride,
                        const std::vector<int>& argmax) {
    if (stride <= 0) stride = pool;
    if (argmax.size() != dout.size()) {
        throw DimensionError("maxpool_backward: argmax cache does not match upstream " +
                             dout.shape_str());
    }
    Tensor din(in.h, in.w, in.c);
    for (size_t i = 0; i < dout.size(); ++i) {
        din.v[size_t(argmax[i])] += dout.v[i];
    }
    return din;
}

Tensor avgpool_forward(const Tensor& in, int pool, int stride) {
    if (stride <= 0) stride = pool;
    if (pool < 1 || pool > in.h || pool > in.w) {
        throw DimensionError("avgpool: window " + std::to_string(pool) + " larger than input " +
                             in.shape_str());
    }
    const int oh = (in.h - pool) / stride + 1;
    const int ow = (in.w - pool) / stride + 1;
    const double inv = 1.0 / (double(pool) * pool);
    Tensor out(oh, ow, in.c);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            double* op = out.px(oy, ox);
            for (int ky = 0; ky < pool; ++ky) {
                for (int kx = 0; kx < pool; ++kx) {
                    kernels::axpy(inv, in.px(oy * stride + ky, ox * stride + kx), op,
                                  size_t(in.c));
                }
            }
        }
    }
    return out;
}

Tensor avgpool_backward(const Tensor& dout, const Tensor& in, int pool, int stride) {
    if (stride <= 0) stride = pool;
    const double inv = 1.0 / (double(pool) * pool);
    Tensor din(in.h, in.w, in.c);
    for (int oy = 0; oy < dout.h; ++oy) {
        for (int ox = 0; ox < dout.w; ++ox) {
            const double* dop = dout.px(oy, ox);
            for (int ky = 0; ky < pool; ++ky) {
                for (int kx = 0; kx < pool; ++kx) {
                    double* dip = din.px(oy * stride + ky, ox * stride + kx);
                    kernels::axpy(inv, dop, dip, size_t(in.c));
                }
            }
        }
    }
    return din;
}

Tensor dense_forward(const Tensor& in, const Tensor& w, const Tensor& b) {
    const int in_dim = int(in.size());
    const int units = b.c;
    if (w.w != in_dim || w.c != units) {
        throw DimensionError("dense: weights " + w.shape_str() + " do not match input size " +
                             std::to_string(in_dim) + " and units " + std::to_string(units));
    }
    Tensor out = Tensor::flat(units);
    std::memcpy(out.data(), b.data(), size_t(units) * sizeof(double));
    for (int i = 0; i < in_dim; ++i) {
        kernels::axpy(in.v[size_t(i)], w.data() + size_t(i) * units, out.data(), size_t(units));
    }
    return out;
}

void dense_backward(const Tensor& dout, const Tensor& in, const Tensor& w, Tensor& din, Tensor& dw,
                    Tensor& db) {
    const int in_dim = int(in.size());
    const int units = int(dout.size());
    if (w.w != in_dim || w.c != units) {
        throw DimensionError("dense_backward: weights " + w.shape_str() + " do not match " +
                             std::to_string(in_dim) + "->" + std::to_string(units));
    }
    din = Tensor(in.h, in.w, in.c);
    dw = Tensor(w.h, w.w, w.c);
    db = Tensor::flat(units);
    std::memcpy(db.data(), dout.data(), size_t(units) * sizeof(double));
    for (int i = 0; i < in_dim; ++i) {
        din.v[size_t(i)] = kernels::dot(dout.data(), w.data() + size_t(i) * units, size_t(units));
        kernels::axpy(in.v[size_t(i)], dout.data(), dw.data() + size_t(i) * units, size_t(units));
    }
}

Tensor relu_forward(const Tensor& in) {
    Tensor out(in.h, in.w, in.c);
    kernels::relu_forward(in.data(), out.data(), in.size());
    return out;
}

Tensor relu_backward(const Tensor& dout, const Tensor& in) {
    require_same_shape(dout, in, "relu_backward");
    Tensor din(in.h, in.w, in.c);
    kernels::relu_backward(in.data(), dout.data(), din.data(), in.size());
    return din;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Tensor sigmoid_forward(const Tensor& in) {
    Tensor out(in.h, in.w, in.c);
    for (size_t i = 0; i < in.size(); ++i) out.v[i] = sigmoid(in.v[i]);
    return out;
}

Tensor sigmoid_backward(const Tensor& dout, const Tensor& out) {
    require_same_shape(dout, out, "sigmoid_backward");
    Tensor din(out.h, out.w, out.c);
    for (size_t i = 0; i < out.size(); ++i) din.v[i] = dout.v[i] * out.v[i] * (1.0 - out.v[i]);
    return din;
}

Tensor dropout_forward(const Tensor& in, double keep_prob, uint64_t rng_seed, Tensor* mask) {
    if (!(keep_prob > 0.0) || keep_prob > 1.0) {
        throw ValidationError("dropout: keep probability must be in (0, 1]");
    }
    Rng rng(rng_seed);
    const double inv_keep = 1.0 / keep_prob;
    Tensor out(in.h, in.w, in.c);
    if (mask) *mask = Tensor(in.h, in.w, in.c);
    for (size_t i = 0; i < in.size(); ++i) {
        const double m = rng.uniform() < keep_prob ? inv_keep : 0.0;
        out.v[i] = in.v[i] * m;
        if (mask) mask->v[i] = m;
    }
    return out;
}

Tensor dropout_backward(const Tensor& dout, const Tensor& mask) {
    require_same_shape(dout, mask, "dropout_backward");
    Tensor din(dout.h, dout.w, dout.c);
    for (size_t i = 0; i < dout.size(); ++i) din.v[i] = dout.v[i] * mask.v[i];
    return din;
}

Tensor flatten_forward(const Tensor& in) {
    Tensor out = Tensor::flat(int(in.size()));
    out.v = in.v;
    return out;
}

Tensor flatten_backward(const Tensor& dout, const Tensor& in) {
    if (dout.size() != in.size()) {
        throw DimensionError("flatten_backward: upstream " + dout.shape_str() +
                             " does not match input " + in.shape_str());
    }
    Tensor din(in.h, in.w, in.c);
    din.v = dout.v;
    return din;
}

Tensor concat_channels_forward(const std::vector<const Tensor*>& ins) {
    if (ins.empty()) throw DimensionError("concat_channels: no inputs");
    const int h = ins[0]->h, w = ins[0]->w;
    int total_c = 0;
    for (const Tensor* t : ins) {
        if (t->h != h || t->w != w) {
            std::string shapes;
            for (const Tensor* u : ins) shapes += u->shape_str() + " ";
            throw DimensionError("concat_channels: spatial dims differ across inputs: " + shapes);
        }
        total_c += t->c;
    }
    Tensor out(h, w, total_c);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double* op = out.px(y, x);
            for (const Tensor* t : ins) {
                std::memcpy(op, t->px(y, x), size_t(t->c) * sizeof(double));
                op += t->c;
            }
        }
    }
    return out;
}

std::vector<Tensor> concat_channels_backward(const Tensor& dout,
                                             const std::vector<const Tensor*>& ins) {
    std::vector<Tensor> dins;
    dins.reserve(ins.size());
    for (const Tensor* t : ins) dins.emplace_back(t->h, t->w, t->c);
    for (int y = 0; y < dout.h; ++y) {
        for (int x = 0; x < dout.w; ++x) {
            const double* dp = dout.px(y, x);
            for (size_t i = 0; i < ins.size(); ++i) {
                std::memcpy(dins[i].px(y, x), dp, size_t(ins[i]->c) * sizeof(double));
                dp += ins[i]->c;
            }
        }
    }
    return dins;
}

BceResult bce_loss(double prediction, double label, double l2_penalty) {
    const double p = std::clamp(prediction, 1e-7, 1.0 - 1e-7);
    const double loss = -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p)) + l2_penalty;
    const double dp = (p - label) / (p * (1.0 - p));
    return {loss, dp};
}

}  // namespace crynet::nnet
