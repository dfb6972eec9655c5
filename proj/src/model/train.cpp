#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "crynet/kernels.hpp"
#include "crynet/model.hpp"
#include "crynet/rng.hpp"

namespace crynet::model {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Runs fn(i) for i in [0, n) across `threads` workers in static chunks.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int k = std::min(threads, n);
    pool.reserve(size_t(k));
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

TrainHistory train(nnet::Graph& g, const std::vector<LabeledImage>& dataset,
                   const TrainConfig& config) {
    if (dataset.empty()) throw ValidationError("train: empty dataset");
    int n_pos = 0;
    for (const auto& s : dataset) n_pos += s.label ? 1 : 0;
    if (n_pos == 0 || n_pos == int(dataset.size())) {
        throw ValidationError("train: training set contains a single class (" +
                              std::to_string(n_pos) + "/" + std::to_string(dataset.size()) +
                              " positive)");
    }
    if (config.batch_size < 1 || config.epochs < 1) {
        throw ValidationError("train: batch_size and epochs must be positive");
    }

    const int threads = resolve_threads(config.threads);
    const int n = int(dataset.size());
    const int batch = std::min(config.batch_size, n);

    nnet::RmsProp optimizer(g, {config.learning_rate, config.rho, config.eps});
    Rng shuffle_rng(config.seed);

    std::vector<int> order(size_t(n));
    for (int i = 0; i < n; ++i) order[size_t(i)] = i;

    // Per-slot gradient buffers and traces, reduced in slot order after each
    // batch so the result is independent of the thread count.
    std::vector<nnet::Grads> slot_grads(size_t(batch));
    for (auto& sg : slot_grads) sg.init_like(g);
    std::vector<nnet::Trace> slot_traces(size_t(batch));
    std::vector<double> slot_loss(size_t(batch));
    std::vector<int> slot_correct(size_t(batch));

    nnet::Grads total;
    total.init_like(g);

    TrainHistory history;
    history.epochs.reserve(size_t(config.epochs));

    uint64_t step_counter = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        int epoch_correct = 0;

        for (int start = 0; start < n; start += batch) {
            const int bsz = std::min(batch, n - start);
            const uint64_t step_seed = Rng::derive(config.seed, 0x5eedull + step_counter);
            ++step_counter;

            parallel_for(bsz, threads, [&](int slot) {
                const LabeledImage& sample = dataset[size_t(order[size_t(start + slot)])];
                nnet::Grads& grads = slot_grads[size_t(slot)];
                grads.zero();
                nnet::Tensor out =
                    g.forward(sample.image, true, Rng::derive(step_seed, uint64_t(slot)),
                              &slot_traces[size_t(slot)]);
                const double p = out.v[0];
                auto bce = nnet::bce_loss(p, double(sample.label));
                slot_loss[size_t(slot)] = bce.loss;
                slot_correct[size_t(slot)] = ((p > 0.5) == (sample.label == 1)) ? 1 : 0;
                nnet::Tensor dout = nnet::Tensor::flat(1);
                dout.v[0] = bce.dp / double(bsz);
                g.backward(slot_traces[size_t(slot)], dout, grads);
            });

            total.zero();
            for (int slot = 0; slot < bsz; ++slot) {
                total.add(slot_grads[size_t(slot)]);
                epoch_loss += slot_loss[size_t(slot)];
                epoch_correct += slot_correct[size_t(slot)];
            }
            g.add_l2_gradients(total);
            optimizer.step(g, total);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.loss = epoch_loss / n + g.l2_penalty();
        stats.accuracy = double(epoch_correct) / n;
        if (!std::isfinite(stats.loss)) {
            throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        history.epochs.push_back(stats);
    }
    return history;
}

std::vector<double> predict(const nnet::Graph& g, const std::vector<nnet::Tensor>& images,
                            int threads) {
    std::vector<double> probs(images.size());
    parallel_for(int(images.size()), resolve_threads(threads), [&](int i) {
        probs[size_t(i)] = g.forward(images[size_t(i)], false, 0).v[0];
    });
    return probs;
}

double predict_one(const nnet::Graph& g, const nnet::Tensor& image) {
    return g.forward(image, false, 0).v[0];
}

}  // namespace crynet::model
