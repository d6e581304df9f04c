#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "spectralift/error.hpp"
#include "spectralift/optim.hpp"
#include "spectralift/rng.hpp"

namespace spectralift {
namespace {

std::vector<double> to_double(std::span<const float> values) { return {values.begin(), values.end()}; }

struct Dataset {
  std::vector<double> inputs;   // n x c
  std::vector<double> targets;  // n x C
  std::size_t count = 0;
  std::size_t in_bands = 0;
  std::size_t out_bands = 0;
};

Dataset make_dataset(const HsiCube& lr_hsi, const SrfMatrix& srf) {
  const MsiImage z = spectral_project(lr_hsi, srf);
  return {to_double(z.data()), to_double(lr_hsi.data()), lr_hsi.pixels(), srf.cols(), srf.rows()};
}

Architecture resolve_arch(Architecture arch, const SrfMatrix& srf) {
  if (arch.in_bands == 0) arch.in_bands = srf.cols();
  if (arch.out_bands == 0) arch.out_bands = srf.rows();
  if (arch.in_bands != srf.cols() || arch.out_bands != srf.rows()) {
    throw DimensionError("train: architecture maps " + std::to_string(arch.in_bands) + "->" +
                         std::to_string(arch.out_bands) + " bands but SRF is " + std::to_string(srf.rows()) + "x" +
                         std::to_string(srf.cols()));
  }
  return arch;
}

// Loss and gradient of one mini-batch, optionally split over worker threads.
// Shard results are combined weighted by shard size; under `strict` they are
// reduced in shard order, otherwise in completion order.
LossAndGradient batch_step(const SinParams& params, const SpectraView& inputs, const SpectraView& targets,
                           const TrainConfig& cfg) {
  const std::size_t shards = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(1, inputs.count / 64));
  if (shards == 1) return loss_and_gradient(params, inputs, targets, cfg.loss, cfg.loss_options);

  auto shard_view = [](const SpectraView& v, std::size_t begin, std::size_t end) {
    return SpectraView{v.data.subspan(begin * v.bands, (end - begin) * v.bands), end - begin, v.bands};
  };
  const std::size_t n = inputs.count;
  LossAndGradient total;
  total.grads.assign(params.size(), 0.0);
  std::vector<LossAndGradient> partial(shards);
  std::mutex mutex;
  auto accumulate = [&](const LossAndGradient& r, std::size_t count) {
    const double w = static_cast<double>(count) / static_cast<double>(n);
    total.loss += w * r.loss;
    for (std::size_t i = 0; i < r.grads.size(); ++i) total.grads[i] += w * r.grads[i];
  };
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t begin = n * s / shards;
    const std::size_t end = n * (s + 1) / shards;
    workers.emplace_back([&, s, begin, end] {
      LossAndGradient r = loss_and_gradient(params, shard_view(inputs, begin, end), shard_view(targets, begin, end),
                                            cfg.loss, cfg.loss_options);
      if (cfg.strict) {
        partial[s] = std::move(r);
      } else {
        std::lock_guard lock(mutex);
        accumulate(r, end - begin);
      }
    });
  }
  for (auto& w : workers) w.join();
  if (cfg.strict) {
    for (std::size_t s = 0; s < shards; ++s) accumulate(partial[s], n * (s + 1) / shards - n * s / shards);
  }
  return total;
}

}  // namespace

TrainResult train(const HsiCube& lr_hsi, const SrfMatrix& srf, Architecture arch, const TrainConfig& cfg) {
  if (lr_hsi.bands() != srf.rows()) {
    throw DimensionError("train: LR-HSI has " + std::to_string(lr_hsi.bands()) + " bands but SRF has " +
                         std::to_string(srf.rows()) + " rows");
  }
  if (cfg.epochs == 0) throw ParameterError("train: epochs must be >= 1");
  if (cfg.batch_size == 0) throw ParameterError("train: batch size must be >= 1");
  if (lr_hsi.pixels() == 0) throw DimensionError("train: LR-HSI has no pixels");
  validate_schedule(cfg.schedule);
  arch = resolve_arch(arch, srf);

  const Dataset data = make_dataset(lr_hsi, srf);
  SinParams params = init_params(arch, cfg.seed);
  AdamState adam(params.size());
  rng::Engine shuffler(rng::derive_seed(cfg.seed, "epoch-shuffle"));

  const std::size_t n = data.count;
  const std::size_t batch = std::min(cfg.batch_size, n);
  const std::size_t batches_per_epoch = (n + batch - 1) / batch;
  const std::size_t total_steps = cfg.epochs * batches_per_epoch;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> batch_in(batch * data.in_bands);
  std::vector<double> batch_out(batch * data.out_bands);

  TrainResult result{params, {}, false};
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    shuffler.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t begin = b * batch;
      const std::size_t count = std::min(batch, n - begin);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t src = order[begin + i];
        std::copy_n(data.inputs.begin() + static_cast<std::ptrdiff_t>(src * data.in_bands), data.in_bands,
                    batch_in.begin() + static_cast<std::ptrdiff_t>(i * data.in_bands));
        std::copy_n(data.targets.begin() + static_cast<std::ptrdiff_t>(src * data.out_bands), data.out_bands,
                    batch_out.begin() + static_cast<std::ptrdiff_t>(i * data.out_bands));
      }
      const SpectraView in_view{std::span<const double>(batch_in).first(count * data.in_bands), count, data.in_bands};
      const SpectraView out_view{std::span<const double>(batch_out).first(count * data.out_bands), count,
                                 data.out_bands};
      lr = lr_at(cfg.schedule, step, total_steps);
      LossAndGradient lg = batch_step(params, in_view, out_view, cfg);
      if (!std::isfinite(lg.loss)) {
        std::ostringstream msg;
        msg << "train: loss became non-finite at epoch " << epoch + 1 << ", step " << step << " (lr " << lr << ")";
        throw NumericError(msg.str());
      }
      adam_step(params, lg.grads, adam, lr);
      loss_sum += lg.loss * static_cast<double>(count);
      ++step;
    }
    const double mean_loss = loss_sum / static_cast<double>(n);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    result.log.push_back({epoch + 1, mean_loss, lr, ms});

    if (cfg.early_stop_patience > 0) {
      if (mean_loss < best_loss) {
        best_loss = mean_loss;
        epochs_since_best = 0;
      } else if (++epochs_since_best >= cfg.early_stop_patience) {
        result.stopped_early = true;
        break;
      }
    }
  }
  result.params = std::move(params);
  return result;
}

double evaluate_training_loss(const SinParams& params, const HsiCube& lr_hsi, const SrfMatrix& srf, LossKind kind,
                              const LossOptions& opts) {
  const Dataset data = make_dataset(lr_hsi, srf);
  const SpectraView in{data.inputs, data.count, data.in_bands};
  const std::vector<double> pred = forward(params, in);
  return loss(kind, SpectraView{pred, data.count, data.out_bands}, SpectraView{data.targets, data.count, data.out_bands},
              opts);
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,mean_loss,lr,wall_ms\n";
  for (const EpochLog& e : log) out << e.epoch << ',' << e.mean_loss << ',' << e.lr << ',' << e.wall_ms << '\n';
  return out.str();
}

}  // namespace spectralift
