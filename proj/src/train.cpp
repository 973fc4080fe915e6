#include "hqnn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "hqnn/stats.hpp"

namespace hqnn::train {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  // lr = 0 is allowed here (frozen-parameter runs); experiment configs
  // require a strictly positive rate.
  if (lr < 0.0) throw std::invalid_argument("train: lr must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (architecture != "classical" && architecture != "hybrid") {
    throw std::invalid_argument("train: architecture must be 'classical' or 'hybrid'");
  }
}

EvalResult evaluate(nn::Network& net, const data::DatasetSplit& test) {
  if (test.samples.empty()) throw std::invalid_argument("train: empty test split");
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(test.samples.size());
  labels.reserve(test.samples.size());
  std::size_t correct = 0;
  for (const data::ImageSample& s : test.samples) {
    const double p = net.forward(s.pixels);
    const int predicted = (p >= 0.5) ? 1 : 0;
    if (predicted == s.label) ++correct;
    scores.push_back(p);
    labels.push_back(s.label);
  }
  EvalResult r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(test.samples.size());
  try {
    r.auroc = stats::auroc(scores, labels);
  } catch (const std::invalid_argument&) {
    r.auroc = std::nullopt;  // single-class test set
  }
  return r;
}

RunResult train_one_run(const nn::NetworkSpec& spec, const data::Dataset& ds,
                        const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (ds.train.samples.empty()) throw std::invalid_argument("train: empty training split");
  const auto t0 = std::chrono::steady_clock::now();

  nn::Network net(spec, cfg.seed);
  std::mt19937_64 shuffle_rng(cfg.seed + 0x517cc1b727220a95ULL);

  RunResult result;
  result.architecture = cfg.architecture;
  result.seed = cfg.seed;

  const std::size_t n = ds.train.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      net.zero_gradients();
      for (std::size_t k = start; k < end; ++k) {
        const data::ImageSample& s = ds.train.samples[order[k]];
        const double p = net.forward(s.pixels);
        const double loss = nn::bce_loss(p, s.label);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " (seed " + std::to_string(cfg.seed) + ")");
        }
        epoch_loss += loss;
        net.backward(nn::bce_loss_grad(p, s.label));
      }
      net.sgd_step(cfg.lr, 1.0 / static_cast<double>(end - start));
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(n));

    double val_loss = 0.0;
    if (!ds.val.samples.empty()) {
      for (const data::ImageSample& s : ds.val.samples) {
        val_loss += nn::bce_loss(net.forward(s.pixels), s.label);
      }
      val_loss /= static_cast<double>(ds.val.samples.size());
    }
    result.val_loss.push_back(val_loss);
  }

  const EvalResult ev = evaluate(net, ds.test);
  result.test_accuracy = ev.accuracy;
  result.test_auroc = ev.auroc;
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::string run_result_to_json(const RunResult& r) {
  json j;
  j["architecture"] = r.architecture;
  j["seed"] = r.seed;
  j["train_loss"] = r.train_loss;
  j["val_loss"] = r.val_loss;
  j["test_accuracy"] = r.test_accuracy;
  if (r.test_auroc) {
    j["test_auroc"] = *r.test_auroc;
  } else {
    j["test_auroc"] = nullptr;
  }
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j.dump(2);
}

RunResult run_result_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunResult r;
  r.architecture = j.at("architecture").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.train_loss = j.at("train_loss").get<std::vector<double>>();
  r.val_loss = j.at("val_loss").get<std::vector<double>>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  if (!j.at("test_auroc").is_null()) r.test_auroc = j.at("test_auroc").get<double>();
  r.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  return r;
}

std::string losses_to_csv(const RunResult& r) {
  std::string csv = "epoch,train_loss,val_loss\n";
  char line[96];
  for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", e + 1, r.train_loss[e],
                  r.val_loss[e]);
    csv += line;
  }
  return csv;
}

}  // namespace hqnn::train
