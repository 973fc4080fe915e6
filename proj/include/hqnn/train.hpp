#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqnn/data.hpp"
#include "hqnn/nn.hpp"

namespace hqnn::train {

struct TrainConfig {
  int epochs = 20;
  double lr = 0.01;
  int batch_size = 32;
  std::uint64_t seed = 0;
  std::string architecture = "classical";  // classical | hybrid
  bool shuffle_each_epoch = true;

  void validate() const;
};

struct RunResult {
  std::string architecture;
  std::uint64_t seed = 0;
  std::vector<double> train_loss;  // one entry per epoch, running mean over batches
  std::vector<double> val_loss;    // mean validation loss after each epoch
  double test_accuracy = 0.0;
  std::optional<double> test_auroc;  // empty when the test split has one class
  double wall_time_seconds = 0.0;
};

// Decision threshold 0.5, p >= 0.5 means class 1.
struct EvalResult {
  double accuracy = 0.0;
  std::optional<double> auroc;
};
EvalResult evaluate(nn::Network& net, const data::DatasetSplit& test);

// One seeded round: glorot init, per-epoch seeded shuffle + mini-batch SGD
// with mean-over-batch gradients, validation loss after each epoch, final
// test evaluation. No early stopping or model selection. A non-finite loss
// aborts with a diagnostic.
RunResult train_one_run(const nn::NetworkSpec& spec, const data::Dataset& ds,
                        const TrainConfig& cfg);

std::string run_result_to_json(const RunResult& r);
RunResult run_result_from_json(const std::string& text);
// CSV with header epoch,train_loss,val_loss
std::string losses_to_csv(const RunResult& r);

}  // namespace hqnn::train
