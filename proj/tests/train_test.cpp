#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hqnn/data.hpp"
#include "hqnn/nn.hpp"
#include "hqnn/train.hpp"

using namespace hqnn;

namespace {

data::Dataset tiny_data() { return data::synth_dataset(12, 8, 3); }

nn::NetworkSpec tiny_net() {
  nn::NetworkSpec s;
  s.input_h = 8;
  s.input_w = 8;
  s.input_ch = 3;
  s.layers = {
      nn::LayerSpec::flatten(),
      nn::LayerSpec::dense(192, 4), nn::LayerSpec::relu(),
      nn::LayerSpec::dense(4, 2),   nn::LayerSpec::relu(),
      nn::LayerSpec::dense(2, 2),   nn::LayerSpec::relu(),
      nn::LayerSpec::dense(2, 1),   nn::LayerSpec::sigmoid(),
  };
  return s;
}

train::TrainConfig cfg(int epochs, std::uint64_t seed = 5) {
  train::TrainConfig c;
  c.epochs = epochs;
  c.lr = 0.05;
  c.batch_size = 4;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(cfg(-1).validate(), std::invalid_argument);
  train::TrainConfig bad = cfg(1);
  bad.architecture = "quantum";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg(1);
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("epochs=0 evaluates the initialized network") {
  const auto r = train::train_one_run(tiny_net(), tiny_data(), cfg(0));
  CHECK(r.train_loss.empty());
  CHECK(r.val_loss.empty());
  CHECK(r.test_accuracy >= 0.0);
  CHECK(r.test_accuracy <= 1.0);
  REQUIRE(r.test_auroc.has_value());
  CHECK(*r.test_auroc >= 0.0);
  CHECK(*r.test_auroc <= 1.0);
}

TEST_CASE("identical config and data give identical results") {
  const auto a = train::train_one_run(tiny_net(), tiny_data(), cfg(3));
  const auto b = train::train_one_run(tiny_net(), tiny_data(), cfg(3));
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.val_loss == b.val_loss);
  CHECK(a.test_accuracy == b.test_accuracy);
  CHECK(a.test_auroc == b.test_auroc);

  const auto c = train::train_one_run(tiny_net(), tiny_data(), cfg(3, 6));
  CHECK(a.train_loss != c.train_loss);
}

TEST_CASE("loss sequence length equals epochs") {
  const auto r = train::train_one_run(tiny_net(), tiny_data(), cfg(4));
  CHECK(r.train_loss.size() == 4);
  CHECK(r.val_loss.size() == 4);
}

TEST_CASE("lr=0 freezes the training loss") {
  train::TrainConfig c = cfg(4);
  c.lr = 0.0;
  const auto r = train::train_one_run(tiny_net(), tiny_data(), c);
  for (double l : r.train_loss) {
    CHECK(std::fabs(l - r.train_loss.front()) < 1e-12);
  }
}

TEST_CASE("evaluate decision threshold and single-class auroc") {
  // zero parameters -> sigmoid(0) = 0.5 -> everything predicted class 1
  nn::Network net(tiny_net(), 1);
  net.set_params(std::vector<double>(net.param_count(), 0.0));
  const data::Dataset ds = tiny_data();
  const auto ev = train::evaluate(net, ds.test);
  std::size_t ones = 0;
  for (const auto& s : ds.test.samples) {
    if (s.label == 1) ++ones;
  }
  CHECK(ev.accuracy ==
        doctest::Approx(static_cast<double>(ones) / static_cast<double>(ds.test.samples.size())));
  REQUIRE(ev.auroc.has_value());
  CHECK(*ev.auroc == doctest::Approx(0.5));  // all scores tie

  data::DatasetSplit single;
  single.split_name = "test";
  single.samples = {ds.test.samples.front()};
  const auto ev1 = train::evaluate(net, single);
  CHECK_FALSE(ev1.auroc.has_value());
}

TEST_CASE("run result json round trip and csv shape") {
  auto r = train::train_one_run(tiny_net(), tiny_data(), cfg(2));
  const train::RunResult back = train::run_result_from_json(train::run_result_to_json(r));
  CHECK(back.architecture == r.architecture);
  CHECK(back.seed == r.seed);
  CHECK(back.train_loss == r.train_loss);
  CHECK(back.val_loss == r.val_loss);
  CHECK(back.test_accuracy == r.test_accuracy);
  CHECK(back.test_auroc == r.test_auroc);

  const std::string csv = train::losses_to_csv(r);
  CHECK(csv.rfind("epoch,train_loss,val_loss\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 epochs

  r.test_auroc.reset();
  CHECK_FALSE(train::run_result_from_json(train::run_result_to_json(r)).test_auroc.has_value());
}
