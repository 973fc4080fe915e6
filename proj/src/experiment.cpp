#include "hqnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "hqnn/stats.hpp"

namespace hqnn::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

// --- config -------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (data_root.has_value() == synth.has_value()) {
    throw std::invalid_argument("config: exactly one of data.root and data.synth is required");
  }
  if (rounds < 1) throw std::invalid_argument("config: rounds must be >= 1");
  if (epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
  if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (parallel_rounds < 1) throw std::invalid_argument("config: parallel_rounds must be >= 1");
  if (output_dir.empty()) throw std::invalid_argument("config: output_dir is required");
  if (preset != "full" && preset != "small") {
    throw std::invalid_argument("config: architecture_preset must be 'full' or 'small'");
  }
  if (preset == "full" && !network_json && image_size != 128) {
    throw std::invalid_argument("config: the full preset requires image_size 128");
  }
  if (synth && synth->n_per_class < 4) {
    throw std::invalid_argument("config: data.synth.n_per_class must be >= 4");
  }
  if (architecture && *architecture != "classical" && *architecture != "hybrid") {
    throw std::invalid_argument("config: architecture must be 'classical' or 'hybrid'");
  }
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!j.contains("data") || !j["data"].is_object()) {
    throw std::invalid_argument("config: missing required object field 'data'");
  }
  const json& jd = j["data"];
  if (jd.contains("root")) cfg.data_root = jd["root"].get<std::string>();
  if (jd.contains("synth")) {
    const json& js = jd["synth"];
    SynthConfig sc;
    sc.n_per_class = js.value("n_per_class", sc.n_per_class);
    sc.image_size = js.value("image_size", sc.image_size);
    sc.seed = js.value("seed", sc.seed);
    cfg.synth = sc;
  }
  cfg.preset = j.value("architecture_preset", std::string("full"));
  cfg.image_size = j.value("image_size", cfg.preset == "full" ? 128 : 32);
  if (cfg.synth) cfg.image_size = cfg.synth->image_size;
  if (j.contains("network")) cfg.network_json = j["network"].dump();
  cfg.rounds = j.value("rounds", cfg.rounds);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.base_seed = j.value("base_seed", cfg.base_seed);
  cfg.parallel_rounds = j.value("parallel_rounds", cfg.parallel_rounds);
  if (!j.contains("output_dir")) {
    throw std::invalid_argument("config: missing required field 'output_dir'");
  }
  cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("architecture")) cfg.architecture = j["architecture"].get<std::string>();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return experiment_config_from_json(text);
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.data_root) {
    j["data"] = {{"root", *cfg.data_root}};
  } else {
    j["data"] = {{"synth",
                  {{"n_per_class", cfg.synth->n_per_class},
                   {"image_size", cfg.synth->image_size},
                   {"seed", cfg.synth->seed}}}};
  }
  j["architecture_preset"] = cfg.preset;
  j["image_size"] = cfg.image_size;
  if (cfg.network_json) j["network"] = json::parse(*cfg.network_json);
  j["rounds"] = cfg.rounds;
  j["epochs"] = cfg.epochs;
  j["lr"] = cfg.lr;
  j["batch_size"] = cfg.batch_size;
  j["base_seed"] = cfg.base_seed;
  j["parallel_rounds"] = cfg.parallel_rounds;
  j["output_dir"] = cfg.output_dir;
  if (cfg.architecture) j["architecture"] = *cfg.architecture;
  return j.dump(2);
}

// --- data / architectures -------------------------------------------------------

data::Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.synth) {
    return data::synth_dataset(cfg.synth->n_per_class, cfg.synth->image_size, cfg.synth->seed);
  }
  data::Dataset ds;
  ds.train = data::load_split(*cfg.data_root, "train", cfg.image_size);
  ds.val = data::load_split(*cfg.data_root, "val", cfg.image_size);
  ds.test = data::load_split(*cfg.data_root, "test", cfg.image_size);
  return ds;
}

nn::ArchitecturePair build_architectures(const ExperimentConfig& cfg) {
  if (cfg.network_json) {
    nn::NetworkSpec classical = nn::network_spec_from_json(*cfg.network_json);
    classical.validate();
    return nn::ArchitecturePair{classical, nn::hybridize(classical)};
  }
  if (cfg.preset == "full") return nn::build_reference_architectures();
  return nn::build_small_architectures(cfg.image_size);
}

// --- file helpers ----------------------------------------------------------------

namespace {

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return "undefined";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return stats::summarize(xs).mean;
}

std::optional<double> welch_p(const std::vector<double>& hybrid,
                              const std::vector<double>& classical,
                              stats::TailDirection direction) {
  if (hybrid.size() < 2 || classical.size() < 2) return std::nullopt;
  try {
    return stats::welch_one_tailed(hybrid, classical, direction).p_one_tailed;
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // degenerate samples
  }
}

train::TrainConfig make_train_config(const ExperimentConfig& cfg, const std::string& arch,
                                     std::uint64_t seed) {
  train::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.lr = cfg.lr;
  tc.batch_size = cfg.batch_size;
  tc.seed = seed;
  tc.architecture = arch;
  return tc;
}

}  // namespace

// --- commands ----------------------------------------------------------------------

train::RunResult run_train_command(const ExperimentConfig& cfg) {
  if (!cfg.architecture) {
    throw std::invalid_argument("config: missing required field 'architecture'");
  }
  const data::Dataset ds = load_dataset(cfg);
  const nn::ArchitecturePair arch = build_architectures(cfg);
  const nn::NetworkSpec& spec =
      (*cfg.architecture == "classical") ? arch.classical : arch.hybrid;
  const train::RunResult r =
      train::train_one_run(spec, ds, make_train_config(cfg, *cfg.architecture, cfg.base_seed));
  write_file(fs::path(cfg.output_dir) / "run.json", train::run_result_to_json(r));
  write_file(fs::path(cfg.output_dir) / "losses.csv", train::losses_to_csv(r));
  return r;
}

ComparisonReport build_report(std::vector<train::RunResult> classical,
                              std::vector<train::RunResult> hybrid,
                              std::string config_echo_json) {
  const auto by_seed = [](const train::RunResult& a, const train::RunResult& b) {
    return a.seed < b.seed;
  };
  std::sort(classical.begin(), classical.end(), by_seed);
  std::sort(hybrid.begin(), hybrid.end(), by_seed);

  struct Extractor {
    const char* name;
    stats::TailDirection direction;
    std::optional<double> (*get)(const train::RunResult&);
  };
  static const Extractor extractors[] = {
      {"final_train_loss", stats::TailDirection::a_less,
       [](const train::RunResult& r) -> std::optional<double> {
         if (r.train_loss.empty()) return std::nullopt;
         return r.train_loss.back();
       }},
      {"final_val_loss", stats::TailDirection::a_less,
       [](const train::RunResult& r) -> std::optional<double> {
         if (r.val_loss.empty()) return std::nullopt;
         return r.val_loss.back();
       }},
      {"test_auroc", stats::TailDirection::a_greater,
       [](const train::RunResult& r) -> std::optional<double> { return r.test_auroc; }},
      {"test_accuracy", stats::TailDirection::a_greater,
       [](const train::RunResult& r) -> std::optional<double> { return r.test_accuracy; }},
  };

  ComparisonReport report;
  for (const Extractor& ex : extractors) {
    std::vector<double> cs, hs;
    for (const train::RunResult& r : classical) {
      if (const auto v = ex.get(r)) cs.push_back(*v);
    }
    for (const train::RunResult& r : hybrid) {
      if (const auto v = ex.get(r)) hs.push_back(*v);
    }
    MetricRow row;
    row.metric = ex.name;
    row.direction =
        (ex.direction == stats::TailDirection::a_less) ? "hybrid_less" : "hybrid_greater";
    row.classical_mean = mean_of(cs);
    row.hybrid_mean = mean_of(hs);
    row.p_value = welch_p(hs, cs, ex.direction);
    report.rows.push_back(std::move(row));
  }
  report.classical_runs = std::move(classical);
  report.hybrid_runs = std::move(hybrid);
  report.config_echo_json = std::move(config_echo_json);
  return report;
}

std::string report_to_json(const ComparisonReport& report) {
  json j;
  j["config"] = report.config_echo_json.empty() ? json(nullptr)
                                                : json::parse(report.config_echo_json);
  j["rows"] = json::array();
  for (const MetricRow& row : report.rows) {
    json jr;
    jr["metric"] = row.metric;
    jr["direction"] = row.direction;
    jr["classical_mean"] = row.classical_mean ? json(*row.classical_mean) : json(nullptr);
    jr["hybrid_mean"] = row.hybrid_mean ? json(*row.hybrid_mean) : json(nullptr);
    jr["p_value"] = row.p_value ? json(*row.p_value) : json(nullptr);
    j["rows"].push_back(jr);
  }
  const auto runs_json = [](const std::vector<train::RunResult>& runs) {
    json arr = json::array();
    for (const train::RunResult& r : runs) arr.push_back(json::parse(train::run_result_to_json(r)));
    return arr;
  };
  j["classical_runs"] = runs_json(report.classical_runs);
  j["hybrid_runs"] = runs_json(report.hybrid_runs);
  return j.dump(2);
}

std::string report_to_csv(const ComparisonReport& report) {
  std::string csv = "metric,classical_mean,hybrid_mean,p_value\n";
  for (const MetricRow& row : report.rows) {
    csv += row.metric + "," + fmt_opt(row.classical_mean) + "," + fmt_opt(row.hybrid_mean) +
           "," + fmt_opt(row.p_value) + "\n";
  }
  return csv;
}

std::string loss_curves_csv(const ComparisonReport& report, bool validation) {
  const char* kind = validation ? "val" : "train";
  std::string csv = "epoch,mean_" + std::string(kind) + "_loss_classical,mean_" + kind +
                    "_loss_hybrid\n";
  std::size_t n_epochs = 0;
  for (const train::RunResult& r : report.classical_runs) {
    n_epochs = std::max(n_epochs, (validation ? r.val_loss : r.train_loss).size());
  }
  for (const train::RunResult& r : report.hybrid_runs) {
    n_epochs = std::max(n_epochs, (validation ? r.val_loss : r.train_loss).size());
  }
  const auto mean_at = [&](const std::vector<train::RunResult>& runs, std::size_t e) {
    std::vector<double> vals;
    for (const train::RunResult& r : runs) {
      const std::vector<double>& xs = validation ? r.val_loss : r.train_loss;
      if (e < xs.size()) vals.push_back(xs[e]);
    }
    return mean_of(vals);
  };
  for (std::size_t e = 0; e < n_epochs; ++e) {
    csv += std::to_string(e + 1) + "," + fmt_opt(mean_at(report.classical_runs, e)) + "," +
           fmt_opt(mean_at(report.hybrid_runs, e)) + "\n";
  }
  return csv;
}

namespace {

void write_report_artifacts(const fs::path& dir, const ComparisonReport& report) {
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / "report.csv", report_to_csv(report));
  write_file(dir / "train_loss_curves.csv", loss_curves_csv(report, false));
  write_file(dir / "val_loss_curves.csv", loss_curves_csv(report, true));
}

}  // namespace

ComparisonReport run_experiment_command(const ExperimentConfig& cfg) {
  cfg.validate();
  const data::Dataset ds = load_dataset(cfg);
  const nn::ArchitecturePair arch = build_architectures(cfg);

  struct Job {
    std::string architecture;
    int round;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < cfg.rounds; ++i) jobs.push_back({"classical", i});
  for (int i = 0; i < cfg.rounds; ++i) jobs.push_back({"hybrid", i});

  std::vector<train::RunResult> results(jobs.size());
  std::vector<std::string> failures;
  std::mutex failures_mu;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(job.round);
      try {
        const nn::NetworkSpec& spec =
            (job.architecture == "classical") ? arch.classical : arch.hybrid;
        results[k] = train::train_one_run(spec, ds, make_train_config(cfg, job.architecture, seed));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mu);
        failures.push_back(job.architecture + " round with seed " + std::to_string(seed) +
                           " failed: " + e.what());
      }
    }
  };

  const int n_threads = std::min<int>(cfg.parallel_rounds, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (!failures.empty()) throw std::runtime_error("experiment: " + failures.front());

  std::vector<train::RunResult> classical, hybrid;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    (jobs[k].architecture == "classical" ? classical : hybrid).push_back(results[k]);
  }

  const fs::path dir(cfg.output_dir);
  for (int i = 0; i < cfg.rounds; ++i) {
    char name[48];
    std::snprintf(name, sizeof(name), "classical_%03d.json", i);
    write_file(dir / "runs" / name, train::run_result_to_json(classical[static_cast<std::size_t>(i)]));
    std::snprintf(name, sizeof(name), "hybrid_%03d.json", i);
    write_file(dir / "runs" / name, train::run_result_to_json(hybrid[static_cast<std::size_t>(i)]));
  }
  const std::string config_echo = experiment_config_to_json(cfg);
  write_file(dir / "config.json", config_echo);

  ComparisonReport report = build_report(std::move(classical), std::move(hybrid), config_echo);
  write_report_artifacts(dir, report);
  return report;
}

ComparisonReport run_report_command(const std::string& results_dir) {
  const fs::path dir(results_dir);
  const fs::path runs_dir = dir / "runs";
  if (!fs::is_directory(runs_dir)) {
    throw std::runtime_error("report: no runs directory under " + results_dir);
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(runs_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("report: no run files under " + runs_dir.string());

  std::vector<train::RunResult> classical, hybrid;
  for (const fs::path& f : files) {
    std::ifstream in(f);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    train::RunResult r;
    try {
      r = train::run_result_from_json(text);
    } catch (const std::exception& e) {
      throw std::runtime_error("report: malformed run file " + f.string() + ": " + e.what());
    }
    (r.architecture == "classical" ? classical : hybrid).push_back(std::move(r));
  }

  std::string config_echo;
  if (std::ifstream in{dir / "config.json"}) {
    config_echo.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  ComparisonReport report = build_report(std::move(classical), std::move(hybrid), config_echo);
  write_report_artifacts(dir, report);
  return report;
}

}  // namespace hqnn::experiment
