// marsec: train, evaluate, sweep and emit plot tables.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad configuration or arguments,
// 3 I/O failure, 4 incompatible checkpoint, 5 missing input columns.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "marsec/experiment/config.hpp"
#include "marsec/experiment/plotdata.hpp"
#include "marsec/experiment/runner.hpp"

namespace fs = std::filesystem;
using namespace marsec;
using namespace marsec::experiment;

namespace {

struct CommonFlags {
  std::string config;
  CliOverrides cli;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file or a run manifest");
  app->add_option("--seed", f.cli.seed, "experiment seed");
  app->add_option("--iterations", f.cli.iterations, "training iterations (environment steps)");
  app->add_option("--out", f.cli.output, "output directory");
  app->add_option("--profile", f.cli.profile, "iteration budget preset")->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--baseline", f.cli.baseline, "approach")->check(CLI::IsMember({"sac-cvae", "sac", "greedy", "nonjam"}));
  app->add_option("--pattern", f.cli.pattern, "Eve movement pattern")->check(CLI::IsMember({"approach", "recede"}));
  app->add_option("--pairs", f.cli.pairs, "number of Bob/Eve pairs");
}

ExperimentConfig resolve(const CommonFlags& f) {
  std::optional<Json> file;
  if (!f.config.empty()) file = config_document(read_json_file(f.config));
  return resolve_config(file, f.cli, process_environment());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const Json& s) {
  std::cout << "secrecy " << s["total_secrecy"]["mean"].get<double>() << " +- " << s["total_secrecy"]["std"].get<double>()
            << "  energy " << s["total_energy"]["mean"].get<double>() << " +- " << s["total_energy"]["std"].get<double>()
            << "  objective " << s["objective"]["mean"].get<double>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure maritime UAV jamming: training and evaluation"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, sweep_f;
  auto* train = app.add_subcommand("train", "train an agent and write manifest, metrics and checkpoint");
  add_common(train, train_f);

  auto* eval = app.add_subcommand("eval", "run deterministic episodes and write traces and a summary");
  add_common(eval, eval_f);
  std::string checkpoint;
  std::optional<int> episodes;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file (default <out>/checkpoint.txt)");
  eval->add_option("--episodes", episodes, "evaluation episodes (default final_eval_episodes)");

  auto* plot = app.add_subcommand("plotdata", "derive a plot table from metrics, traces or sweep results");
  std::string kind, input, plot_out;
  plot->add_option("--kind", kind, "convergence | objectives | trajectory | secrecy-compare")->required();
  plot->add_option("--input", input, "metrics.jsonl, trace CSV or sweep.csv")->required();
  plot->add_option("--out", plot_out, "output CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "train and evaluate every seed x baseline x pattern");
  add_common(sweep, sweep_f);
  std::string seeds = "0,1,2", baselines = "sac-cvae,sac,greedy,nonjam", patterns = "approach,recede";
  sweep->add_option("--seeds", seeds, "comma-separated seeds");
  sweep->add_option("--baselines", baselines, "comma-separated approaches");
  sweep->add_option("--patterns", patterns, "comma-separated Eve patterns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      const ExperimentConfig c = resolve(train_f);
      run_train(c);
      std::cout << "wrote " << c.output << '\n';
    } else if (*eval) {
      const ExperimentConfig c = resolve(eval_f);
      const fs::path ck = checkpoint.empty() ? fs::path(c.output) / "checkpoint.txt" : fs::path(checkpoint);
      const TrainedModel m = load_model(ck, c);
      print_summary(run_eval(c, m, episodes.value_or(c.final_eval_episodes), fs::path(c.output) / "eval"));
    } else if (*plot) {
      const Table t = emit_plot_data(parse_plot_kind(kind), input, plot_out);
      std::cout << "wrote " << t.rows.size() << " rows to " << plot_out << '\n';
    } else if (*sweep) {
      const ExperimentConfig c = resolve(sweep_f);
      SweepSpec spec;
      spec.seeds.clear();
      spec.baselines.clear();
      spec.patterns.clear();
      for (const auto& s : split_list(seeds)) {
        try {
          spec.seeds.push_back(std::stoull(s));
        } catch (const std::exception&) {
          throw ConfigError("bad seed '" + s + "'");
        }
      }
      for (const auto& b : split_list(baselines)) spec.baselines.push_back(parse_baseline(b));
      for (const auto& p : split_list(patterns)) spec.patterns.push_back(parse_eve_pattern(p));
      const Table t = run_sweep(c, spec);
      std::cout << "wrote " << t.rows.size() << " rows to " << (fs::path(c.output) / "sweep.csv").string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nn::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return 4;
  } catch (const MissingColumnError& e) {
    std::cerr << "missing column: " << e.what() << '\n';
    return 5;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
