// Command-line front end: run experiments, cross-validate the simulator
// against the straight-line reference, sweep parameters, compare variants,
// and print closed-form speedup tables. Exit code is nonzero iff a run
// aborted or a verification failed.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cocod/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

cocod::ExperimentConfig load_config(const std::string& path,
                                    const std::vector<std::string>& overrides) {
  cocod::ExperimentConfig config = cocod::parse_config_file(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    cocod::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for communication-efficient distributed SGD"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* run_cmd = app.add_subcommand("run", "simulate one configured experiment");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--set", overrides, "override section.key=value");

  auto* oracle_cmd =
      app.add_subcommand("verify-oracle", "cross-check the simulator against the reference");
  oracle_cmd->add_option("--config", config_path, "config file")->required();
  oracle_cmd->add_option("--set", overrides, "override section.key=value");

  std::string axis;
  std::string values_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one config across an axis of values");
  sweep_cmd->add_option("--config", config_path, "config file")->required();
  sweep_cmd->add_option("--axis", axis, "N | k | a | t_comm | seed | base_batch")->required();
  sweep_cmd->add_option("--values", values_text, "comma-separated values")->required();
  sweep_cmd->add_option("--set", overrides, "override section.key=value");

  std::string configs_text;
  auto* compare_cmd = app.add_subcommand("compare", "align several variants on shared data");
  compare_cmd->add_option("--configs", configs_text, "comma-separated config files")->required();

  std::string n_text = "4", tcomp_text = "1", tcomm_text = "1", a_text = "0.5", k_text = "5";
  auto* predict_cmd = app.add_subcommand("predict", "closed-form speedup table");
  predict_cmd->add_option("--n", n_text, "worker counts");
  predict_cmd->add_option("--tcomp", tcomp_text, "compute seconds per step");
  predict_cmd->add_option("--tcomm", tcomm_text, "communication seconds per round");
  predict_cmd->add_option("--a", a_text, "overlap fractions");
  predict_cmd->add_option("--k", k_text, "communication periods");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto result = cocod::run_experiment(load_config(config_path, overrides));
      const auto& s = result.trace.summary;
      std::cout << "wrote " << result.trace_path << " and " << result.summary_path << '\n'
                << "final_loss=" << cocod::format_real(s.final_loss)
                << " final_grad_norm_sq=" << cocod::format_real(s.final_grad_norm_sq)
                << " total_sim_time_s=" << cocod::format_real(s.total_sim_time)
                << " comm_rounds=" << s.comm_rounds << " idle_s=";
      for (std::size_t i = 0; i < result.trace.idle_total.size(); ++i)
        std::cout << (i ? "," : "") << cocod::format_real(result.trace.idle_total[i]);
      std::cout << '\n';
    } else if (oracle_cmd->parsed()) {
      const auto report = cocod::verify_oracle(load_config(config_path, overrides));
      if (!report.ok) {
        std::cerr << "oracle mismatch: max deviation " << cocod::format_real(report.max_deviation)
                  << " first divergent step " << report.first_divergent_step << " worker "
                  << report.worker << '\n';
        return 1;
      }
      std::cout << "oracle ok: " << report.steps_checked << " steps, max deviation "
                << cocod::format_real(report.max_deviation) << '\n';
    } else if (sweep_cmd->parsed()) {
      const auto path =
          cocod::sweep(load_config(config_path, overrides), axis, split_list(values_text));
      std::cout << "wrote " << path << '\n';
    } else if (compare_cmd->parsed()) {
      std::vector<cocod::ExperimentConfig> configs;
      std::vector<std::string> labels;
      for (const auto& path : split_list(configs_text)) {
        configs.push_back(cocod::parse_config_file(path));
        auto stem = path;
        if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
          stem = stem.substr(slash + 1);
        if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
          stem = stem.substr(0, dot);
        labels.push_back(stem);
      }
      const auto paths = cocod::compare(configs, labels);
      std::cout << "wrote " << paths.by_step << " and " << paths.by_time << '\n';
    } else if (predict_cmd->parsed()) {
      std::vector<int> n, k;
      std::vector<double> tcomp, tcomm, a;
      for (const auto& v : split_list(n_text)) n.push_back(std::stoi(v));
      for (const auto& v : split_list(k_text)) k.push_back(std::stoi(v));
      for (const auto& v : split_list(tcomp_text)) tcomp.push_back(std::stod(v));
      for (const auto& v : split_list(tcomm_text)) tcomm.push_back(std::stod(v));
      for (const auto& v : split_list(a_text)) a.push_back(std::stod(v));
      std::cout << cocod::predict_table(n, tcomp, tcomm, a, k);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
