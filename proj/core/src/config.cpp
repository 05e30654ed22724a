#include "cocod/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cocod/objective.hpp"
#include "cocod/rng.hpp"
#include "cocod/theory.hpp"

namespace cocod {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for \"" + key + "\": '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad value for \"" + key + "\": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("bad value for \"" + key + "\": '" + v + "'");
}

std::vector<double> to_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_real(key, trim(cell)));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
using SectionTable = std::map<std::string, std::map<std::string, Setter>>;

const SectionTable& setters() {
  static const SectionTable table = [] {
    SectionTable t;
    auto& ex = t["experiment"];
    ex["seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.seed = static_cast<std::uint64_t>(to_int(k, v));
    };
    ex["dimension"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dimension = static_cast<int>(to_int(k, v));
    };
    ex["workers"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.workers = static_cast<int>(to_int(k, v));
    };
    ex["capabilities"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.capabilities = to_real_list(k, v);
    };
    ex["base_batch"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.base_batch = static_cast<int>(to_int(k, v));
    };
    ex["proportional_batches"] = [](ExperimentConfig& c, const std::string& k,
                                    const std::string& v) { c.proportional_batches = to_bool(k, v); };
    ex["variant"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      variant_from_name(v);  // validates
      c.variant = v;
    };
    ex["period"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.period = static_cast<int>(to_int(k, v));
    };
    ex["period_schedule"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.period_schedule = v;
    };
    ex["staleness"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.staleness = static_cast<int>(to_int(k, v));
    };
    ex["steps"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.steps = to_int(k, v);
    };
    ex["epochs"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.epochs = static_cast<int>(to_int(k, v));
    };
    ex["final_period"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "merge" && v != "truncate")
        throw std::invalid_argument("bad value for \"" + k + "\": '" + v + "'");
      c.final_period = v;
    };
    ex["x0"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.x0 = to_real(k, v);
    };
    ex["objective"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "quadratic" && v != "logistic")
        throw std::invalid_argument("bad value for \"" + k + "\": '" + v + "'");
      c.objective = v;
    };
    ex["momentum"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.momentum = to_real(k, v);
    };
    ex["weight_decay"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.weight_decay = to_real(k, v);
    };
    ex["full_batch"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.full_batch = to_bool(k, v);
    };

    auto& ds = t["dataset"];
    ds["total_points"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.total_points = static_cast<std::size_t>(to_int(k, v));
    };
    ds["spread"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.spread = to_real(k, v);
    };
    ds["shard_offset"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.shard_offset = to_real(k, v);
    };
    ds["identical_shards"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.identical_shards = to_bool(k, v);
    };
    ds["proportional_data"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.proportional_data = to_bool(k, v);
    };
    ds["file"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.dataset_file = v;
    };

    auto& lr = t["learning_rate"];
    lr["rule"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "fixed" && v != "scaled" && v != "corollary")
        throw std::invalid_argument("bad value for \"" + k + "\": '" + v + "'");
      c.lr_rule = v;
    };
    lr["base"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.lr_base = to_real(k, v);
    };
    lr["scale"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "workers" && v != "capabilities")
        throw std::invalid_argument("bad value for \"" + k + "\": '" + v + "'");
      c.lr_scale = v;
    };
    lr["warmup_steps"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.warmup_steps = to_int(k, v);
    };
    lr["decay_points"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.decay_points = to_real_list(k, v);
    };
    lr["decay_factor"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.decay_factor = to_real(k, v);
    };

    auto& cm = t["cost_model"];
    cm["per_sample_time"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.per_sample_time = to_real(k, v);
    };
    cm["alpha"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.alpha = to_real(k, v);
    };
    cm["beta"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.beta = to_real(k, v);
    };
    cm["overlap"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.overlap = to_real(k, v);
    };
    cm["jitter"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.jitter = to_real(k, v);
    };

    auto& tg = t["target"];
    tg["metric"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "none" && v != "loss" && v != "grad_norm_sq")
        throw std::invalid_argument("bad value for \"" + k + "\": '" + v + "'");
      c.target_metric = v;
    };
    tg["value"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.target_value = to_real(k, v);
    };

    auto& out = t["output"];
    out["directory"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.out_dir = v;
    };
    out["prefix"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.out_prefix = v;
    };
    out["dump_dataset"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dump_dataset = to_bool(k, v);
    };
    return t;
  }();
  return table;
}

void apply_setting(ExperimentConfig& config, const std::string& section, const std::string& key,
                   const std::string& value) {
  const auto& table = setters();
  const auto sec = table.find(section);
  if (sec == table.end()) throw std::invalid_argument("unknown section [" + section + "]");
  const auto entry = sec->second.find(key);
  if (entry == sec->second.end())
    throw std::invalid_argument("unknown key \"" + key + "\" in section [" + section + "]");
  entry->second(config, key, value);
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  ExperimentConfig config;
  std::string line;
  std::string section = "experiment";
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_setting(config, section, key, value);
  }
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos)
    throw std::invalid_argument("override key must be section.name: " + key);
  apply_setting(config, key.substr(0, dot), key.substr(dot + 1), trim(value));
}

namespace {

std::vector<std::pair<long long, int>> parse_period_schedule(const std::string& text) {
  std::vector<std::pair<long long, int>> points;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto colon = cell.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad value for \"period_schedule\": '" + text + "'");
    points.emplace_back(to_int("period_schedule", trim(cell.substr(0, colon))),
                        static_cast<int>(to_int("period_schedule", trim(cell.substr(colon + 1)))));
  }
  if (points.empty() || points.front().first != 0)
    throw std::invalid_argument("period_schedule must start at 0");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first <= points[i - 1].first)
      throw std::invalid_argument("period_schedule boundaries must increase");
  for (const auto& [start, k] : points)
    if (k < 1) throw std::invalid_argument("period_schedule periods must be >= 1");
  return points;
}

}  // namespace

Problem build_problem(const ExperimentConfig& config) {
  if (config.workers < 1) throw std::invalid_argument("bad value for \"workers\"");
  if (config.dimension < 1) throw std::invalid_argument("bad value for \"dimension\"");
  if ((config.steps > 0) == (config.epochs > 0))
    throw std::invalid_argument("exactly one of \"steps\" or \"epochs\" must be set");

  Problem p;

  std::vector<double> caps = config.capabilities;
  if (caps.empty()) caps.assign(config.workers, 1.0);
  if (caps.size() == 1 && config.workers > 1) caps.assign(config.workers, caps.front());
  if (static_cast<int>(caps.size()) != config.workers)
    throw std::invalid_argument("bad value for \"capabilities\": length mismatch");

  GeneratorParams gen = config.dataset;
  gen.dimension = static_cast<std::size_t>(config.dimension);
  if (!config.dataset_file.empty()) {
    p.dataset = load_dataset_csv(config.dataset_file);
    if (p.dataset.dim() != gen.dimension)
      throw std::invalid_argument("dataset file dimension mismatch");
  } else {
    p.dataset = generate_dataset(gen, caps, derive_seed(config.seed, kDatasetSeedTag));
  }

  const bool shards_follow_caps = gen.proportional_data && !gen.identical_shards;
  const std::vector<double> shard_caps =
      shards_follow_caps ? caps : std::vector<double>(config.workers, 1.0);
  p.partition = partition_proportional(p.dataset, shard_caps);
  // partition_proportional copied the splitting weights; keep the real ones
  p.partition.capabilities = caps;
  assign_batch_sizes(p.partition, config.base_batch, config.proportional_batches);

  p.objective = make_objective(config.objective, p.dataset);

  p.variant.kind = variant_from_name(config.variant);
  p.variant.staleness = config.staleness;
  if (p.variant.staleness < 1) throw std::invalid_argument("bad value for \"staleness\"");

  // one epoch = the batches needed to touch every shard point once
  long long spe = 0;
  for (int i = 0; i < config.workers; ++i) {
    const long long batches =
        (static_cast<long long>(p.partition.shards[i].size()) + p.partition.batch_sizes[i] - 1) /
        p.partition.batch_sizes[i];
    spe = std::max(spe, batches);
  }
  p.steps_per_epoch = spe;
  p.total_steps = config.steps > 0 ? config.steps : static_cast<long long>(config.epochs) * spe;
  const bool epoch_units = config.epochs > 0;

  if (!config.period_schedule.empty()) {
    auto points = parse_period_schedule(config.period_schedule);
    if (epoch_units)
      for (auto& [start, k] : points) start *= spe;
    p.variant.period.points = std::move(points);
  } else {
    if (config.period < 1) throw std::invalid_argument("bad value for \"period\"");
    p.variant.period = PeriodSchedule::constant_k(config.period);
  }

  if (config.final_period == "truncate") {
    const int k = p.variant.period.at(0);
    if (p.variant.period.constant() && p.total_steps % k != 0) {
      p.total_steps -= p.total_steps % k;
      if (p.total_steps == 0)
        throw std::invalid_argument("final_period=truncate leaves no complete period");
    }
  }

  p.cost.per_sample_time = config.per_sample_time;
  p.cost.capabilities = caps;
  p.cost.alpha = config.alpha;
  p.cost.beta = config.beta;
  p.cost.overlap = config.overlap;
  p.cost.jitter = config.jitter;
  p.cost.validate();

  p.update.momentum = config.momentum;
  p.update.weight_decay = config.weight_decay;
  p.update.full_batch = config.full_batch;

  // learning-rate rule
  p.lr.warmup_steps = config.warmup_steps;
  p.lr.decay_factor = config.decay_factor;
  for (double d : config.decay_points)
    p.lr.decay_steps.push_back(epoch_units ? static_cast<long long>(d) * spe
                                           : static_cast<long long>(d));
  std::sort(p.lr.decay_steps.begin(), p.lr.decay_steps.end());
  if (config.lr_rule == "fixed") {
    p.lr.base = config.lr_base;
    p.lr.scale_factor = 1.0;
  } else if (config.lr_rule == "scaled") {
    p.lr.base = config.lr_base;
    if (config.lr_scale == "workers") {
      p.lr.scale_factor = static_cast<double>(config.workers);
    } else {
      p.lr.scale_factor = scaled_lr(1.0, caps);
    }
  } else {  // corollary: variance-matched step size from the exact constants
    const auto constants = compute_assumption_constants(*p.objective, p.partition);
    p.lr.base = variance_scaled_lr(std::sqrt(constants.sigma2), p.total_steps,
                                   static_cast<double>(p.partition.sum_batch()));
    p.lr.scale_factor = 1.0;
  }
  if (!(p.lr.base > 0.0)) throw std::invalid_argument("bad value for \"base\"");

  p.x0.assign(static_cast<std::size_t>(config.dimension), config.x0);
  p.sampling_seed = derive_seed(config.seed, kSamplingSeedTag);

  if (config.target_metric != "none") {
    Target t;
    t.metric = config.target_metric == "loss" ? Target::Metric::kLoss : Target::Metric::kGradNormSq;
    t.value = config.target_value;
    p.target = t;
  }
  return p;
}

}  // namespace cocod
