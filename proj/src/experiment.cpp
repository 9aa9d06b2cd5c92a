// Copyright 2026 The grouprec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "grouprec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "grouprec/baselines.hpp"
#include "grouprec/consensus.hpp"
#include "grouprec/optimizer.hpp"
#include "json.hpp"

namespace grouprec {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kConfigFile = "config.json";
constexpr const char* kUsersFile = "users.csv";
constexpr const char* kItemsFile = "items.csv";
constexpr const char* kSplitFile = "split.csv";
constexpr const char* kUserFeaturesFile = "user_features.csv";
constexpr const char* kItemFeaturesFile = "item_features.csv";
constexpr const char* kObjectiveFile = "objective.csv";
constexpr const char* kGroupsFile = "groups.csv";
constexpr const char* kGroupStatusFile = "groups_status.json";
constexpr const char* kRecommendationsFile = "recommendations.csv";

void log(const ExperimentConfig& cfg, const std::string& message) {
  if (cfg.verbose) std::clog << "[grouprec] " << message << '\n';
}

std::uint64_t mix(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_param(const std::optional<double>& param) {
  return param ? format_double(*param) : std::string();
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::int64_t to_int(const std::string& text, const std::string& what) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad " + what + " '" + text + "'");
  }
  return value;
}

double to_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad " + what + " '" + text + "'");
  }
  return value;
}

std::optional<double> to_param(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return to_double(text, "parameter");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void require(const fs::path& workdir, const char* file, const char* stage) {
  if (!fs::exists(workdir / file)) {
    throw std::runtime_error((workdir / file).string() + " is missing; run stage " + stage +
                             " first");
  }
}

// Key of a ranked list inside one repetition.
using ListKey = std::tuple<std::size_t, int, bool, double>;

ListKey list_key(std::size_t group_id, Algorithm algorithm, const std::optional<double>& param) {
  return {group_id, static_cast<int>(algorithm), param.has_value(), param.value_or(0.0)};
}

void check_unit(double value, const char* what) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}

json to_json_value(const ExperimentConfig& cfg) {
  json groups = json::array();
  for (const GroupRequest& g : cfg.groups) {
    groups.push_back({{"kind", to_string(g.kind)}, {"size", g.size}, {"count", g.count}});
  }
  json algorithms = json::array();
  for (Algorithm a : cfg.algorithms) algorithms.push_back(to_string(a));
  return json{
      {"dataset",
       {{"path", cfg.dataset_path},
        {"format", to_string(cfg.format)},
        {"min_ratings", cfg.min_ratings}}},
      {"factorization",
       {{"dim", cfg.factorization.dim},
        {"reg", cfg.factorization.reg},
        {"max_iters", cfg.factorization.max_iters},
        {"tol", cfg.factorization.tol},
        {"max_block_iters", cfg.factorization.max_block_iters}}},
      {"holdout", {{"frac", cfg.eval.holdout_frac}, {"mode", to_string(cfg.holdout_mode)}}},
      {"repetitions", cfg.eval.repetitions},
      {"seed", cfg.seed},
      {"groups", groups},
      {"sim_threshold", cfg.sim_threshold},
      {"retry_budget", cfg.retry_budget},
      {"gamma_grid", cfg.gamma_grid},
      {"algorithms", algorithms},
      {"fm_lambdas", cfg.fm_lambdas},
      {"user_affinity", to_string(cfg.user_affinity)},
      {"metrics",
       {{"k_list", cfg.eval.k_list},
        {"relevance_threshold", cfg.eval.relevance_threshold},
        {"beta", cfg.eval.beta},
        {"dcg_log_base", cfg.eval.dcg_log_base}}},
      {"output_dir", cfg.output_dir},
      {"verbose", cfg.verbose},
  };
}

void reject_unknown(const json& object, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw std::invalid_argument("unknown config key '" + where + key + "'");
    }
  }
}

template <typename T>
void read_into(const json& object, const char* key, T& target) {
  if (object.contains(key)) target = object.at(key).get<T>();
}

ExperimentConfig from_json_value(const json& j) {
  reject_unknown(j,
                 {"dataset", "factorization", "holdout", "repetitions", "seed", "groups",
                  "sim_threshold", "retry_budget", "gamma_grid", "algorithms", "fm_lambdas",
                  "user_affinity", "metrics", "output_dir", "verbose", "repetition"},
                 "");
  ExperimentConfig cfg;
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    reject_unknown(d, {"path", "format", "min_ratings"}, "dataset.");
    read_into(d, "path", cfg.dataset_path);
    if (d.contains("format")) cfg.format = parse_dataset_format(d.at("format").get<std::string>());
    read_into(d, "min_ratings", cfg.min_ratings);
  }
  if (j.contains("factorization")) {
    const json& f = j.at("factorization");
    reject_unknown(f, {"dim", "reg", "max_iters", "tol", "max_block_iters"}, "factorization.");
    read_into(f, "dim", cfg.factorization.dim);
    read_into(f, "reg", cfg.factorization.reg);
    read_into(f, "max_iters", cfg.factorization.max_iters);
    read_into(f, "tol", cfg.factorization.tol);
    read_into(f, "max_block_iters", cfg.factorization.max_block_iters);
  }
  if (j.contains("holdout")) {
    const json& h = j.at("holdout");
    reject_unknown(h, {"frac", "mode"}, "holdout.");
    read_into(h, "frac", cfg.eval.holdout_frac);
    if (h.contains("mode")) cfg.holdout_mode = parse_holdout_mode(h.at("mode").get<std::string>());
  }
  read_into(j, "repetitions", cfg.eval.repetitions);
  read_into(j, "seed", cfg.seed);
  if (j.contains("groups")) {
    cfg.groups.clear();
    for (const json& g : j.at("groups")) {
      reject_unknown(g, {"kind", "size", "count"}, "groups[].");
      GroupRequest req{parse_group_kind(g.at("kind").get<std::string>()), g.at("size").get<int>(),
                       0};
      req.count = g.contains("count") ? g.at("count").get<int>()
                                      : default_group_count(req.kind, req.size);
      cfg.groups.push_back(req);
    }
  }
  read_into(j, "sim_threshold", cfg.sim_threshold);
  read_into(j, "retry_budget", cfg.retry_budget);
  read_into(j, "gamma_grid", cfg.gamma_grid);
  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    for (const json& a : j.at("algorithms")) {
      cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
  }
  read_into(j, "fm_lambdas", cfg.fm_lambdas);
  if (j.contains("user_affinity")) {
    cfg.user_affinity = parse_user_affinity_mode(j.at("user_affinity").get<std::string>());
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    reject_unknown(m, {"k_list", "relevance_threshold", "beta", "dcg_log_base"}, "metrics.");
    read_into(m, "k_list", cfg.eval.k_list);
    read_into(m, "relevance_threshold", cfg.eval.relevance_threshold);
    read_into(m, "beta", cfg.eval.beta);
    read_into(m, "dcg_log_base", cfg.eval.dcg_log_base);
  }
  read_into(j, "output_dir", cfg.output_dir);
  read_into(j, "verbose", cfg.verbose);
  return cfg;
}

struct Workdir {
  ExperimentConfig cfg;
  int repetition = 0;
  IdMap users;
  IdMap items;
  RatingsMatrix split;
};

Workdir open_workdir(const std::string& path) {
  const fs::path dir(path);
  require(dir, kConfigFile, "factorize");
  require(dir, kSplitFile, "factorize");
  Workdir w;
  w.cfg = load_workdir_config(path, &w.repetition);
  w.users = read_id_map((dir / kUsersFile).string());
  w.items = read_id_map((dir / kItemsFile).string());
  w.split = read_split((dir / kSplitFile).string(), w.users.size(), w.items.size());
  return w;
}


ExperimentResult finish(const ExperimentConfig& cfg, std::vector<MetricRow> all,
                        std::size_t groups_failed, std::vector<int> failed,
                        const std::string& output_dir) {
  ExperimentResult result;
  result.all_metrics = std::move(all);
  result.metrics = select_best_params(result.all_metrics, &result.selection);
  result.groups_failed = groups_failed;
  result.failed_repetitions = std::move(failed);
  if (!output_dir.empty()) {
    const fs::path dir(output_dir);
    fs::create_directories(dir);
    {
      std::ofstream out(dir / "metrics.csv", std::ios::trunc);
      write_metrics_csv(out, result.metrics);
    }
    {
      std::ofstream out(dir / "metrics_all.csv", std::ios::trunc);
      write_all_metrics_csv(out, result.all_metrics);
    }
    {
      std::ofstream out(dir / "selection.csv", std::ios::trunc);
      write_selection_csv(out, result.selection);
    }
    json failed_json = result.failed_repetitions;
    write_text(dir / "status.json",
               json{{"complete", result.complete()},
                    {"repetitions", cfg.eval.repetitions},
                    {"failed_repetitions", failed_json},
                    {"groups_failed", result.groups_failed}}
                       .dump(2) +
                   "\n");
  }
  return result;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSagaLinear: return "saga-linear";
    case Algorithm::kSagaConcave: return "saga-concave";
    case Algorithm::kAverageMisery: return "am";
    case Algorithm::kFm: return "fm";
    case Algorithm::kLeastMisery: return "lm";
    case Algorithm::kMostPleasure: return "mp";
    case Algorithm::kPlurality: return "plurality";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  for (Algorithm a : {Algorithm::kSagaLinear, Algorithm::kSagaConcave, Algorithm::kAverageMisery,
                      Algorithm::kFm, Algorithm::kLeastMisery, Algorithm::kMostPleasure,
                      Algorithm::kPlurality}) {
    if (text == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

bool is_saga(Algorithm algorithm) {
  return algorithm == Algorithm::kSagaLinear || algorithm == Algorithm::kSagaConcave;
}

std::string to_string(HoldoutMode mode) {
  return mode == HoldoutMode::kItems ? "items" : "entries";
}

HoldoutMode parse_holdout_mode(const std::string& text) {
  if (text == "items") return HoldoutMode::kItems;
  if (text == "entries") return HoldoutMode::kEntries;
  throw std::invalid_argument("unknown holdout mode '" + text + "'");
}

std::string to_string(UserAffinityMode mode) {
  switch (mode) {
    case UserAffinityMode::kCosine: return "cosine";
    case UserAffinityMode::kIndicator: return "indicator";
    case UserAffinityMode::kIdentity: return "identity";
  }
  return "?";
}

UserAffinityMode parse_user_affinity_mode(const std::string& text) {
  if (text == "cosine") return UserAffinityMode::kCosine;
  if (text == "indicator") return UserAffinityMode::kIndicator;
  if (text == "identity") return UserAffinityMode::kIdentity;
  throw std::invalid_argument("unknown user affinity '" + text + "'");
}

int default_group_count(GroupKind kind, int size) {
  static const std::map<int, int> random = {{2, 294}, {4, 146}, {6, 98}, {8, 72}};
  static const std::map<int, int> similar = {{2, 190}, {4, 40}, {6, 18}, {8, 10}};
  const auto& table = kind == GroupKind::kRandom ? random : similar;
  const auto it = table.find(size);
  return it == table.end() ? 100 : it->second;
}

std::vector<GroupRequest> default_group_requests(GroupKind kind) {
  std::vector<GroupRequest> out;
  for (int size : {2, 4, 6, 8}) out.push_back({kind, size, default_group_count(kind, size)});
  return out;
}

std::vector<GroupRequest> default_group_requests() {
  std::vector<GroupRequest> out = default_group_requests(GroupKind::kRandom);
  for (const GroupRequest& r : default_group_requests(GroupKind::kSimilar)) out.push_back(r);
  return out;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.factorization);
  validate(cfg.eval);
  if (cfg.min_ratings < 0) throw std::invalid_argument("min_ratings must be >= 0");
  if (cfg.groups.empty()) throw std::invalid_argument("no group kinds/sizes requested");
  std::set<std::pair<int, int>> seen;
  for (const GroupRequest& g : cfg.groups) {
    if (g.size < 2) throw std::invalid_argument("group size must be >= 2");
    if (g.count < 1) throw std::invalid_argument("group count must be >= 1");
    if (!seen.emplace(static_cast<int>(g.kind), g.size).second) {
      throw std::invalid_argument("group kind/size requested twice");
    }
  }
  if (!(cfg.sim_threshold >= -1.0 && cfg.sim_threshold <= 1.0)) {
    throw std::invalid_argument("sim_threshold must lie in [-1, 1]");
  }
  if (cfg.retry_budget < 1) throw std::invalid_argument("retry_budget must be >= 1");
  if (cfg.algorithms.empty()) throw std::invalid_argument("no algorithms requested");
  if (std::set<Algorithm>(cfg.algorithms.begin(), cfg.algorithms.end()).size() !=
      cfg.algorithms.size()) {
    throw std::invalid_argument("algorithm listed twice");
  }
  const bool any_saga = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(), is_saga);
  if (any_saga && cfg.gamma_grid.empty()) throw std::invalid_argument("empty gamma grid");
  for (double g : cfg.gamma_grid) {
    if (!(g > 0.0 && std::isfinite(g))) throw std::invalid_argument("gamma must be > 0");
  }
  const bool any_fm = std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::kFm) !=
                      cfg.algorithms.end();
  if (any_fm && cfg.fm_lambdas.empty()) throw std::invalid_argument("empty fm lambda grid");
  for (double l : cfg.fm_lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("fm lambda must lie in [0, 1]");
  }
  if (any_saga && cfg.user_affinity == UserAffinityMode::kIdentity) {
    // Identity affinity zeroes every member weight of a real group.
    throw std::invalid_argument("identity user affinity gives groups no weight");
  }
  check_unit(cfg.eval.holdout_frac, "holdout_frac");
}

std::string config_to_json(const ExperimentConfig& cfg, std::optional<int> repetition) {
  json j = to_json_value(cfg);
  if (repetition) j["repetition"] = *repetition;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text, std::optional<int>* repetition) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    ExperimentConfig cfg = from_json_value(j);
    if (repetition) {
      *repetition = j.contains("repetition") ? std::optional<int>(j.at("repetition").get<int>())
                                             : std::nullopt;
    }
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t master, int repetition, Stage stage,
                          std::uint64_t index) {
  const std::uint64_t base = mix(mix(master) + static_cast<std::uint64_t>(repetition));
  return mix(base + (static_cast<std::uint64_t>(stage) << 32) + index);
}

Repetition prepare_repetition(const RatingsMatrix& filtered, const ExperimentConfig& cfg,
                              int rep) {
  Repetition out;
  out.index = rep;
  const std::uint64_t holdout_seed = derive_seed(cfg.seed, rep, Stage::kHoldout);
  out.split = cfg.holdout_mode == HoldoutMode::kItems
                  ? holdout_split(filtered, cfg.eval.holdout_frac, holdout_seed)
                  : holdout_split_entries(filtered, cfg.eval.holdout_frac, holdout_seed);
  FactorizationConfig fc = cfg.factorization;
  fc.seed = derive_seed(cfg.seed, rep, Stage::kFactorize);
  out.factors = factorize(out.split, fc);
  log(cfg, "rep " + std::to_string(rep) + ": " + std::to_string(out.split.n_train()) +
               " train / " + std::to_string(out.split.n_test()) + " test, objective " +
               format_double(out.factors.objective_trace.back()) + " after " +
               std::to_string(out.factors.objective_trace.size() - 1) + " alternations");
  return out;
}

GroupFormation form_groups(const RatingsMatrix& split, const FeatureMatrix& user_features,
                           const ExperimentConfig& cfg, int rep) {
  GroupFormation out;
  for (std::size_t q = 0; q < cfg.groups.size(); ++q) {
    const GroupRequest& req = cfg.groups[q];
    GroupSpec spec;
    spec.kind = req.kind;
    spec.size = req.size;
    spec.count = req.count;
    spec.sim_threshold = cfg.sim_threshold;
    spec.retry_budget = cfg.retry_budget;
    spec.seed = derive_seed(cfg.seed, rep, Stage::kGroups, q);
    GroupDraw draw = make_groups(spec, user_features, split);
    if (draw.failed > 0) {
      log(cfg, "rep " + std::to_string(rep) + ": " + std::to_string(draw.failed) + " " +
                   to_string(req.kind) + " groups of size " + std::to_string(req.size) +
                   " could not be formed");
    }
    out.failed += draw.failed;
    for (Group& g : draw.groups) {
      out.groups.push_back({out.groups.size(), req.kind, req.size, std::move(g)});
    }
  }
  return out;
}

std::vector<std::pair<Algorithm, std::optional<double>>> parameter_grid(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<Algorithm, std::optional<double>>> grid;
  for (Algorithm a : cfg.algorithms) {
    if (is_saga(a)) {
      for (double g : cfg.gamma_grid) grid.emplace_back(a, g);
    } else if (a == Algorithm::kFm) {
      for (double l : cfg.fm_lambdas) grid.emplace_back(a, l);
    } else {
      grid.emplace_back(a, std::nullopt);
    }
  }
  return grid;
}

std::vector<RankedList> recommend_group(const Group& group, const Factorization& factors,
                                        const ExperimentConfig& cfg) {
  const int k_max = *std::max_element(cfg.eval.k_list.begin(), cfg.eval.k_list.end());
  const std::vector<ItemId> observed = group.observed_items();
  std::vector<ItemId> candidates;
  {
    std::size_t o = 0;
    for (std::size_t i = 0; i < factors.items.rows(); ++i) {
      while (o < observed.size() && observed[o] < i) ++o;
      if (o < observed.size() && observed[o] == i) continue;
      candidates.push_back(static_cast<ItemId>(i));
    }
  }
  std::vector<RankedList> out;
  if (candidates.empty()) return out;

  std::unique_ptr<SquaredDistanceRows> distances;
  std::vector<double> weights;
  std::map<double, std::shared_ptr<const AffinityRows>> rows_by_gamma;
  std::unique_ptr<PredictedScores> scores;

  for (const auto& [algorithm, param] : parameter_grid(cfg)) {
    if (is_saga(algorithm)) {
      if (!distances) {
        distances = std::make_unique<SquaredDistanceRows>(factors.items, observed);
        weights = member_weights(group, UserAffinity(cfg.user_affinity, &factors.users));
      }
      auto& rows = rows_by_gamma[*param];
      if (!rows) rows = std::make_shared<const AffinityRows>(distances->affinity(*param));
      const GscoreState state(group, weights, rows);
      SaturationSpec sat;
      sat.item = ItemSaturation::kLog1p;
      sat.user = algorithm == Algorithm::kSagaLinear ? UserSaturation::kIdentity
                                                     : UserSaturation::kSqrt;
      RecommendationResult r = saga(state, sat, k_max);
      out.push_back({algorithm, param, std::move(r.selected), std::move(r.gains)});
      continue;
    }
    if (!scores) {
      scores = std::make_unique<PredictedScores>(
          PredictedScores::from_factors(factors, group, candidates, true));
    }
    RankedItems ranked;
    switch (algorithm) {
      case Algorithm::kAverageMisery: ranked = average_misery(*scores, k_max); break;
      case Algorithm::kFm: ranked = fm(*scores, k_max, *param); break;
      case Algorithm::kLeastMisery: ranked = least_misery(*scores, k_max); break;
      case Algorithm::kMostPleasure: ranked = most_pleasure(*scores, k_max); break;
      case Algorithm::kPlurality: ranked = plurality(*scores, k_max); break;
      default: break;
    }
    out.push_back({algorithm, param, std::move(ranked.items), std::move(ranked.scores)});
  }
  return out;
}

std::vector<RecommendationRow> recommend_groups(const Repetition& rep,
                                                const std::vector<GroupRecord>& groups,
                                                const ExperimentConfig& cfg) {
  std::vector<RecommendationRow> rows;
  for (const GroupRecord& g : groups) {
    for (const RankedList& list : recommend_group(g.group, rep.factors, cfg)) {
      for (std::size_t p = 0; p < list.items.size(); ++p) {
        rows.push_back(
            {rep.index, g.id, list.algorithm, list.param, p + 1, list.items[p], list.scores[p]});
      }
    }
  }
  log(cfg, "rep " + std::to_string(rep.index) + ": recommended for " +
               std::to_string(groups.size()) + " groups");
  return rows;
}

std::vector<MetricRow> evaluate_repetition(int rep, const RatingsMatrix& split,
                                           const std::vector<GroupRecord>& groups,
                                           const std::vector<RecommendationRow>& recommendations,
                                           const ExperimentConfig& cfg) {
  const TestRelevance test(split, cfg.eval.relevance_threshold);
  std::map<ListKey, std::vector<ItemId>> lists;
  for (const RecommendationRow& r : recommendations) {
    if (r.repetition != rep) continue;
    auto& list = lists[list_key(r.group_id, r.algorithm, r.param)];
    if (list.size() < r.rank) list.resize(r.rank, 0);
    list[r.rank - 1] = r.item;
  }
  const auto grid = parameter_grid(cfg);
  std::vector<MetricRow> out;
  for (const GroupRequest& req : cfg.groups) {
    std::vector<const GroupRecord*> members;
    for (const GroupRecord& g : groups) {
      if (g.kind == req.kind && g.size == req.size) members.push_back(&g);
    }
    if (members.empty()) continue;
    for (int k : cfg.eval.k_list) {
      for (const auto& [algorithm, param] : grid) {
        double dcg_sum = 0.0;
        double psr_sum = 0.0;
        std::size_t psr_count = 0;
        for (const GroupRecord* g : members) {
          const auto it = lists.find(list_key(g->id, algorithm, param));
          const std::vector<ItemId> empty;
          const std::vector<ItemId>& list = it == lists.end() ? empty : it->second;
          const std::span<const ItemId> top(list.data(),
                                            std::min(list.size(), static_cast<std::size_t>(k)));
          dcg_sum += group_dcg(g->group, top, test, cfg.eval.dcg_log_base);
          if (const auto p = psr(g->group, top, test, cfg.eval.beta)) {
            psr_sum += *p;
            ++psr_count;
          }
        }
        MetricRow row{rep, req.kind, req.size, k, algorithm, param,
                      dcg_sum / static_cast<double>(members.size()), std::nullopt};
        if (psr_count > 0) row.psr = psr_sum / static_cast<double>(psr_count);
        out.push_back(row);
      }
    }
  }
  return out;
}

std::vector<MetricRow> select_best_params(const std::vector<MetricRow>& rows,
                                          std::vector<ParamSelection>* selection) {
  using Key = std::tuple<int, int, int, int>;
  struct Candidate {
    std::optional<double> param;
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::vector<Key> order;
  std::map<Key, std::vector<Candidate>> candidates;
  for (const MetricRow& r : rows) {
    const Key key{static_cast<int>(r.kind), r.size, r.k, static_cast<int>(r.algorithm)};
    auto [it, inserted] = candidates.try_emplace(key);
    if (inserted) order.push_back(key);
    auto c = std::find_if(it->second.begin(), it->second.end(),
                          [&](const Candidate& c) { return c.param == r.param; });
    if (c == it->second.end()) {
      it->second.push_back({r.param});
      c = std::prev(it->second.end());
    }
    c->sum += r.dcg;
    ++c->n;
  }
  std::map<Key, std::optional<double>> chosen;
  for (const Key& key : order) {
    const auto& list = candidates.at(key);
    const Candidate* best = &list.front();
    double best_mean = best->sum / static_cast<double>(best->n);
    for (const Candidate& c : list) {
      const double mean = c.sum / static_cast<double>(c.n);
      if (mean > best_mean) {
        best = &c;
        best_mean = mean;
      }
    }
    chosen[key] = best->param;
    if (selection) {
      selection->push_back({static_cast<GroupKind>(std::get<0>(key)), std::get<1>(key),
                            std::get<2>(key), static_cast<Algorithm>(std::get<3>(key)),
                            best->param, best_mean});
    }
  }
  std::vector<MetricRow> out;
  for (const MetricRow& r : rows) {
    const Key key{static_cast<int>(r.kind), r.size, r.k, static_cast<int>(r.algorithm)};
    if (chosen.at(key) == r.param) out.push_back(r);
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "repetition,group_kind,group_size,k,algorithm,gamma,dcg,psr\n";
  for (const MetricRow& r : rows) {
    out << r.repetition << ',' << to_string(r.kind) << ',' << r.size << ',' << r.k << ','
        << to_string(r.algorithm) << ',' << (is_saga(r.algorithm) ? format_param(r.param) : "")
        << ',' << format_double(r.dcg) << ',' << format_optional(r.psr) << '\n';
  }
}

void write_all_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "repetition,group_kind,group_size,k,algorithm,param,dcg,psr\n";
  for (const MetricRow& r : rows) {
    out << r.repetition << ',' << to_string(r.kind) << ',' << r.size << ',' << r.k << ','
        << to_string(r.algorithm) << ',' << format_param(r.param) << ','
        << format_double(r.dcg) << ',' << format_optional(r.psr) << '\n';
  }
}

void write_selection_csv(std::ostream& out, const std::vector<ParamSelection>& selection) {
  out << "group_kind,group_size,k,algorithm,param,mean_dcg\n";
  for (const ParamSelection& s : selection) {
    out << to_string(s.kind) << ',' << s.size << ',' << s.k << ',' << to_string(s.algorithm)
        << ',' << format_param(s.param) << ',' << format_double(s.mean_dcg) << '\n';
  }
}

void write_groups_csv(std::ostream& out, int rep, const std::vector<GroupRecord>& groups,
                      const IdMap& users) {
  for (const GroupRecord& g : groups) {
    for (UserId u : g.group.members) {
      out << rep << ',' << g.id << ',' << to_string(g.kind) << ',' << g.size << ','
          << users.external(u) << '\n';
    }
  }
}

void write_recommendations_csv(std::ostream& out, const std::vector<RecommendationRow>& rows,
                               const IdMap& items) {
  for (const RecommendationRow& r : rows) {
    out << r.repetition << ',' << r.group_id << ',' << to_string(r.algorithm) << ','
        << format_param(r.param) << ',' << r.rank << ',' << items.external(r.item) << ','
        << format_double(r.score) << '\n';
  }
}

namespace {

constexpr const char* kGroupsHeader = "repetition,group_id,group_kind,group_size,user_id\n";
constexpr const char* kRecommendationsHeader =
    "repetition,group_id,algorithm,param,rank,item_id,marginal_gain\n";

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path, std::size_t width) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != width) throw std::runtime_error(path + ": bad line '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<GroupRecord> read_groups_csv(const std::string& path, const RatingsMatrix& split,
                                         const IdMap& users) {
  std::vector<GroupRecord> out;
  std::vector<std::vector<UserId>> members;
  for (const auto& f : read_csv_rows(path, 5)) {
    const auto id = static_cast<std::size_t>(to_int(f[1], "group id"));
    if (id > out.size()) throw std::runtime_error(path + ": group ids are not consecutive");
    if (id == out.size()) {
      out.push_back({id, parse_group_kind(f[2]), static_cast<int>(to_int(f[3], "group size")),
                     {}});
      members.emplace_back();
    }
    members[id].push_back(users.index(to_int(f[4], "user id")));
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    out[g].group = make_group(split, std::move(members[g]));
  }
  return out;
}

std::vector<RecommendationRow> read_recommendations_csv(const std::string& path,
                                                        const IdMap& items) {
  std::vector<RecommendationRow> out;
  for (const auto& f : read_csv_rows(path, 7)) {
    out.push_back({static_cast<int>(to_int(f[0], "repetition")),
                   static_cast<std::size_t>(to_int(f[1], "group id")), parse_algorithm(f[2]),
                   to_param(f[3]), static_cast<std::size_t>(to_int(f[4], "rank")),
                   items.index(to_int(f[5], "item id")), to_double(f[6], "score")});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& dataset) {
  validate(cfg);
  const Dataset filtered = filter_dataset(dataset, static_cast<std::size_t>(cfg.min_ratings));
  log(cfg, std::to_string(filtered.ratings.n_users()) + " users, " +
               std::to_string(filtered.ratings.n_items()) + " items, " +
               std::to_string(filtered.ratings.n_entries()) + " ratings after filtering");
  std::ostringstream groups_csv;
  std::ostringstream recs_csv;
  groups_csv << kGroupsHeader;
  recs_csv << kRecommendationsHeader;
  std::vector<MetricRow> all;
  std::vector<int> failed;
  std::size_t groups_failed = 0;
  for (int rep = 0; rep < cfg.eval.repetitions; ++rep) {
    try {
      const Repetition r = prepare_repetition(filtered.ratings, cfg, rep);
      const GroupFormation groups = form_groups(r.split, r.factors.users, cfg, rep);
      const auto recs = recommend_groups(r, groups.groups, cfg);
      const auto rows = evaluate_repetition(rep, r.split, groups.groups, recs, cfg);
      all.insert(all.end(), rows.begin(), rows.end());
      groups_failed += groups.failed;
      write_groups_csv(groups_csv, rep, groups.groups, filtered.users);
      write_recommendations_csv(recs_csv, recs, filtered.items);
    } catch (const std::exception& e) {
      std::clog << "[grouprec] repetition " << rep << " failed: " << e.what() << '\n';
      failed.push_back(rep);
    }
  }
  ExperimentResult result = finish(cfg, std::move(all), groups_failed, failed, cfg.output_dir);
  result.n_users = filtered.ratings.n_users();
  result.n_items = filtered.ratings.n_items();
  if (!cfg.output_dir.empty()) {
    const fs::path dir(cfg.output_dir);
    write_text(dir / kConfigFile, config_to_json(cfg));
    write_text(dir / kGroupsFile, groups_csv.str());
    write_text(dir / kRecommendationsFile, recs_csv.str());
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.dataset_path.empty()) throw std::invalid_argument("no dataset path given");
  return run_experiment(cfg, ingest(cfg.dataset_path, cfg.format));
}

ExperimentConfig load_workdir_config(const std::string& workdir, int* repetition) {
  require(fs::path(workdir), kConfigFile, "factorize");
  std::optional<int> rep;
  ExperimentConfig cfg = config_from_json(read_text(fs::path(workdir) / kConfigFile), &rep);
  if (repetition) *repetition = rep.value_or(0);
  return cfg;
}

void save_workdir_config(const std::string& workdir, const ExperimentConfig& cfg,
                         int repetition) {
  write_text(fs::path(workdir) / kConfigFile, config_to_json(cfg, repetition));
}

void stage_factorize(const ExperimentConfig& cfg, int rep, const std::string& workdir) {
  if (cfg.dataset_path.empty()) throw std::invalid_argument("no dataset path given");
  stage_factorize(cfg, ingest(cfg.dataset_path, cfg.format), rep, workdir);
}

void stage_factorize(const ExperimentConfig& cfg, const Dataset& dataset, int rep,
                     const std::string& workdir) {
  validate(cfg);
  if (rep < 0) throw std::invalid_argument("repetition must be >= 0");
  const Dataset filtered = filter_dataset(dataset, static_cast<std::size_t>(cfg.min_ratings));
  const Repetition r = prepare_repetition(filtered.ratings, cfg, rep);
  const fs::path dir(workdir);
  fs::create_directories(dir);
  // Later stages key off these files; drop outputs from an earlier run.
  for (const char* stale : {kGroupsFile, kGroupStatusFile, kRecommendationsFile}) {
    fs::remove(dir / stale);
  }
  save_workdir_config(workdir, cfg, rep);
  write_id_map((dir / kUsersFile).string(), filtered.users);
  write_id_map((dir / kItemsFile).string(), filtered.items);
  write_split((dir / kSplitFile).string(), r.split);
  write_features((dir / kUserFeaturesFile).string(), r.factors.users);
  write_features((dir / kItemFeaturesFile).string(), r.factors.items);
  std::ostringstream trace;
  trace << "iteration,objective\n";
  for (std::size_t t = 0; t < r.factors.objective_trace.size(); ++t) {
    trace << t << ',' << format_double(r.factors.objective_trace[t]) << '\n';
  }
  write_text(dir / kObjectiveFile, trace.str());
}

void stage_groups(const std::string& workdir) {
  const fs::path dir(workdir);
  require(dir, kUserFeaturesFile, "factorize");
  Workdir w = open_workdir(workdir);
  validate(w.cfg);
  const FeatureMatrix users = read_features((dir / kUserFeaturesFile).string());
  const GroupFormation groups = form_groups(w.split, users, w.cfg, w.repetition);
  std::ostringstream out;
  out << kGroupsHeader;
  write_groups_csv(out, w.repetition, groups.groups, w.users);
  write_text(dir / kGroupsFile, out.str());
  write_text(dir / kGroupStatusFile, json{{"failed", groups.failed}}.dump() + "\n");
  fs::remove(dir / kRecommendationsFile);
}

void stage_recommend(const std::string& workdir) {
  const fs::path dir(workdir);
  require(dir, kItemFeaturesFile, "factorize");
  require(dir, kGroupsFile, "groups");
  Workdir w = open_workdir(workdir);
  validate(w.cfg);
  Repetition r;
  r.index = w.repetition;
  r.factors.users = read_features((dir / kUserFeaturesFile).string());
  r.factors.items = read_features((dir / kItemFeaturesFile).string());
  const auto groups = read_groups_csv((dir / kGroupsFile).string(), w.split, w.users);
  const auto recs = recommend_groups(r, groups, w.cfg);
  std::ostringstream out;
  out << kRecommendationsHeader;
  write_recommendations_csv(out, recs, w.items);
  write_text(dir / kRecommendationsFile, out.str());
}

ExperimentResult stage_evaluate(const std::vector<std::string>& workdirs,
                                const std::string& output_dir) {
  if (workdirs.empty()) throw std::invalid_argument("no work directories given");
  std::vector<MetricRow> all;
  std::size_t groups_failed = 0;
  std::optional<ExperimentConfig> reference;
  std::set<int> seen;
  ExperimentResult shape;
  for (const std::string& path : workdirs) {
    const fs::path dir(path);
    require(dir, kGroupsFile, "groups");
    require(dir, kRecommendationsFile, "recommend");
    Workdir w = open_workdir(path);
    if (!seen.insert(w.repetition).second) {
      throw std::invalid_argument("repetition " + std::to_string(w.repetition) +
                                  " given twice");
    }
    if (!reference) reference = w.cfg;
    const auto groups = read_groups_csv((dir / kGroupsFile).string(), w.split, w.users);
    const auto recs = read_recommendations_csv((dir / kRecommendationsFile).string(), w.items);
    const auto rows = evaluate_repetition(w.repetition, w.split, groups, recs, w.cfg);
    all.insert(all.end(), rows.begin(), rows.end());
    if (fs::exists(dir / kGroupStatusFile)) {
      groups_failed += json::parse(read_text(dir / kGroupStatusFile)).at("failed").get<std::size_t>();
    }
    shape.n_users = w.users.size();
    shape.n_items = w.items.size();
  }
  std::stable_sort(all.begin(), all.end(), [](const MetricRow& a, const MetricRow& b) {
    return a.repetition < b.repetition;
  });
  ExperimentConfig cfg = *reference;
  cfg.eval.repetitions = static_cast<int>(workdirs.size());
  ExperimentResult result = finish(cfg, std::move(all), groups_failed, {}, output_dir);
  result.n_users = shape.n_users;
  result.n_items = shape.n_items;
  return result;
}

}  // namespace grouprec
