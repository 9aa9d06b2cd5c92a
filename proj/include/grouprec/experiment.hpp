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

#ifndef GROUPREC_EXPERIMENT_HPP_
#define GROUPREC_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/affinity.hpp"
#include "grouprec/dataset_io.hpp"
#include "grouprec/evaluation.hpp"
#include "grouprec/factorization.hpp"

namespace grouprec {

enum class Algorithm {
  kSagaLinear,   // f = log1p, g = identity
  kSagaConcave,  // f = log1p, g = sqrt
  kAverageMisery,
  kFm,
  kLeastMisery,
  kMostPleasure,
  kPlurality,
};

// "saga-linear", "saga-concave", "am", "fm", "lm", "mp", "plurality".
std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);
bool is_saga(Algorithm algorithm);

enum class HoldoutMode { kItems, kEntries };

std::string to_string(HoldoutMode mode);
HoldoutMode parse_holdout_mode(const std::string& text);

std::string to_string(UserAffinityMode mode);
UserAffinityMode parse_user_affinity_mode(const std::string& text);

struct GroupRequest {
  GroupKind kind;
  int size;
  int count;
};

// Group counts per kind and size used by default (sizes 2, 4, 6, 8; any
// other size gets 100).
int default_group_count(GroupKind kind, int size);

// Sizes 2, 4, 6, 8 of one kind, or of both kinds, with default counts.
std::vector<GroupRequest> default_group_requests(GroupKind kind);
std::vector<GroupRequest> default_group_requests();

struct ExperimentConfig {
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::kMovieLens;
  int min_ratings = 100;
  FactorizationConfig factorization;
  EvalConfig eval;
  HoldoutMode holdout_mode = HoldoutMode::kItems;
  std::vector<GroupRequest> groups = default_group_requests();
  double sim_threshold = 0.60;
  int retry_budget = 1000;
  std::vector<double> gamma_grid{kGammaGrid.begin(), kGammaGrid.end()};
  std::vector<Algorithm> algorithms = {Algorithm::kSagaLinear, Algorithm::kSagaConcave,
                                       Algorithm::kAverageMisery, Algorithm::kFm};
  std::vector<double> fm_lambdas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  UserAffinityMode user_affinity = UserAffinityMode::kCosine;
  std::string output_dir;
  std::uint64_t seed = 2017;
  bool verbose = false;
};

// Throws std::invalid_argument on inconsistent settings.
void validate(const ExperimentConfig& cfg);

// Fully resolved config as JSON (every default materialized) and back.
std::string config_to_json(const ExperimentConfig& cfg, std::optional<int> repetition = {});
ExperimentConfig config_from_json(const std::string& text, std::optional<int>* repetition = nullptr);

enum class Stage : std::uint64_t { kHoldout = 1, kFactorize = 2, kGroups = 3 };

// Sub-seed for (repetition, stage, index):
//   mix(mix(mix(master) + repetition) + (stage << 32) + index)
// with mix = splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, int repetition, Stage stage,
                          std::uint64_t index = 0);

struct Repetition {
  int index = 0;
  RatingsMatrix split;
  Factorization factors;
};

// Holdout split and factorization of one repetition.
Repetition prepare_repetition(const RatingsMatrix& filtered, const ExperimentConfig& cfg, int rep);

struct GroupRecord {
  std::size_t id;
  GroupKind kind;
  int size;
  Group group;
};

struct GroupFormation {
  std::vector<GroupRecord> groups;
  std::size_t failed = 0;
};

GroupFormation form_groups(const RatingsMatrix& split, const FeatureMatrix& user_features,
                           const ExperimentConfig& cfg, int rep);

// One algorithm's ranked list for a group. `param` is gamma for SAGA and
// lambda for FM.
struct RankedList {
  Algorithm algorithm;
  std::optional<double> param;
  std::vector<ItemId> items;
  std::vector<double> scores;  // marginal gains (SAGA) or aggregate scores
};

// Runs every configured algorithm (and parameter) on one group, producing
// lists of length max(k_list) over the candidates (all items the group has
// not rated in train).
// (algorithm, parameter) pairs in the order every list and metric uses.
std::vector<std::pair<Algorithm, std::optional<double>>> parameter_grid(
    const ExperimentConfig& cfg);

std::vector<RankedList> recommend_group(const Group& group, const Factorization& factors,
                                        const ExperimentConfig& cfg);

struct RecommendationRow {
  int repetition;
  std::size_t group_id;
  Algorithm algorithm;
  std::optional<double> param;
  std::size_t rank;  // 1-based
  ItemId item;
  double score;
};

std::vector<RecommendationRow> recommend_groups(const Repetition& rep,
                                                const std::vector<GroupRecord>& groups,
                                                const ExperimentConfig& cfg);

struct MetricRow {
  int repetition;
  GroupKind kind;
  int size;
  int k;
  Algorithm algorithm;
  std::optional<double> param;
  double dcg;                 // member mean, then group mean
  std::optional<double> psr;  // group mean over groups where it is defined
};

std::vector<MetricRow> evaluate_repetition(int rep, const RatingsMatrix& split,
                                           const std::vector<GroupRecord>& groups,
                                           const std::vector<RecommendationRow>& recommendations,
                                           const ExperimentConfig& cfg);

struct ParamSelection {
  GroupKind kind;
  int size;
  int k;
  Algorithm algorithm;
  std::optional<double> param;
  double mean_dcg;
};

// For each (kind, size, k, algorithm) keeps the parameter with the highest
// DCG averaged over repetitions (first in grid order on ties) and returns
// the rows of that parameter.
std::vector<MetricRow> select_best_params(const std::vector<MetricRow>& rows,
                                          std::vector<ParamSelection>* selection = nullptr);

// metrics.csv: repetition,group_kind,group_size,k,algorithm,gamma,dcg,psr
// (gamma empty for baselines, psr empty when undefined).
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
// metrics_all.csv: same, with a `param` column in place of gamma.
void write_all_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
void write_selection_csv(std::ostream& out, const std::vector<ParamSelection>& selection);
// repetition,group_id,group_kind,group_size,user_id
void write_groups_csv(std::ostream& out, int rep, const std::vector<GroupRecord>& groups,
                      const IdMap& users);
// repetition,group_id,algorithm,param,rank,item_id,marginal_gain
void write_recommendations_csv(std::ostream& out, const std::vector<RecommendationRow>& rows,
                               const IdMap& items);

std::vector<GroupRecord> read_groups_csv(const std::string& path, const RatingsMatrix& split,
                                         const IdMap& users);
std::vector<RecommendationRow> read_recommendations_csv(const std::string& path,
                                                        const IdMap& items);

struct ExperimentResult {
  std::vector<MetricRow> metrics;      // best parameter only
  std::vector<MetricRow> all_metrics;  // every parameter
  std::vector<ParamSelection> selection;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t groups_failed = 0;
  std::vector<int> failed_repetitions;
  bool complete() const { return failed_repetitions.empty(); }
};

// filter -> repetitions of (holdout -> factorize -> groups -> recommend ->
// metrics) -> best parameter per algorithm. A failing repetition is logged
// and skipped; the result is then flagged incomplete. When
// cfg.output_dir is set, writes config.json, metrics.csv, metrics_all.csv,
// selection.csv, groups.csv, recommendations.csv and status.json there.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& dataset);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Stage-wise entry points sharing the files of a per-repetition work
// directory. Each later stage throws std::runtime_error naming the stage to
// run first when its inputs are missing.
void stage_factorize(const ExperimentConfig& cfg, int rep, const std::string& workdir);
void stage_factorize(const ExperimentConfig& cfg, const Dataset& dataset, int rep,
                     const std::string& workdir);
void stage_groups(const std::string& workdir);
void stage_recommend(const std::string& workdir);
ExperimentResult stage_evaluate(const std::vector<std::string>& workdirs,
                                const std::string& output_dir);

ExperimentConfig load_workdir_config(const std::string& workdir, int* repetition = nullptr);
void save_workdir_config(const std::string& workdir, const ExperimentConfig& cfg, int repetition);

}  // namespace grouprec

#endif  // GROUPREC_EXPERIMENT_HPP_
