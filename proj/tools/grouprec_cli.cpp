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

// grouprec: group recommendation experiments from the command line.
//
//   grouprec run --ratings ratings.dat --out results/
//   grouprec factorize --ratings ratings.dat --workdir w0 --rep 0
//   grouprec groups --workdir w0
//   grouprec recommend --workdir w0
//   grouprec evaluate --workdir w0 --workdir w1 --out results/
//   grouprec synth --out synthetic.dat

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grouprec/experiment.hpp"
#include "grouprec/synthetic.hpp"

namespace {

using grouprec::ExperimentConfig;

// Values of every experiment flag; only flags given on the command line are
// applied on top of the loaded or default config.
struct Flags {
  std::string config;
  std::string ratings;
  std::string format;
  int min_ratings = 0;
  double holdout_frac = 0.0;
  std::string holdout_mode;
  int dim = 0;
  double reg = 0.0;
  int max_iters = 0;
  double tol = 0.0;
  int repetitions = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> group_kinds;
  std::vector<int> group_sizes;
  int group_count = 0;
  double sim_threshold = 0.0;
  std::vector<double> gamma_grid;
  std::vector<std::string> algorithms;
  std::vector<double> fm_lambdas;
  std::string user_affinity;
  std::vector<int> k_list;
  int relevance_threshold = 0;
  double beta = 0.0;
  bool verbose = false;

  std::vector<std::pair<std::string, CLI::Option*>> given;

  bool has(const std::string& name) const {
    for (const auto& [n, opt] : given) {
      if (n == name && opt->count() > 0) return true;
    }
    return false;
  }
};

void add(Flags& f, const std::string& name, CLI::Option* opt) { f.given.emplace_back(name, opt); }

void add_data_flags(CLI::App* app, Flags& f) {
  add(f, "ratings", app->add_option("--ratings", f.ratings, "Ratings file")
                             ->check(CLI::ExistingFile));
  add(f, "format",
      app->add_option("--format", f.format, "movielens-dat | csv (default movielens-dat)"));
  add(f, "min-ratings",
      app->add_option("--min-ratings", f.min_ratings, "Drop users with fewer ratings (100)"));
  add(f, "holdout-frac",
      app->add_option("--holdout-frac", f.holdout_frac, "Fraction of items held out (0.3)"));
  add(f, "holdout-mode",
      app->add_option("--holdout-mode", f.holdout_mode, "items | entries (items)"));
  add(f, "dim", app->add_option("--dim", f.dim, "Latent dimension (150)"));
  add(f, "reg", app->add_option("--reg", f.reg, "Ridge penalty (0.1)"));
  add(f, "max-iters",
      app->add_option("--max-iters", f.max_iters, "Maximum alternations (50)"));
  add(f, "tol", app->add_option("--tol", f.tol, "Relative objective tolerance (1e-6)"));
  add(f, "seed", app->add_option("--seed", f.seed, "Master seed"));
}

void add_group_flags(CLI::App* app, Flags& f) {
  add(f, "group-kind",
      app->add_option("--group-kind,--kind", f.group_kinds, "random and/or similar")->delimiter(','));
  add(f, "group-size",
      app->add_option("--group-size,--size", f.group_sizes, "Group sizes, e.g. 2,4,6,8")
          ->delimiter(','));
  add(f, "group-count",
      app->add_option("--group-count", f.group_count,
                      "Groups per kind and size (default per-size table)"));
  add(f, "sim-threshold",
      app->add_option("--sim-threshold", f.sim_threshold, "Cosine cut for similar groups (0.6)"));
}

void add_recommend_flags(CLI::App* app, Flags& f) {
  add(f, "algo",
      app->add_option("--algo", f.algorithms,
                      "saga-linear,saga-concave,am,fm,lm,mp,plurality")
          ->delimiter(','));
  add(f, "gamma-grid",
      app->add_option("--gamma-grid", f.gamma_grid, "RBF bandwidths")->delimiter(','));
  add(f, "fm-lambda",
      app->add_option("--fm-lambda", f.fm_lambdas, "FM trade-off(s) in [0, 1]")->delimiter(','));
  add(f, "user-affinity",
      app->add_option("--user-affinity", f.user_affinity, "cosine | indicator | identity"));
  add(f, "k", app->add_option("--k", f.k_list, "List lengths, e.g. 1,5,10")->delimiter(','));
}

void add_metric_flags(CLI::App* app, Flags& f) {
  add(f, "relevance-threshold",
      app->add_option("--relevance-threshold", f.relevance_threshold,
                      "Test rating counted as relevant (4)"));
  add(f, "beta", app->add_option("--beta", f.beta, "PSR popularity exponent (0.5)"));
  add(f, "repetitions",
      app->add_option("--repetitions", f.repetitions, "Independent repetitions (5)"));
}

void apply(const Flags& f, ExperimentConfig& cfg) {
  if (f.has("ratings")) cfg.dataset_path = f.ratings;
  if (f.has("format")) cfg.format = grouprec::parse_dataset_format(f.format);
  if (f.has("min-ratings")) cfg.min_ratings = f.min_ratings;
  if (f.has("holdout-frac")) cfg.eval.holdout_frac = f.holdout_frac;
  if (f.has("holdout-mode")) cfg.holdout_mode = grouprec::parse_holdout_mode(f.holdout_mode);
  if (f.has("dim")) cfg.factorization.dim = f.dim;
  if (f.has("reg")) cfg.factorization.reg = f.reg;
  if (f.has("max-iters")) cfg.factorization.max_iters = f.max_iters;
  if (f.has("tol")) cfg.factorization.tol = f.tol;
  if (f.has("seed")) cfg.seed = f.seed;
  if (f.has("repetitions")) cfg.eval.repetitions = f.repetitions;
  if (f.has("group-kind") || f.has("group-size") || f.has("group-count")) {
    std::vector<grouprec::GroupKind> kinds;
    if (f.has("group-kind")) {
      for (const std::string& k : f.group_kinds) kinds.push_back(grouprec::parse_group_kind(k));
    } else {
      for (const auto& g : cfg.groups) {
        if (std::find(kinds.begin(), kinds.end(), g.kind) == kinds.end()) kinds.push_back(g.kind);
      }
    }
    std::vector<int> sizes = f.group_sizes;
    if (!f.has("group-size")) {
      for (const auto& g : cfg.groups) {
        if (std::find(sizes.begin(), sizes.end(), g.size) == sizes.end()) sizes.push_back(g.size);
      }
    }
    cfg.groups.clear();
    for (auto kind : kinds) {
      for (int size : sizes) {
        const int count =
            f.has("group-count") ? f.group_count : grouprec::default_group_count(kind, size);
        cfg.groups.push_back({kind, size, count});
      }
    }
  }
  if (f.has("sim-threshold")) cfg.sim_threshold = f.sim_threshold;
  if (f.has("algo")) {
    cfg.algorithms.clear();
    for (const std::string& a : f.algorithms) cfg.algorithms.push_back(grouprec::parse_algorithm(a));
  }
  if (f.has("gamma-grid")) cfg.gamma_grid = f.gamma_grid;
  if (f.has("fm-lambda")) cfg.fm_lambdas = f.fm_lambdas;
  if (f.has("user-affinity")) {
    cfg.user_affinity = grouprec::parse_user_affinity_mode(f.user_affinity);
  }
  if (f.has("k")) cfg.eval.k_list = f.k_list;
  if (f.has("relevance-threshold")) cfg.eval.relevance_threshold = f.relevance_threshold;
  if (f.has("beta")) cfg.eval.beta = f.beta;
  if (f.verbose) cfg.verbose = true;
}

ExperimentConfig base_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot read " + f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = grouprec::config_from_json(ss.str());
  }
  apply(f, cfg);
  return cfg;
}

void print_summary(const grouprec::ExperimentResult& result) {
  std::cout << "users " << result.n_users << ", items " << result.n_items << ", metric rows "
            << result.metrics.size() << ", groups not formed " << result.groups_failed << '\n';
  if (!result.complete()) {
    std::cout << "incomplete: " << result.failed_repetitions.size() << " repetition(s) failed\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group recommendation experiments"};
  app.require_subcommand(1);
  Flags f;
  std::string out;
  std::string workdir;
  std::vector<std::string> workdirs;
  int rep = 0;

  auto* run = app.add_subcommand("run", "Full experiment: every repetition and stage");
  run->add_option("--config", f.config, "JSON config; flags override it")
      ->check(CLI::ExistingFile);
  add_data_flags(run, f);
  add_group_flags(run, f);
  add_recommend_flags(run, f);
  add_metric_flags(run, f);
  run->add_option("--out", out, "Output directory")->required();
  run->add_flag("--verbose,-v", f.verbose, "Log progress to stderr");

  auto* fact = app.add_subcommand("factorize", "Filter, hold out and factorize one repetition");
  fact->add_option("--config", f.config, "JSON config; flags override it")
      ->check(CLI::ExistingFile);
  add_data_flags(fact, f);
  add_group_flags(fact, f);
  add_recommend_flags(fact, f);
  add_metric_flags(fact, f);
  fact->add_option("--workdir", workdir, "Work directory of this repetition")->required();
  fact->add_option("--rep", rep, "Repetition index (0)");
  fact->add_flag("--verbose,-v", f.verbose, "Log progress to stderr");

  auto* groups = app.add_subcommand("groups", "Form groups in a factorized work directory");
  add_group_flags(groups, f);
  groups->add_option("--workdir", workdir, "Work directory")->required();
  groups->add_flag("--verbose,-v", f.verbose, "Log progress to stderr");

  auto* recommend = app.add_subcommand("recommend", "Recommend for the formed groups");
  add_recommend_flags(recommend, f);
  recommend->add_option("--workdir", workdir, "Work directory")->required();
  recommend->add_flag("--verbose,-v", f.verbose, "Log progress to stderr");

  auto* evaluate = app.add_subcommand("evaluate", "Metrics over one or more work directories");
  evaluate->add_option("--workdir", workdirs, "Work directories (repeatable)")->required();
  evaluate->add_option("--out", out, "Output directory")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic ratings file");
  grouprec::SyntheticSpec spec;
  synth->add_option("--out", out, "Output file (MovieLens :: format)")->required();
  synth->add_option("--users", spec.n_users, "Users (300)");
  synth->add_option("--items", spec.n_items, "Items (240)");
  synth->add_option("--clusters", spec.n_clusters, "Item clusters (6)");
  synth->add_option("--density", spec.density, "Base rating density (0.25)");
  synth->add_option("--seed", spec.seed, "Seed (7)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = base_config(f);
      cfg.output_dir = out;
      const auto result = grouprec::run_experiment(cfg);
      print_summary(result);
      return result.complete() ? 0 : 3;
    }
    if (fact->parsed()) {
      const ExperimentConfig cfg = base_config(f);
      grouprec::stage_factorize(cfg, rep, workdir);
      return 0;
    }
    if (groups->parsed() || recommend->parsed()) {
      int stored_rep = 0;
      ExperimentConfig cfg = grouprec::load_workdir_config(workdir, &stored_rep);
      apply(f, cfg);
      grouprec::validate(cfg);
      grouprec::save_workdir_config(workdir, cfg, stored_rep);
      if (groups->parsed()) {
        grouprec::stage_groups(workdir);
      } else {
        grouprec::stage_recommend(workdir);
      }
      return 0;
    }
    if (evaluate->parsed()) {
      print_summary(grouprec::stage_evaluate(workdirs, out));
      return 0;
    }
    if (synth->parsed()) {
      std::ofstream file(out, std::ios::trunc);
      if (!file) throw std::runtime_error("cannot write " + out);
      for (const auto& t : grouprec::synthetic_ratings(spec)) {
        file << t.user + 1 << "::" << t.item + 1 << "::" << t.rating << "::0\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
