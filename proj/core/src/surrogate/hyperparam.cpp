#include "acceldse/surrogate/hyperparam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acceldse/metrics.hpp"
#include "acceldse/rng.hpp"
#include "acceldse/surrogate/ensemble.hpp"
#include "json.hpp"

namespace acceldse {

namespace {

double validation_rmse(const Regressor& model, const Matrix& x,
                       const std::vector<double>& y) {
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = model.predict(x[i]) - y[i];
    sq += e * e;
  }
  return std::sqrt(sq / static_cast<double>(x.size()));
}

std::uint64_t candidate_seed(std::uint64_t seed, int index) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1));
}

struct Candidate {
  std::unique_ptr<Regressor> model;
  nlohmann::json params;
  double loss = 0.0;
};

Candidate train_gbdt_candidate(const HyperparamSearchSpec& spec, int n_estimators,
                               int max_depth, std::uint64_t seed, const Matrix& x_train,
                               const std::vector<double>& y_train, const Matrix& x_val,
                               const std::vector<double>& y_val) {
  TreeEnsembleHp hp;
  hp.n_estimators = n_estimators;
  hp.max_depth = max_depth;
  hp.learning_rate = spec.gbdt_learning_rate;
  hp.seed = seed;
  GbdtRegressor m;
  m.fit(x_train, y_train, hp);
  Candidate c;
  c.model = make_regressor(std::move(m));
  c.params = {{"kind", "gbdt"}, {"n_estimators", n_estimators}, {"max_depth", max_depth}};
  c.loss = validation_rmse(*c.model, x_val, y_val);
  return c;
}

Candidate train_rf_candidate(int n_estimators, int max_depth, int mtries,
                             std::uint64_t seed, const Matrix& x_train,
                             const std::vector<double>& y_train, const Matrix& x_val,
                             const std::vector<double>& y_val) {
  TreeEnsembleHp hp;
  hp.n_estimators = n_estimators;
  hp.max_depth = max_depth;
  hp.mtries = mtries;
  hp.seed = seed;
  RandomForestRegressor m;
  m.fit(x_train, y_train, hp);
  Candidate c;
  c.model = make_regressor(std::move(m));
  c.params = {{"kind", "rf"},
              {"n_estimators", n_estimators},
              {"max_depth", max_depth},
              {"mtries", mtries}};
  c.loss = validation_rmse(*c.model, x_val, y_val);
  return c;
}

Candidate train_mlp_candidate(const HyperparamSearchSpec& spec, int num_layers,
                              int node_count, Activation act, std::uint64_t seed,
                              const Matrix& x_train, const std::vector<double>& y_train,
                              const Matrix& x_val, const std::vector<double>& y_val) {
  MlpHp hp;
  hp.num_layers = num_layers;
  hp.node_count = node_count;
  hp.act = act;
  hp.epochs = spec.mlp_epochs;
  hp.learning_rate = spec.mlp_learning_rate;
  hp.seed = seed;
  MlpModel m = train_mlp(x_train, y_train, x_val, y_val, hp);
  Candidate c;
  c.model = make_regressor(std::move(m));
  c.params = {{"kind", "mlp"},
              {"num_layer", num_layers},
              {"num_node", node_count},
              {"act_func", activation_name(act)}};
  c.loss = validation_rmse(*c.model, x_val, y_val);
  return c;
}

std::vector<Candidate> search_gbdt(const HyperparamSearchSpec& spec,
                                   const Matrix& x_train, const std::vector<double>& y_train,
                                   const Matrix& x_val, const std::vector<double>& y_val) {
  Rng rng(spec.seed);
  std::vector<Candidate> all;
  const int stage1 = std::max(1, spec.budget / 2);
  const int stage2 = spec.budget - stage1;
  // stage 1: tree count pinned high, scan depth
  int best_depth = 6;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int i = 0; i < stage1; ++i) {
    const int depth = static_cast<int>(rng.uniform_int(2, 20));
    auto c = train_gbdt_candidate(spec, 300, depth, candidate_seed(spec.seed, i),
                                  x_train, y_train, x_val, y_val);
    if (c.loss < best_loss) {
      best_loss = c.loss;
      best_depth = depth;
    }
    all.push_back(std::move(c));
  }
  // stage 2: narrowed depth range, free tree count
  const int lo = std::max(2, best_depth - 3);
  const int hi = std::min(20, best_depth + 3);
  for (int i = 0; i < stage2; ++i) {
    const int depth = static_cast<int>(rng.uniform_int(lo, hi));
    const int n_est = static_cast<int>(rng.uniform_int(20, 500));
    all.push_back(train_gbdt_candidate(spec, n_est, depth,
                                       candidate_seed(spec.seed, stage1 + i), x_train,
                                       y_train, x_val, y_val));
  }
  return all;
}

std::vector<Candidate> search_rf(const HyperparamSearchSpec& spec, const Matrix& x_train,
                                 const std::vector<double>& y_train, const Matrix& x_val,
                                 const std::vector<double>& y_val) {
  Rng rng(spec.seed);
  const int n_features = static_cast<int>(x_train[0].size());
  std::vector<Candidate> all;
  const int stage1 = std::max(1, spec.budget / 2);
  const int stage2 = spec.budget - stage1;
  int best_depth = 20, best_mtries = n_features;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int i = 0; i < stage1; ++i) {
    const int depth = static_cast<int>(rng.uniform_int(5, 100));
    const int mtries = static_cast<int>(rng.uniform_int(1, n_features));
    auto c = train_rf_candidate(500, depth, mtries, candidate_seed(spec.seed, i),
                                x_train, y_train, x_val, y_val);
    if (c.loss < best_loss) {
      best_loss = c.loss;
      best_depth = depth;
      best_mtries = mtries;
    }
    all.push_back(std::move(c));
  }
  const int lo = std::max(5, best_depth - 3);
  const int hi = std::min(100, best_depth + 3);
  for (int i = 0; i < stage2; ++i) {
    const int depth = static_cast<int>(rng.uniform_int(lo, hi));
    const int n_est = static_cast<int>(rng.uniform_int(50, 1000));
    all.push_back(train_rf_candidate(n_est, depth, best_mtries,
                                     candidate_seed(spec.seed, stage1 + i), x_train,
                                     y_train, x_val, y_val));
  }
  return all;
}

std::vector<Candidate> search_mlp(const HyperparamSearchSpec& spec, const Matrix& x_train,
                                  const std::vector<double>& y_train, const Matrix& x_val,
                                  const std::vector<double>& y_val) {
  Rng rng(spec.seed);
  const int nodes_options[3] = {8, 16, 32};
  const Activation acts[3] = {Activation::Tanh, Activation::Rectifier,
                              Activation::Maxout};
  std::vector<Candidate> all;
  for (int i = 0; i < spec.budget; ++i) {
    const int layers = static_cast<int>(rng.uniform_int(3, 9));
    const int nodes = nodes_options[rng.uniform_int(0, 2)];
    const Activation act = acts[rng.uniform_int(0, 2)];
    all.push_back(train_mlp_candidate(spec, layers, nodes, act,
                                      candidate_seed(spec.seed, i), x_train, y_train,
                                      x_val, y_val));
  }
  return all;
}

SearchResult pack_result(std::vector<Candidate> all) {
  SearchResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].loss < all[best].loss) best = i;
  result.best_params_json = all[best].params.dump();
  result.best_loss = all[best].loss;
  for (auto& c : all) {
    result.trials.push_back({c.params.dump(), c.loss});
    result.candidates.push_back(std::move(c.model));
  }
  // Rebuild the winner from its serialized form so `best` owns an independent
  // copy while candidates stay available for stacking.
  result.best = regressor_from_json(result.candidates[best]->to_json());
  return result;
}

}  // namespace

SearchResult hyperparam_search(const HyperparamSearchSpec& spec, const Matrix& x_train,
                               const std::vector<double>& y_train, const Matrix& x_val,
                               const std::vector<double>& y_val) {
  if (spec.budget < 1) throw std::invalid_argument("hyperparam_search: empty budget");
  if (x_train.empty() || x_val.empty())
    throw std::invalid_argument("hyperparam_search: empty data");

  if (spec.model_kind == "gbdt")
    return pack_result(search_gbdt(spec, x_train, y_train, x_val, y_val));
  if (spec.model_kind == "rf")
    return pack_result(search_rf(spec, x_train, y_train, x_val, y_val));
  if (spec.model_kind == "mlp")
    return pack_result(search_mlp(spec, x_train, y_train, x_val, y_val));
  if (spec.model_kind == "stacked") {
    // pool gbdt + rf + mlp candidates, stack the top-k by validation rmse
    HyperparamSearchSpec sub = spec;
    sub.budget = std::max(1, spec.budget / 3);
    std::vector<Candidate> all;
    sub.seed = spec.seed;
    for (auto& c : search_gbdt(sub, x_train, y_train, x_val, y_val))
      all.push_back(std::move(c));
    sub.seed = spec.seed ^ 0x5851f42d4c957f2dULL;
    for (auto& c : search_rf(sub, x_train, y_train, x_val, y_val))
      all.push_back(std::move(c));
    sub.seed = spec.seed ^ 0x2545f4914f6cdd1dULL;
    for (auto& c : search_mlp(sub, x_train, y_train, x_val, y_val))
      all.push_back(std::move(c));

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return all[a].loss < all[b].loss; });
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(spec.stacked_top_k), order.size());
    if (k < 2) throw std::invalid_argument("stacked search: need >= 2 base models");

    std::vector<StackedEnsemble::BasePredictor> bases;
    std::vector<std::unique_ptr<Regressor>> owned;
    for (std::size_t i = 0; i < k; ++i) {
      owned.push_back(regressor_from_json(all[order[i]].model->to_json()));
      const Regressor* r = owned.back().get();
      bases.emplace_back([r](const std::vector<double>& x) { return r->predict(x); });
    }
    StackedEnsemble meta;
    meta.fit(bases, x_val, y_val);
    auto stacked = make_stacked_regressor(std::move(owned), meta.weights(),
                                          meta.used_ridge_fallback());

    SearchResult result;
    result.best_loss = validation_rmse(*stacked, x_val, y_val);
    nlohmann::json params{{"kind", "stacked"}, {"top_k", k}};
    result.best_params_json = params.dump();
    for (auto& c : all) {
      result.trials.push_back({c.params.dump(), c.loss});
      result.candidates.push_back(std::move(c.model));
    }
    result.best = std::move(stacked);
    return result;
  }
  throw std::invalid_argument("unknown model kind '" + spec.model_kind + "'");
}

GcnSearchResult gcn_hyperparam_search(int budget, std::uint64_t seed,
                                      const std::vector<GcnGraph>& train_graphs,
                                      const std::vector<std::vector<double>>& train_scalars,
                                      const std::vector<double>& train_targets,
                                      const std::vector<GcnGraph>& val_graphs,
                                      const std::vector<std::vector<double>>& val_scalars,
                                      const std::vector<double>& val_targets,
                                      int max_epochs) {
  if (budget < 1) throw std::invalid_argument("gcn_hyperparam_search: empty budget");
  Rng rng(seed);
  const int batch_options[3] = {16, 32, 64};
  const int embed_options[3] = {8, 16, 32};

  GcnSearchResult result;
  bool have_best = false;
  for (int i = 0; i < budget; ++i) {
    GcnHp hp;
    hp.conv = rng.uniform_int(0, 1) == 0 ? ConvKind::GraphConv : ConvKind::GcnConv;
    hp.num_conv_layers = static_cast<int>(rng.uniform_int(2, 6));
    hp.num_fc_layers = static_cast<int>(rng.uniform_int(2, 9));
    hp.batch_size = batch_options[rng.uniform_int(0, 2)];
    hp.embedding_width = embed_options[rng.uniform_int(0, 2)];
    // log-uniform in [1e-5, 1e-2]
    hp.learning_rate = std::pow(10.0, rng.uniform(-5.0, -2.0));
    hp.max_epochs = max_epochs;
    hp.seed = candidate_seed(seed, i);

    GcnModel model = train_gcn(train_graphs, train_scalars, train_targets, val_graphs,
                               val_scalars, val_targets, hp);
    std::vector<double> pred, actual;
    for (std::size_t r = 0; r < val_graphs.size(); ++r) {
      pred.push_back(model.predict(val_graphs[r], val_scalars[r]));
      actual.push_back(val_targets[r]);
    }
    const double loss = tune_loss(error_report(actual, pred));
    nlohmann::json params{{"kind", "gcn"},
                          {"conv_layer", conv_kind_name(hp.conv)},
                          {"num_conv_layer", hp.num_conv_layers},
                          {"num_fc_layer", hp.num_fc_layers},
                          {"batch_size", hp.batch_size},
                          {"embedding_width", hp.embedding_width},
                          {"lr", hp.learning_rate}};
    result.trials.push_back({params.dump(), loss});
    if (!have_best || loss < result.best_loss) {
      have_best = true;
      result.best_loss = loss;
      result.best = std::move(model);
      result.best_params_json = params.dump();
    }
  }
  return result;
}

}  // namespace acceldse
