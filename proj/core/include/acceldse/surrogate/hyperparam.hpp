#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acceldse/surrogate/gcn.hpp"
#include "acceldse/surrogate/regressor.hpp"

namespace acceldse {

struct HyperparamSearchSpec {
  std::string model_kind = "gbdt";  // gbdt | rf | mlp | stacked
  int budget = 16;                  // candidate count
  std::uint64_t seed = 0;
  int mlp_epochs = 400;
  double mlp_learning_rate = 0.01;
  double gbdt_learning_rate = 0.1;
  int stacked_top_k = 7;  // base learners fed to the meta-learner
};

struct SearchTrial {
  std::string params_json;
  double selection_loss = 0.0;  // validation rmse (trees/mlp) or mu+0.3*max (gcn)
};

struct SearchResult {
  std::unique_ptr<Regressor> best;
  std::string best_params_json;
  double best_loss = 0.0;
  std::vector<SearchTrial> trials;
  // Trained candidates aligned with trials (kept for ensemble stacking).
  std::vector<std::unique_ptr<Regressor>> candidates;
};

// Random discrete search over the per-family hyperparameter ranges. Tree
// families run in two stages: stage 1 fixes the tree count high (500 rf / 300
// gbdt) and samples the rest; stage 2 re-searches with max_depth narrowed to
// the stage-1 best +-3 (rf additionally freezes mtries). MLP is single-stage.
// "stacked" searches gbdt+rf+mlp and stacks the top-k candidates by
// validation rmse with a least-squares meta-learner.
SearchResult hyperparam_search(const HyperparamSearchSpec& spec, const Matrix& x_train,
                               const std::vector<double>& y_train, const Matrix& x_val,
                               const std::vector<double>& y_val);

struct GcnSearchResult {
  GcnModel best;
  std::string best_params_json;
  double best_loss = 0.0;
  std::vector<SearchTrial> trials;
};

// Single-stage random sampling of the GCN ranges; selection by the
// mu_ape + 0.3 * mape validation loss.
GcnSearchResult gcn_hyperparam_search(int budget, std::uint64_t seed,
                                      const std::vector<GcnGraph>& train_graphs,
                                      const std::vector<std::vector<double>>& train_scalars,
                                      const std::vector<double>& train_targets,
                                      const std::vector<GcnGraph>& val_graphs,
                                      const std::vector<std::vector<double>>& val_scalars,
                                      const std::vector<double>& val_targets,
                                      int max_epochs = 150);

}  // namespace acceldse
