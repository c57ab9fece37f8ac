#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acceldse/rng.hpp"

namespace acceldse {

using Matrix = std::vector<std::vector<double>>;

// Binary axis-aligned regression tree grown by exhaustive variance-reduction
// split scan. Ties break toward the lowest feature index, then the lowest
// threshold, so training is fully deterministic.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  // mtries == 0 means "consider all features"; otherwise each split samples a
  // random feature subset of that size from rng (random-forest mode).
  void fit(const Matrix& x, const std::vector<double>& y, int max_depth,
           int min_samples_leaf = 1, int mtries = 0, Rng* rng = nullptr);

  double predict(const std::vector<double>& x) const;
  int leaf_index(const std::vector<double>& x) const;
  std::vector<Node>& nodes() { return nodes_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  int grow(const Matrix& x, const std::vector<double>& y,
           std::vector<std::size_t>& indices, int depth, int max_depth,
           int min_samples_leaf, int mtries, Rng* rng);

  std::vector<Node> nodes_;
};

struct TreeEnsembleHp {
  int n_estimators = 100;
  int max_depth = 6;
  double learning_rate = 0.1;  // gbdt only
  int mtries = 0;              // rf only; 0 = all features
  int min_samples_leaf = 1;
  bool bootstrap = true;  // rf only
  std::uint64_t seed = 0;
};

// Least-squares gradient boosting with shrinkage.
class GbdtRegressor {
 public:
  void fit(const Matrix& x, const std::vector<double>& y, const TreeEnsembleHp& hp);
  double predict(const std::vector<double>& x) const;
  // RMSE on the training set after each boosting round (nonincreasing).
  const std::vector<double>& train_rmse_trace() const { return rmse_trace_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  double base_prediction() const { return base_; }
  double learning_rate() const { return learning_rate_; }

  std::string to_json() const;
  static GbdtRegressor from_json(const std::string& text);

 private:
  double base_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
  std::vector<double> rmse_trace_;

  friend class GbdtClassifier;
};

// Gradient-boosted binary classifier with logistic loss and Newton leaf
// updates. Used as the two-stage ROI gate.
class GbdtClassifier {
 public:
  void fit(const Matrix& x, const std::vector<bool>& y, const TreeEnsembleHp& hp);
  double predict_proba(const std::vector<double>& x) const;
  bool predict(const std::vector<double>& x) const { return predict_proba(x) >= 0.5; }

  std::string to_json() const;
  static GbdtClassifier from_json(const std::string& text);

 private:
  double base_logit_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
};

// Bagged forest: bootstrap resampling plus per-split random feature subsets,
// prediction by mean over trees.
class RandomForestRegressor {
 public:
  void fit(const Matrix& x, const std::vector<double>& y, const TreeEnsembleHp& hp);
  double predict(const std::vector<double>& x) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }

  std::string to_json() const;
  static RandomForestRegressor from_json(const std::string& text);

 private:
  std::vector<RegressionTree> trees_;
};

}  // namespace acceldse
