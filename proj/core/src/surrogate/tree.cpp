#include "acceldse/surrogate/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace acceldse {

namespace {

double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (const auto i : idx) s += y[i];
  return s / static_cast<double>(idx.size());
}

nlohmann::json tree_to_json(const RegressionTree& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : t.nodes()) {
    arr.push_back({{"f", n.feature},
                   {"t", n.threshold},
                   {"l", n.left},
                   {"r", n.right},
                   {"v", n.value}});
  }
  return arr;
}

RegressionTree tree_from_json(const nlohmann::json& arr) {
  RegressionTree t;
  for (const auto& j : arr) {
    RegressionTree::Node n;
    n.feature = j.at("f").get<int>();
    n.threshold = j.at("t").get<double>();
    n.left = j.at("l").get<int>();
    n.right = j.at("r").get<int>();
    n.value = j.at("v").get<double>();
    t.nodes().push_back(n);
  }
  return t;
}

}  // namespace

void RegressionTree::fit(const Matrix& x, const std::vector<double>& y, int max_depth,
                         int min_samples_leaf, int mtries, Rng* rng) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("tree fit: empty or mismatched data");
  nodes_.clear();
  std::vector<std::size_t> indices(x.size());
  std::iota(indices.begin(), indices.end(), 0);
  grow(x, y, indices, 0, max_depth, min_samples_leaf, mtries, rng);
}

int RegressionTree::grow(const Matrix& x, const std::vector<double>& y,
                         std::vector<std::size_t>& indices, int depth, int max_depth,
                         int min_samples_leaf, int mtries, Rng* rng) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[node_id].value = mean_of(y, indices);

  if (depth >= max_depth ||
      indices.size() < static_cast<std::size_t>(2 * min_samples_leaf))
    return node_id;

  const std::size_t n_features = x[0].size();
  std::vector<std::size_t> features(n_features);
  std::iota(features.begin(), features.end(), 0);
  if (mtries > 0 && static_cast<std::size_t>(mtries) < n_features && rng) {
    rng->shuffle(features);
    features.resize(static_cast<std::size_t>(mtries));
    std::sort(features.begin(), features.end());  // keep tie-break order stable
  }

  // Best split by total squared-error reduction; with fixed parent SSE this is
  // the minimum of left SSE + right SSE.
  double best_score = std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::pair<double, double>> vals(indices.size());
  for (const auto f : features) {
    for (std::size_t k = 0; k < indices.size(); ++k)
      vals[k] = {x[indices[k]][f], y[indices[k]]};
    std::sort(vals.begin(), vals.end());

    double left_sum = 0.0, left_sq = 0.0;
    double right_sum = 0.0, right_sq = 0.0;
    for (const auto& [xv, yv] : vals) {
      (void)xv;
      right_sum += yv;
      right_sq += yv * yv;
    }
    const auto total = static_cast<double>(vals.size());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      left_sum += vals[k].second;
      left_sq += vals[k].second * vals[k].second;
      right_sum -= vals[k].second;
      right_sq -= vals[k].second * vals[k].second;
      if (vals[k].first == vals[k + 1].first) continue;  // not a valid cut
      const double nl = static_cast<double>(k + 1);
      const double nr = total - nl;
      if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
      const double sse = (left_sq - left_sum * left_sum / nl) +
                         (right_sq - right_sum * right_sum / nr);
      const double threshold = 0.5 * (vals[k].first + vals[k + 1].first);
      if (sse < best_score - 1e-15) {
        best_score = sse;
        best_feature = static_cast<int>(f);
        best_threshold = threshold;
      }
      // equal scores keep the earlier (lower feature, lower threshold) split
    }
  }

  if (best_feature < 0) return node_id;  // constant feature block: stay a leaf

  std::vector<std::size_t> left_idx, right_idx;
  for (const auto i : indices) {
    if (x[i][best_feature] <= best_threshold) left_idx.push_back(i);
    else right_idx.push_back(i);
  }
  if (left_idx.empty() || right_idx.empty()) return node_id;

  nodes_[node_id].feature = best_feature;
  nodes_[node_id].threshold = best_threshold;
  const int left = grow(x, y, left_idx, depth + 1, max_depth, min_samples_leaf, mtries, rng);
  nodes_[node_id].left = left;
  const int right = grow(x, y, right_idx, depth + 1, max_depth, min_samples_leaf, mtries, rng);
  nodes_[node_id].right = right;
  return node_id;
}

int RegressionTree::leaf_index(const std::vector<double>& x) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    node = (x[nodes_[node].feature] <= nodes_[node].threshold) ? nodes_[node].left
                                                               : nodes_[node].right;
  }
  return node;
}

double RegressionTree::predict(const std::vector<double>& x) const {
  return nodes_[leaf_index(x)].value;
}

void GbdtRegressor::fit(const Matrix& x, const std::vector<double>& y,
                        const TreeEnsembleHp& hp) {
  if (x.empty()) throw std::invalid_argument("gbdt fit: empty data");
  trees_.clear();
  rmse_trace_.clear();
  learning_rate_ = hp.learning_rate;
  base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> current(y.size(), base_);
  std::vector<double> residual(y.size());
  for (int round = 0; round < hp.n_estimators; ++round) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - current[i];
    RegressionTree tree;
    tree.fit(x, residual, hp.max_depth, hp.min_samples_leaf);
    for (std::size_t i = 0; i < y.size(); ++i)
      current[i] += learning_rate_ * tree.predict(x[i]);
    trees_.push_back(std::move(tree));
    double sq = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      sq += (y[i] - current[i]) * (y[i] - current[i]);
    rmse_trace_.push_back(std::sqrt(sq / static_cast<double>(y.size())));
  }
}

double GbdtRegressor::predict(const std::vector<double>& x) const {
  double v = base_;
  for (const auto& t : trees_) v += learning_rate_ * t.predict(x);
  return v;
}

void GbdtClassifier::fit(const Matrix& x, const std::vector<bool>& y,
                         const TreeEnsembleHp& hp) {
  if (x.empty()) throw std::invalid_argument("gbdt classifier fit: empty data");
  trees_.clear();
  learning_rate_ = hp.learning_rate;
  double positives = 0.0;
  for (const bool b : y) positives += b ? 1.0 : 0.0;
  double p = positives / static_cast<double>(y.size());
  p = std::clamp(p, 1e-6, 1.0 - 1e-6);
  base_logit_ = std::log(p / (1.0 - p));

  std::vector<double> logit(y.size(), base_logit_);
  std::vector<double> gradient(y.size());
  for (int round = 0; round < hp.n_estimators; ++round) {
    std::vector<double> prob(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      prob[i] = 1.0 / (1.0 + std::exp(-logit[i]));
      gradient[i] = (y[i] ? 1.0 : 0.0) - prob[i];
    }
    RegressionTree tree;
    tree.fit(x, gradient, hp.max_depth, hp.min_samples_leaf);
    // Newton leaf values: sum(residual) / sum(p(1-p)) over the leaf samples.
    std::map<int, std::pair<double, double>> leaf_stats;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const int leaf = tree.leaf_index(x[i]);
      leaf_stats[leaf].first += gradient[i];
      leaf_stats[leaf].second += prob[i] * (1.0 - prob[i]);
    }
    for (const auto& [leaf, stats] : leaf_stats) {
      const double denom = std::max(stats.second, 1e-12);
      tree.nodes()[static_cast<std::size_t>(leaf)].value = stats.first / denom;
    }
    for (std::size_t i = 0; i < y.size(); ++i)
      logit[i] += learning_rate_ * tree.predict(x[i]);
    trees_.push_back(std::move(tree));
  }
}

double GbdtClassifier::predict_proba(const std::vector<double>& x) const {
  double logit = base_logit_;
  for (const auto& t : trees_) logit += learning_rate_ * t.predict(x);
  return 1.0 / (1.0 + std::exp(-logit));
}

void RandomForestRegressor::fit(const Matrix& x, const std::vector<double>& y,
                                const TreeEnsembleHp& hp) {
  if (x.empty()) throw std::invalid_argument("rf fit: empty data");
  trees_.clear();
  for (int t = 0; t < hp.n_estimators; ++t) {
    Rng rng(hp.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(t + 1)));
    Matrix bx;
    std::vector<double> by;
    if (hp.bootstrap) {
      bx.reserve(x.size());
      by.reserve(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(x.size()) - 1));
        bx.push_back(x[j]);
        by.push_back(y[j]);
      }
    } else {
      bx = x;
      by = y;
    }
    RegressionTree tree;
    tree.fit(bx, by, hp.max_depth, hp.min_samples_leaf, hp.mtries, &rng);
    trees_.push_back(std::move(tree));
  }
}

double RandomForestRegressor::predict(const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

std::string GbdtRegressor::to_json() const {
  nlohmann::json j;
  j["base"] = base_;
  j["learning_rate"] = learning_rate_;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) j["trees"].push_back(tree_to_json(t));
  return j.dump();
}

GbdtRegressor GbdtRegressor::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GbdtRegressor m;
  m.base_ = j.at("base").get<double>();
  m.learning_rate_ = j.at("learning_rate").get<double>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t));
  return m;
}

std::string GbdtClassifier::to_json() const {
  nlohmann::json j;
  j["base_logit"] = base_logit_;
  j["learning_rate"] = learning_rate_;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) j["trees"].push_back(tree_to_json(t));
  return j.dump();
}

GbdtClassifier GbdtClassifier::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GbdtClassifier m;
  m.base_logit_ = j.at("base_logit").get<double>();
  m.learning_rate_ = j.at("learning_rate").get<double>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t));
  return m;
}

std::string RandomForestRegressor::to_json() const {
  nlohmann::json j;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) j["trees"].push_back(tree_to_json(t));
  return j.dump();
}

RandomForestRegressor RandomForestRegressor::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RandomForestRegressor m;
  for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t));
  return m;
}

}  // namespace acceldse
