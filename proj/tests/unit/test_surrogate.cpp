#include <algorithm>
#include <cmath>

#include "acceldse/metrics.hpp"
#include "acceldse/rng.hpp"
#include "acceldse/surrogate/ensemble.hpp"
#include "acceldse/surrogate/gcn.hpp"
#include "acceldse/surrogate/hyperparam.hpp"
#include "acceldse/surrogate/layer_config.hpp"
#include "acceldse/surrogate/mlp.hpp"
#include "acceldse/surrogate/tree.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace acceldse;

namespace {

// Direct transcription of the layer-schedule pseudocode, kept separate from
// the library implementation so the two can be compared.
std::vector<int> layer_schedule_reference(int node_count, int h_layers, int min_p,
                                          int max_p) {
  int p = static_cast<int>(std::ceil(std::log2(node_count)));
  int exp_max_p = std::min((h_layers + min_p + p) / 2, max_p);
  if (exp_max_p <= p) exp_max_p = p + 1;
  const int incr = exp_max_p - p;
  const int decr = std::min(exp_max_p - min_p + 1, h_layers - incr);
  const int same = h_layers - incr - decr;
  std::vector<int> widths;
  for (int i = 0; i < incr; ++i) widths.push_back(1 << (p + i));
  for (int i = 0; i < same; ++i) widths.push_back(1 << exp_max_p);
  for (int i = 0; i < decr; ++i) widths.push_back(1 << (exp_max_p - i));
  return widths;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(n, std::vector<double>(d));
  for (auto& row : x)
    for (double& v : row) v = rng.uniform();
  return x;
}

// Relative error between analytic and central finite-difference gradients.
template <typename LossFn>
double max_gradient_error(std::vector<double>& theta, const LossFn& loss_with_grad) {
  std::vector<double> grad;
  loss_with_grad(&grad);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = loss_with_grad(nullptr);
    theta[i] = saved - h;
    const double down = loss_with_grad(nullptr);
    theta[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max(1.0, std::abs(fd) + std::abs(grad[i]));
    worst = std::max(worst, std::abs(fd - grad[i]) / denom);
  }
  return worst;
}

GcnGraph toy_graph(Rng& rng, int nodes) {
  GcnGraph g;
  for (int i = 0; i < nodes; ++i) {
    std::array<double, 8> f{};
    for (double& v : f) v = rng.normal();
    g.node_features.push_back(f);
  }
  for (int i = 1; i < nodes; ++i) g.edges.emplace_back(i - 1, i);
  return g;
}

}  // namespace

TEST_CASE("layer schedule hand-traced outputs") {
  CHECK(hidden_layer_config(16, 5) == std::vector<int>{16, 32, 16, 8, 4});
  CHECK(hidden_layer_config(8, 3) == std::vector<int>{8, 16, 8});
  CHECK(hidden_layer_config(32, 9) ==
        std::vector<int>{32, 64, 128, 128, 64, 32, 16, 8, 4});
}

TEST_CASE("layer schedule exhaustive sweep against reference") {
  for (int nodes : {8, 16, 32})
    for (int layers = 1; layers <= 9; ++layers) {
      const auto got = hidden_layer_config(nodes, layers);
      CHECK(got == layer_schedule_reference(nodes, layers, 2, 7));
      CHECK(got.size() == static_cast<std::size_t>(layers));
      for (int w : got) {
        CHECK((w & (w - 1)) == 0);  // power of two
        CHECK(w >= 4);              // 2^min_p
        CHECK(w <= 128);            // 2^max_p
      }
    }
}

TEST_CASE("layer schedule rejects invalid bounds") {
  CHECK_THROWS(hidden_layer_config(16, 3, 7, 2));
  CHECK_THROWS(hidden_layer_config(1, 3));
  CHECK_THROWS(hidden_layer_config(16, 0));
}

TEST_CASE("trees predict a constant target exactly") {
  Rng rng(1);
  const Matrix x = random_matrix(rng, 40, 3);
  const std::vector<double> y(40, 3.25);
  TreeEnsembleHp hp;
  hp.n_estimators = 5;
  GbdtRegressor gbdt;
  gbdt.fit(x, y, hp);
  RandomForestRegressor rf;
  rf.fit(x, y, hp);
  for (const auto& row : x) {
    CHECK(gbdt.predict(row) == doctest::Approx(3.25));
    CHECK(rf.predict(row) == doctest::Approx(3.25));
  }
}

TEST_CASE("single shallow gbdt tree finds the step split") {
  Rng rng(5);
  Matrix x;
  std::vector<double> y;
  for (int i = 0; i < 400; ++i) {
    const double v = rng.uniform();
    x.push_back({v});
    y.push_back(v > 0.5 ? 1.0 : 0.0);
  }
  TreeEnsembleHp hp;
  hp.n_estimators = 1;
  hp.max_depth = 1;
  hp.learning_rate = 1.0;
  GbdtRegressor gbdt;
  gbdt.fit(x, y, hp);
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = gbdt.predict(x[i]) - y[i];
    sse += d * d;
  }
  CHECK(std::sqrt(sse / static_cast<double>(x.size())) < 0.1);
  const auto& root = gbdt.trees()[0].nodes()[0];
  CHECK(root.threshold == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("gbdt training rmse is nonincreasing") {
  Rng rng(9);
  const Matrix x = random_matrix(rng, 120, 4);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(std::sin(6 * row[0]) + row[1] * row[2]);
  TreeEnsembleHp hp;
  hp.n_estimators = 60;
  hp.max_depth = 3;
  GbdtRegressor gbdt;
  gbdt.fit(x, y, hp);
  const auto& trace = gbdt.train_rmse_trace();
  REQUIRE(trace.size() == 60);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("degenerate rf settings reduce to a plain decision tree") {
  Rng rng(13);
  const Matrix x = random_matrix(rng, 80, 3);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] * 2 + row[2]);
  TreeEnsembleHp hp;
  hp.n_estimators = 1;
  hp.max_depth = 6;
  hp.mtries = 3;  // all features
  hp.bootstrap = false;
  RandomForestRegressor rf;
  rf.fit(x, y, hp);
  RegressionTree tree;
  tree.fit(x, y, 6);
  for (const auto& row : x) CHECK(rf.predict(row) == doctest::Approx(tree.predict(row)));
}

TEST_CASE("rf prediction is a mean and invariant under tree order") {
  Rng rng(17);
  const Matrix x = random_matrix(rng, 60, 2);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] + 3 * row[1]);
  TreeEnsembleHp hp;
  hp.n_estimators = 7;
  hp.max_depth = 4;
  hp.mtries = 1;
  RandomForestRegressor rf;
  rf.fit(x, y, hp);
  for (const auto& row : x) {
    double sum = 0;
    for (const auto& t : rf.trees()) sum += t.predict(row);
    CHECK(rf.predict(row) == doctest::Approx(sum / 7.0));
  }
}

TEST_CASE("tree models serialize losslessly") {
  Rng rng(21);
  const Matrix x = random_matrix(rng, 50, 3);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] - row[1]);
  TreeEnsembleHp hp;
  hp.n_estimators = 10;
  hp.max_depth = 3;
  GbdtRegressor gbdt;
  gbdt.fit(x, y, hp);
  const GbdtRegressor back = GbdtRegressor::from_json(gbdt.to_json());
  RandomForestRegressor rf;
  rf.fit(x, y, hp);
  const RandomForestRegressor rf_back = RandomForestRegressor::from_json(rf.to_json());
  for (const auto& row : x) {
    CHECK(back.predict(row) == gbdt.predict(row));
    CHECK(rf_back.predict(row) == rf.predict(row));
  }
}

TEST_CASE("boosted classifier separates a linear boundary") {
  Rng rng(23);
  Matrix x;
  std::vector<bool> y;
  for (int i = 0; i < 300; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    x.push_back({a, b});
    y.push_back(a + b > 1.0);
  }
  TreeEnsembleHp hp;
  hp.n_estimators = 80;
  hp.max_depth = 3;
  GbdtClassifier cls;
  cls.fit(x, y, hp);
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += cls.predict(x[i]) == y[i];
  CHECK(correct >= 290);
  const GbdtClassifier again = GbdtClassifier::from_json(cls.to_json());
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(again.predict_proba(x[i]) == cls.predict_proba(x[i]));
}

TEST_CASE("mlp learns a linear target") {
  Rng rng(31);
  Matrix x_train, x_val;
  std::vector<double> y_train, y_val;
  for (int i = 0; i < 128; ++i) {
    const double v = rng.uniform();
    x_train.push_back({v});
    y_train.push_back(2 * v + 1);
  }
  for (int i = 0; i < 32; ++i) {
    const double v = rng.uniform();
    x_val.push_back({v});
    y_val.push_back(2 * v + 1);
  }
  MlpHp hp;
  hp.node_count = 8;
  hp.num_layers = 3;
  hp.act = Activation::Tanh;
  hp.epochs = 500;
  hp.learning_rate = 0.01;
  hp.seed = 4;
  const MlpModel model = train_mlp(x_train, y_train, x_val, y_val, hp);
  std::vector<double> pred;
  for (const auto& row : x_val) pred.push_back(model.predict(row));
  CHECK(error_report(y_val, pred).mu_ape < 2.0);
}

TEST_CASE("zero-epoch training returns a usable initialized model") {
  Matrix x{{0.1}, {0.9}};
  std::vector<double> y{1.0, 2.0};
  MlpHp hp;
  hp.epochs = 0;
  const MlpModel model = train_mlp(x, y, x, y, hp);
  std::vector<double> pred;
  for (const auto& row : x) pred.push_back(model.predict(row));
  const ErrorReport r = error_report(y, pred);
  CHECK(std::isfinite(r.rmse));
}

TEST_CASE("mlp analytic gradients match finite differences") {
  Rng rng(37);
  const Matrix x = random_matrix(rng, 6, 3);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0] - 2 * row[1]);
  for (Activation act : {Activation::Tanh, Activation::Rectifier, Activation::Maxout}) {
    MlpHp hp;
    hp.node_count = 4;
    hp.num_layers = 2;
    hp.act = act;
    hp.seed = 11;
    MlpModel model;
    model.init(3, hp);
    std::vector<double>& theta = model.parameters();
    for (double& v : theta) v = 0.4 * rng.normal();
    const double err = max_gradient_error(theta, [&](std::vector<double>* grad) {
      return model.loss_and_gradient(x, y, grad);
    });
    CAPTURE(activation_name(act));
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("mlp serializes losslessly") {
  Matrix x{{0.2, 0.4}, {0.7, 0.1}, {0.5, 0.9}, {0.1, 0.6}};
  std::vector<double> y{1, 2, 3, 4};
  MlpHp hp;
  hp.node_count = 4;
  hp.num_layers = 2;
  hp.epochs = 50;
  const MlpModel model = train_mlp(x, y, x, y, hp);
  const MlpModel back = MlpModel::from_json(model.to_json());
  for (const auto& row : x) CHECK(back.predict(row) == model.predict(row));
}

TEST_CASE("gcn single-node pooling and permutation invariance") {
  Rng rng(41);
  GcnHp hp;
  hp.num_conv_layers = 2;
  hp.num_fc_layers = 2;
  hp.embedding_width = 8;
  hp.seed = 3;
  for (ConvKind kind : {ConvKind::GraphConv, ConvKind::GcnConv}) {
    hp.conv = kind;
    GcnModel model;
    model.init(2, hp);
    for (double& v : model.parameters()) v = 0.3 * rng.normal();

    const GcnGraph single = toy_graph(rng, 1);
    CHECK(std::isfinite(model.predict(single, {0.5, 0.5})));

    // Reverse node ids of a 3-node chain; relabel edges to match.
    const GcnGraph g = toy_graph(rng, 3);
    GcnGraph perm;
    perm.node_features = {g.node_features[2], g.node_features[1], g.node_features[0]};
    for (const auto& [a, b] : g.edges) perm.edges.emplace_back(2 - a, 2 - b);
    CHECK(model.predict(perm, {0.5, 0.5}) ==
          doctest::Approx(model.predict(g, {0.5, 0.5})).epsilon(1e-12));
  }
}

TEST_CASE("gcn analytic gradients match finite differences") {
  Rng rng(43);
  for (ConvKind kind : {ConvKind::GraphConv, ConvKind::GcnConv}) {
    GcnHp hp;
    hp.conv = kind;
    hp.num_conv_layers = 2;
    hp.num_fc_layers = 2;
    hp.embedding_width = 4;
    hp.seed = 5;
    GcnModel model;
    model.init(2, hp);
    for (double& v : model.parameters()) v = 0.3 * rng.normal();

    const GcnGraph g = toy_graph(rng, 3);
    std::vector<const GcnGraph*> graphs{&g};
    const std::vector<std::vector<double>> scalars{{0.4, 0.8}};
    const std::vector<double> targets{2.5};
    const double err =
        max_gradient_error(model.parameters(), [&](std::vector<double>* grad) {
          return model.loss_and_gradient(graphs, scalars, targets, grad);
        });
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("gcn training improves validation error") {
  Rng rng(47);
  std::vector<GcnGraph> graphs;
  std::vector<std::vector<double>> scalars;
  std::vector<double> targets;
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 2));
    graphs.push_back(toy_graph(rng, n));
    const double s = rng.uniform();
    scalars.push_back({s});
    targets.push_back(5.0 + 4.0 * s + 0.5 * n);
  }
  const std::vector<GcnGraph> val_graphs(graphs.begin() + 30, graphs.end());
  const std::vector<std::vector<double>> val_scalars(scalars.begin() + 30, scalars.end());
  const std::vector<double> val_targets(targets.begin() + 30, targets.end());
  graphs.resize(30);
  scalars.resize(30);
  targets.resize(30);

  GcnHp hp;
  hp.num_conv_layers = 2;
  hp.num_fc_layers = 2;
  hp.embedding_width = 8;
  hp.batch_size = 16;
  hp.learning_rate = 5e-3;
  hp.max_epochs = 150;
  hp.seed = 8;
  const GcnModel model =
      train_gcn(graphs, scalars, targets, val_graphs, val_scalars, val_targets, hp);
  std::vector<double> pred;
  for (std::size_t i = 0; i < val_graphs.size(); ++i)
    pred.push_back(model.predict(val_graphs[i], val_scalars[i]));
  CHECK(error_report(val_targets, pred).mu_ape < 20.0);

  const GcnModel back = GcnModel::from_json(model.to_json());
  CHECK(back.predict(val_graphs[0], val_scalars[0]) ==
        model.predict(val_graphs[0], val_scalars[0]));
}

TEST_CASE("stacked ensemble of identical bases equals the base") {
  Matrix x_val{{0.1}, {0.5}, {0.9}, {0.3}};
  std::vector<double> y_val{1.2, 2.0, 2.8, 1.6};
  auto base = [](const std::vector<double>& x) { return 1.0 + 2.0 * x[0]; };
  StackedEnsemble ens;
  ens.fit(std::vector<StackedEnsemble::BasePredictor>(7, base), x_val, y_val);
  for (const auto& row : x_val) CHECK(ens.predict(row) == doctest::Approx(base(row)).epsilon(1e-6));
  CHECK(ens.used_ridge_fallback());  // collinear copies force the fallback
}

TEST_CASE("stacked ensemble favors the perfect base") {
  Rng rng(53);
  Matrix x_val;
  std::vector<double> y_val;
  for (int i = 0; i < 40; ++i) {
    const double v = rng.uniform();
    x_val.push_back({v});
    y_val.push_back(3 * v + 1);
  }
  auto perfect = [](const std::vector<double>& x) { return 3 * x[0] + 1; };
  auto noise = [](const std::vector<double>& x) { return std::sin(57 * x[0]); };
  StackedEnsemble ens;
  ens.fit({perfect, noise}, x_val, y_val);
  double sse_ens = 0, sse_perfect = 0;
  for (std::size_t i = 0; i < x_val.size(); ++i) {
    sse_ens += std::pow(ens.predict(x_val[i]) - y_val[i], 2);
    sse_perfect += std::pow(perfect(x_val[i]) - y_val[i], 2);
  }
  CHECK(sse_ens <= sse_perfect + 1e-9);
}

TEST_CASE("stacked ensemble reproduces a constant target") {
  Matrix x_val{{0.1}, {0.7}, {0.4}};
  std::vector<double> y_val(3, 5.0);
  auto b1 = [](const std::vector<double>& x) { return x[0]; };
  auto b2 = [](const std::vector<double>& x) { return 1 - x[0]; };
  StackedEnsemble ens;
  ens.fit({b1, b2}, x_val, y_val);
  for (const auto& row : x_val) CHECK(ens.predict(row) == doctest::Approx(5.0));
}

TEST_CASE("least squares solver handles singular systems") {
  std::vector<double> out;
  CHECK(solve_least_squares({{1, 1}, {2, 2}}, {1, 2}, &out, 0.0) == false);
  CHECK(solve_least_squares({{1, 1}, {2, 2}}, {1, 2}, &out, 1e-6) == true);
  CHECK(solve_least_squares({{1, 0}, {0, 1}}, {2, 3}, &out, 0.0) == true);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(3.0));
}

TEST_CASE("hyperparameter search basics") {
  Rng rng(59);
  const Matrix x_train = random_matrix(rng, 80, 3);
  std::vector<double> y_train;
  for (const auto& row : x_train) y_train.push_back(row[0] * 4 + row[1]);
  const Matrix x_val = random_matrix(rng, 30, 3);
  std::vector<double> y_val;
  for (const auto& row : x_val) y_val.push_back(row[0] * 4 + row[1]);

  HyperparamSearchSpec spec;
  spec.model_kind = "gbdt";
  spec.budget = 1;
  spec.seed = 2;
  const SearchResult single = hyperparam_search(spec, x_train, y_train, x_val, y_val);
  CHECK(single.trials.size() == 1);
  CHECK(single.best_loss == doctest::Approx(single.trials[0].selection_loss));

  spec.budget = 8;
  const SearchResult multi = hyperparam_search(spec, x_train, y_train, x_val, y_val);
  for (const auto& t : multi.trials) CHECK(multi.best_loss <= t.selection_loss + 1e-12);

  // Stage 2 narrows max_depth to best-of-stage-1 plus/minus 3.
  int stage1_best_depth = -1;
  double stage1_best = 1e300;
  const std::size_t stage1_count = multi.trials.size() / 2;
  for (std::size_t i = 0; i < stage1_count; ++i) {
    const auto j = nlohmann::json::parse(multi.trials[i].params_json);
    if (multi.trials[i].selection_loss < stage1_best) {
      stage1_best = multi.trials[i].selection_loss;
      stage1_best_depth = j.at("max_depth").get<int>();
    }
  }
  for (std::size_t i = stage1_count; i < multi.trials.size(); ++i) {
    const auto j = nlohmann::json::parse(multi.trials[i].params_json);
    CHECK(std::abs(j.at("max_depth").get<int>() - stage1_best_depth) <= 3);
  }
}

TEST_CASE("hyperparameter search is deterministic and validates budget") {
  Rng rng(61);
  const Matrix x = random_matrix(rng, 40, 2);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(row[0]);
  HyperparamSearchSpec spec;
  spec.model_kind = "rf";
  spec.budget = 4;
  spec.seed = 3;
  const SearchResult a = hyperparam_search(spec, x, y, x, y);
  const SearchResult b = hyperparam_search(spec, x, y, x, y);
  CHECK(a.best_params_json == b.best_params_json);
  CHECK(a.best_loss == b.best_loss);
  spec.budget = 0;
  CHECK_THROWS(hyperparam_search(spec, x, y, x, y));
}

TEST_CASE("stacked search beats or matches its selection pool on validation") {
  Rng rng(67);
  const Matrix x_train = random_matrix(rng, 100, 3);
  std::vector<double> y_train;
  for (const auto& row : x_train)
    y_train.push_back(2 * row[0] + std::sin(4 * row[1]) + 0.5 * row[2]);
  const Matrix x_val = random_matrix(rng, 40, 3);
  std::vector<double> y_val;
  for (const auto& row : x_val)
    y_val.push_back(2 * row[0] + std::sin(4 * row[1]) + 0.5 * row[2]);

  HyperparamSearchSpec spec;
  spec.model_kind = "stacked";
  spec.budget = 9;
  spec.seed = 5;
  spec.mlp_epochs = 150;
  const SearchResult r = hyperparam_search(spec, x_train, y_train, x_val, y_val);
  REQUIRE(r.best != nullptr);
  CHECK(r.best->kind() == "stacked");
  std::vector<double> pred;
  for (const auto& row : x_val) pred.push_back(r.best->predict(row));
  CHECK(std::isfinite(error_report(y_val, pred).rmse));
}
