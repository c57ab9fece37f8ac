#include "acceldse/surrogate/gcn.hpp"

#include <cmath>
#include <stdexcept>

#include "acceldse/rng.hpp"
#include "acceldse/surrogate/layer_config.hpp"
#include "json.hpp"

namespace acceldse {

namespace {

using Rows = std::vector<std::vector<double>>;

// Neighbor aggregation: out_i = sum of in_j over neighbors j of i.
Rows aggregate_neighbors(const GcnGraph& g, const Rows& in) {
  Rows out(in.size(), std::vector<double>(in[0].size(), 0.0));
  for (const auto& [a, b] : g.edges) {
    for (std::size_t c = 0; c < in[0].size(); ++c) {
      out[static_cast<std::size_t>(a)][c] += in[static_cast<std::size_t>(b)][c];
      out[static_cast<std::size_t>(b)][c] += in[static_cast<std::size_t>(a)][c];
    }
  }
  return out;
}

// Symmetric-normalized aggregation with self loops:
// out_i = sum_j over N(i) u {i} of in_j / sqrt((1+deg_i)(1+deg_j)).
Rows aggregate_normalized(const GcnGraph& g, const Rows& in) {
  const std::size_t n = in.size();
  std::vector<double> deg(n, 1.0);  // self loop
  for (const auto& [a, b] : g.edges) {
    deg[static_cast<std::size_t>(a)] += 1.0;
    deg[static_cast<std::size_t>(b)] += 1.0;
  }
  Rows out(n, std::vector<double>(in[0].size(), 0.0));
  auto add = [&](std::size_t i, std::size_t j) {
    const double w = 1.0 / std::sqrt(deg[i] * deg[j]);
    for (std::size_t c = 0; c < in[0].size(); ++c) out[i][c] += w * in[j][c];
  };
  for (std::size_t i = 0; i < n; ++i) add(i, i);
  for (const auto& [a, b] : g.edges) {
    add(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    add(static_cast<std::size_t>(b), static_cast<std::size_t>(a));
  }
  return out;
}

std::size_t conv_param_count(ConvKind kind, std::size_t in, std::size_t out) {
  const std::size_t mats = kind == ConvKind::GraphConv ? 2 : 1;
  return mats * out * in + out;
}

}  // namespace

std::string conv_kind_name(ConvKind k) {
  return k == ConvKind::GraphConv ? "graphconv" : "gcnconv";
}

ConvKind conv_kind_from_name(const std::string& s) {
  if (s == "graphconv") return ConvKind::GraphConv;
  if (s == "gcnconv") return ConvKind::GcnConv;
  throw std::invalid_argument("unknown conv kind '" + s + "'");
}

void GcnModel::init(std::size_t scalar_dim, const GcnHp& hp) {
  scalar_dim_ = scalar_dim;
  hp_ = hp;
  fc_widths_ = hidden_layer_config(hp.embedding_width, hp.num_fc_layers);

  conv_offsets_.clear();
  fc_offsets_.clear();
  std::size_t total = 0;
  std::size_t in = 8;
  const auto e = static_cast<std::size_t>(hp.embedding_width);
  for (int l = 0; l < hp.num_conv_layers; ++l) {
    conv_offsets_.push_back(total);
    total += conv_param_count(hp.conv, in, e);
    in = e;
  }
  std::size_t fc_in = e + scalar_dim;
  for (const int w : fc_widths_) {
    fc_offsets_.push_back(total);
    total += static_cast<std::size_t>(w) * fc_in + static_cast<std::size_t>(w);
    fc_in = static_cast<std::size_t>(w);
  }
  fc_offsets_.push_back(total);
  total += fc_in + 1;  // linear output

  theta_.assign(total, 0.0);
  Rng rng(hp.seed);
  in = 8;
  for (int l = 0; l < hp.num_conv_layers; ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in + e));
    const std::size_t mats = hp.conv == ConvKind::GraphConv ? 2 : 1;
    std::size_t off = conv_offsets_[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < mats * e * in; ++i) theta_[off + i] = rng.uniform(-bound, bound);
    in = e;
  }
  fc_in = e + scalar_dim;
  for (std::size_t l = 0; l < fc_widths_.size(); ++l) {
    const auto w = static_cast<std::size_t>(fc_widths_[l]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fc_in + w));
    for (std::size_t i = 0; i < w * fc_in; ++i)
      theta_[fc_offsets_[l] + i] = rng.uniform(-bound, bound);
    fc_in = w;
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(fc_in + 1));
  for (std::size_t i = 0; i < fc_in; ++i)
    theta_[fc_offsets_.back() + i] = rng.uniform(-bound, bound);
}

double GcnModel::forward(const GcnGraph& graph, const std::vector<double>& scalars,
                         std::vector<std::vector<std::vector<double>>>* conv_acts,
                         std::vector<std::vector<double>>* fc_acts) const {
  const std::size_t n = graph.node_features.size();
  const auto e = static_cast<std::size_t>(hp_.embedding_width);

  Rows h(n, std::vector<double>(8));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 8; ++c) h[i][c] = graph.node_features[i][c];
  if (conv_acts) conv_acts->push_back(h);

  std::size_t in = 8;
  for (int l = 0; l < hp_.num_conv_layers; ++l) {
    const std::size_t off = conv_offsets_[static_cast<std::size_t>(l)];
    const Rows agg = hp_.conv == ConvKind::GraphConv ? aggregate_neighbors(graph, h)
                                                     : aggregate_normalized(graph, h);
    Rows next(n, std::vector<double>(e));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t o = 0; o < e; ++o) {
        double a;
        if (hp_.conv == ConvKind::GraphConv) {
          a = theta_[off + 2 * e * in + o];  // bias
          const std::size_t w1 = off + o * in;
          const std::size_t w2 = off + e * in + o * in;
          for (std::size_t c = 0; c < in; ++c)
            a += theta_[w1 + c] * h[i][c] + theta_[w2 + c] * agg[i][c];
        } else {
          a = theta_[off + e * in + o];
          const std::size_t w = off + o * in;
          for (std::size_t c = 0; c < in; ++c) a += theta_[w + c] * agg[i][c];
        }
        next[i][o] = a > 0.0 ? a : 0.0;  // rectifier
      }
    }
    h = std::move(next);
    if (conv_acts) conv_acts->push_back(h);
    in = e;
  }

  // global mean pool + scalar concatenation
  std::vector<double> z(e + scalar_dim_, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < e; ++o) z[o] += h[i][o] / static_cast<double>(n);
  for (std::size_t s = 0; s < scalar_dim_; ++s) z[e + s] = scalars[s];
  if (fc_acts) fc_acts->push_back(z);

  std::size_t fc_in = e + scalar_dim_;
  for (std::size_t l = 0; l < fc_widths_.size(); ++l) {
    const auto w = static_cast<std::size_t>(fc_widths_[l]);
    std::vector<double> next(w);
    for (std::size_t o = 0; o < w; ++o) {
      double a = theta_[fc_offsets_[l] + w * fc_in + o];
      const std::size_t row = fc_offsets_[l] + o * fc_in;
      for (std::size_t c = 0; c < fc_in; ++c) a += theta_[row + c] * z[c];
      next[o] = a > 0.0 ? a : 0.0;
    }
    z = std::move(next);
    if (fc_acts) fc_acts->push_back(z);
    fc_in = w;
  }
  double out = theta_[fc_offsets_.back() + fc_in];
  for (std::size_t c = 0; c < fc_in; ++c)
    out += theta_[fc_offsets_.back() + c] * z[c];
  if (fc_acts) fc_acts->push_back({out});
  return out;
}

double GcnModel::predict(const GcnGraph& graph, const std::vector<double>& scalars) const {
  return forward(graph, scalars, nullptr, nullptr);
}

double GcnModel::loss_and_gradient(const std::vector<const GcnGraph*>& graphs,
                                   const std::vector<std::vector<double>>& scalars,
                                   const std::vector<double>& targets,
                                   std::vector<double>* grad) const {
  if (grad) grad->assign(theta_.size(), 0.0);
  const double n_samples = static_cast<double>(graphs.size());
  const auto e = static_cast<std::size_t>(hp_.embedding_width);
  double loss = 0.0;

  for (std::size_t sample = 0; sample < graphs.size(); ++sample) {
    const GcnGraph& g = *graphs[sample];
    std::vector<std::vector<std::vector<double>>> conv_acts;
    std::vector<std::vector<double>> fc_acts;
    const double pred = forward(g, scalars[sample], &conv_acts, &fc_acts);
    const double y = targets[sample];
    if (y == 0.0) throw std::invalid_argument("gcn loss: zero target, APE undefined");
    loss += std::abs(y - pred) / std::abs(y) * 100.0 / n_samples;
    if (!grad) continue;

    double dout = (pred >= y ? 1.0 : -1.0) / std::abs(y) * 100.0 / n_samples;

    // output layer
    const std::size_t n_fc = fc_widths_.size();
    std::size_t fc_in = n_fc > 0 ? static_cast<std::size_t>(fc_widths_.back())
                                 : e + scalar_dim_;
    std::vector<double> delta(fc_in, 0.0);
    {
      const auto& z = fc_acts[n_fc];  // input of the output layer
      for (std::size_t c = 0; c < fc_in; ++c) {
        (*grad)[fc_offsets_.back() + c] += dout * z[c];
        delta[c] = dout * theta_[fc_offsets_.back() + c];
      }
      (*grad)[fc_offsets_.back() + fc_in] += dout;
    }

    // fc stack (reverse)
    for (std::size_t l = n_fc; l-- > 0;) {
      const auto w = static_cast<std::size_t>(fc_widths_[l]);
      const std::size_t in =
          l == 0 ? e + scalar_dim_ : static_cast<std::size_t>(fc_widths_[l - 1]);
      const auto& z_in = fc_acts[l];
      const auto& z_out = fc_acts[l + 1];
      std::vector<double> delta_prev(in, 0.0);
      for (std::size_t o = 0; o < w; ++o) {
        const double d = z_out[o] > 0.0 ? delta[o] : 0.0;  // rectifier gate
        if (d == 0.0) continue;
        const std::size_t row = fc_offsets_[l] + o * in;
        for (std::size_t c = 0; c < in; ++c) {
          (*grad)[row + c] += d * z_in[c];
          delta_prev[c] += d * theta_[row + c];
        }
        (*grad)[fc_offsets_[l] + w * in + o] += d;
      }
      delta = std::move(delta_prev);
    }

    // mean pool: distribute the embedding part of delta across nodes
    const std::size_t n_nodes = g.node_features.size();
    Rows node_delta(n_nodes, std::vector<double>(e, 0.0));
    for (std::size_t i = 0; i < n_nodes; ++i)
      for (std::size_t o = 0; o < e; ++o)
        node_delta[i][o] = delta[o] / static_cast<double>(n_nodes);

    // conv stack (reverse)
    for (int l = hp_.num_conv_layers; l-- > 0;) {
      const std::size_t in = l == 0 ? 8 : e;
      const std::size_t off = conv_offsets_[static_cast<std::size_t>(l)];
      const auto& h_in = conv_acts[static_cast<std::size_t>(l)];
      const auto& h_out = conv_acts[static_cast<std::size_t>(l) + 1];
      // gate through the rectifier
      for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t o = 0; o < e; ++o)
          if (h_out[i][o] <= 0.0) node_delta[i][o] = 0.0;

      Rows delta_prev(n_nodes, std::vector<double>(in, 0.0));
      if (hp_.conv == ConvKind::GraphConv) {
        const Rows agg = aggregate_neighbors(g, h_in);
        const Rows agg_delta = aggregate_neighbors(g, node_delta);
        for (std::size_t i = 0; i < n_nodes; ++i) {
          for (std::size_t o = 0; o < e; ++o) {
            const double d = node_delta[i][o];
            const std::size_t w1 = off + o * in;
            const std::size_t w2 = off + e * in + o * in;
            if (d != 0.0) {
              for (std::size_t c = 0; c < in; ++c) {
                (*grad)[w1 + c] += d * h_in[i][c];
                (*grad)[w2 + c] += d * agg[i][c];
              }
              (*grad)[off + 2 * e * in + o] += d;
            }
            // delta_prev_i += d*W1_row; neighbor-aggregated delta uses W2
            const double ad = agg_delta[i][o];
            for (std::size_t c = 0; c < in; ++c)
              delta_prev[i][c] += d * theta_[w1 + c] + ad * theta_[w2 + c];
          }
        }
      } else {
        const Rows agg = aggregate_normalized(g, h_in);
        const Rows agg_delta = aggregate_normalized(g, node_delta);
        for (std::size_t i = 0; i < n_nodes; ++i) {
          for (std::size_t o = 0; o < e; ++o) {
            const double d = node_delta[i][o];
            const std::size_t w = off + o * in;
            if (d != 0.0) {
              for (std::size_t c = 0; c < in; ++c) (*grad)[w + c] += d * agg[i][c];
              (*grad)[off + e * in + o] += d;
            }
            const double ad = agg_delta[i][o];
            for (std::size_t c = 0; c < in; ++c) delta_prev[i][c] += ad * theta_[w + c];
          }
        }
      }
      node_delta = std::move(delta_prev);
    }
  }
  return loss;
}

GcnModel train_gcn(const std::vector<GcnGraph>& train_graphs,
                   const std::vector<std::vector<double>>& train_scalars,
                   const std::vector<double>& train_targets,
                   const std::vector<GcnGraph>& val_graphs,
                   const std::vector<std::vector<double>>& val_scalars,
                   const std::vector<double>& val_targets, const GcnHp& hp) {
  if (train_graphs.empty() || train_graphs.size() != train_scalars.size() ||
      train_graphs.size() != train_targets.size())
    throw std::invalid_argument("train_gcn: graph/scalar/target record mismatch");
  if (val_graphs.size() != val_scalars.size() || val_graphs.size() != val_targets.size())
    throw std::invalid_argument("train_gcn: validation record mismatch");

  GcnModel model;
  model.init(train_scalars[0].size(), hp);

  auto val_mu_ape = [&](const GcnModel& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < val_graphs.size(); ++i)
      s += std::abs(val_targets[i] - m.predict(val_graphs[i], val_scalars[i])) /
           std::abs(val_targets[i]) * 100.0;
    return s / static_cast<double>(val_graphs.size());
  };

  std::vector<double> best_theta = model.parameters();
  double best_val = val_mu_ape(model);

  std::vector<double> m_t(model.parameters().size(), 0.0);
  std::vector<double> v_t(model.parameters().size(), 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long long step = 0;
  double lr = hp.learning_rate;
  int plateau = 0, stall = 0;
  Rng rng(hp.seed ^ 0xd1b54a32d192ed03ULL);
  std::vector<double> grad;

  for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    auto order = rng.permutation(train_graphs.size());
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
      std::vector<const GcnGraph*> batch_graphs;
      std::vector<std::vector<double>> batch_scalars;
      std::vector<double> batch_targets;
      for (std::size_t k = start; k < end; ++k) {
        batch_graphs.push_back(&train_graphs[order[k]]);
        batch_scalars.push_back(train_scalars[order[k]]);
        batch_targets.push_back(train_targets[order[k]]);
      }
      const double loss =
          model.loss_and_gradient(batch_graphs, batch_scalars, batch_targets, &grad);
      if (!std::isfinite(loss))
        throw std::runtime_error("train_gcn: non-finite loss at epoch " +
                                 std::to_string(epoch));
      ++step;
      const double b1c = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double b2c = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto& theta = model.parameters();
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m_t[i] = beta1 * m_t[i] + (1.0 - beta1) * grad[i];
        v_t[i] = beta2 * v_t[i] + (1.0 - beta2) * grad[i] * grad[i];
        theta[i] -= lr * (m_t[i] / b1c) / (std::sqrt(v_t[i] / b2c) + eps);
      }
    }
    const double val = val_mu_ape(model);
    if (val < best_val - 1e-12) {
      best_val = val;
      best_theta = model.parameters();
      plateau = 0;
      stall = 0;
    } else {
      ++plateau;
      ++stall;
      if (plateau >= hp.lr_patience) {
        lr *= hp.lr_decay;
        plateau = 0;
      }
      if (stall >= hp.early_stop_patience) break;
    }
  }
  model.parameters() = best_theta;
  return model;
}

std::string GcnModel::to_json() const {
  nlohmann::json j;
  j["scalar_dim"] = scalar_dim_;
  j["conv"] = conv_kind_name(hp_.conv);
  j["num_conv_layers"] = hp_.num_conv_layers;
  j["num_fc_layers"] = hp_.num_fc_layers;
  j["embedding_width"] = hp_.embedding_width;
  j["fc_widths"] = fc_widths_;
  j["theta"] = theta_;
  return j.dump();
}

GcnModel GcnModel::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GcnHp hp;
  hp.conv = conv_kind_from_name(j.at("conv").get<std::string>());
  hp.num_conv_layers = j.at("num_conv_layers").get<int>();
  hp.num_fc_layers = j.at("num_fc_layers").get<int>();
  hp.embedding_width = j.at("embedding_width").get<int>();
  GcnModel m;
  m.init(j.at("scalar_dim").get<std::size_t>(), hp);
  m.theta_ = j.at("theta").get<std::vector<double>>();
  return m;
}

}  // namespace acceldse
