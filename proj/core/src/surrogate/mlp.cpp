#include "acceldse/surrogate/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "acceldse/rng.hpp"
#include "acceldse/surrogate/layer_config.hpp"
#include "json.hpp"

namespace acceldse {

namespace {

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t pieces = 1;
  std::size_t params() const { return pieces * (out * in + out); }
};

std::vector<LayerShape> shapes_for(std::size_t input_dim, const std::vector<int>& widths,
                                   Activation act) {
  std::vector<LayerShape> shapes;
  std::size_t prev = input_dim;
  const std::size_t pieces = act == Activation::Maxout ? 2 : 1;
  for (const int w : widths) {
    shapes.push_back({prev, static_cast<std::size_t>(w), pieces});
    prev = static_cast<std::size_t>(w);
  }
  shapes.push_back({prev, 1, 1});  // linear output
  return shapes;
}

}  // namespace

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Rectifier: return "rectifier";
    case Activation::Maxout: return "maxout";
  }
  return "?";
}

Activation activation_from_name(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "rectifier") return Activation::Rectifier;
  if (s == "maxout") return Activation::Maxout;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

void MlpModel::init(std::size_t input_dim, const MlpHp& hp) {
  input_dim_ = input_dim;
  widths_ = hidden_layer_config(hp.node_count, hp.num_layers);
  act_ = hp.act;
  const auto shapes = shapes_for(input_dim, widths_, act_);
  layer_offsets_.clear();
  std::size_t total = 0;
  for (const auto& s : shapes) {
    layer_offsets_.push_back(total);
    total += s.params();
  }
  theta_.assign(total, 0.0);
  Rng rng(hp.seed);
  std::size_t off = 0;
  for (const auto& s : shapes) {
    const double bound = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (std::size_t p = 0; p < s.pieces; ++p) {
      for (std::size_t i = 0; i < s.out * s.in; ++i)
        theta_[off++] = rng.uniform(-bound, bound);
      off += s.out;  // biases start at zero
    }
  }
  in_mean_.assign(input_dim, 0.0);
  in_std_.assign(input_dim, 1.0);
}

void MlpModel::set_input_stats(std::vector<double> mean, std::vector<double> stddev) {
  in_mean_ = std::move(mean);
  in_std_ = std::move(stddev);
  for (auto& s : in_std_)
    if (s <= 0.0) s = 1.0;
}

void MlpModel::set_target_scale(double y_min, double y_max) {
  y_min_ = y_min;
  y_max_ = y_max > y_min ? y_max : y_min + 1.0;
}

double MlpModel::forward_scaled(const std::vector<double>& x_raw) const {
  const auto shapes = shapes_for(input_dim_, widths_, act_);
  std::vector<double> h(input_dim_);
  for (std::size_t i = 0; i < input_dim_; ++i)
    h[i] = (x_raw[i] - in_mean_[i]) / in_std_[i];

  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& s = shapes[l];
    std::vector<double> next(s.out);
    const bool is_output = (l + 1 == shapes.size());
    for (std::size_t o = 0; o < s.out; ++o) {
      double best = 0.0;
      for (std::size_t p = 0; p < s.pieces; ++p) {
        const std::size_t base = layer_offsets_[l] + p * (s.out * s.in + s.out);
        double a = theta_[base + s.out * s.in + o];
        const std::size_t wrow = base + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) a += theta_[wrow + i] * h[i];
        if (p == 0 || a > best) best = a;
      }
      if (is_output) next[o] = best;
      else if (act_ == Activation::Tanh) next[o] = std::tanh(best);
      else if (act_ == Activation::Rectifier) next[o] = best > 0.0 ? best : 0.0;
      else next[o] = best;  // maxout: max over pieces is the activation
    }
    h = std::move(next);
  }
  return h[0];
}

double MlpModel::predict(const std::vector<double>& x) const {
  return forward_scaled(x) * (y_max_ - y_min_) + y_min_;
}

double MlpModel::loss_and_gradient(const Matrix& x, const std::vector<double>& y,
                                   std::vector<double>* grad) const {
  const auto shapes = shapes_for(input_dim_, widths_, act_);
  if (grad) grad->assign(theta_.size(), 0.0);
  double loss = 0.0;
  const double n = static_cast<double>(x.size());
  const double y_span = y_max_ - y_min_;

  for (std::size_t sample = 0; sample < x.size(); ++sample) {
    // forward, caching per-layer inputs, winning pieces and pre-activations
    std::vector<std::vector<double>> inputs(shapes.size() + 1);
    std::vector<std::vector<std::size_t>> winner(shapes.size());
    std::vector<std::vector<double>> preact(shapes.size());
    inputs[0].resize(input_dim_);
    for (std::size_t i = 0; i < input_dim_; ++i)
      inputs[0][i] = (x[sample][i] - in_mean_[i]) / in_std_[i];

    for (std::size_t l = 0; l < shapes.size(); ++l) {
      const auto& s = shapes[l];
      const bool is_output = (l + 1 == shapes.size());
      inputs[l + 1].resize(s.out);
      winner[l].assign(s.out, 0);
      preact[l].resize(s.out);
      for (std::size_t o = 0; o < s.out; ++o) {
        double best = 0.0;
        std::size_t best_p = 0;
        for (std::size_t p = 0; p < s.pieces; ++p) {
          const std::size_t base = layer_offsets_[l] + p * (s.out * s.in + s.out);
          double a = theta_[base + s.out * s.in + o];
          const std::size_t wrow = base + o * s.in;
          for (std::size_t i = 0; i < s.in; ++i) a += theta_[wrow + i] * inputs[l][i];
          if (p == 0 || a > best) {
            best = a;
            best_p = p;
          }
        }
        winner[l][o] = best_p;
        preact[l][o] = best;
        if (is_output) inputs[l + 1][o] = best;
        else if (act_ == Activation::Tanh) inputs[l + 1][o] = std::tanh(best);
        else if (act_ == Activation::Rectifier)
          inputs[l + 1][o] = best > 0.0 ? best : 0.0;
        else inputs[l + 1][o] = best;
      }
    }

    const double pred = inputs.back()[0];
    const double target = (y[sample] - y_min_) / y_span;
    const double err = pred - target;
    loss += err * err / n;
    if (!grad) continue;

    // backward
    std::vector<double> delta(1, 2.0 * err / n);  // d loss / d output pre-activation
    for (std::size_t l = shapes.size(); l-- > 0;) {
      const auto& s = shapes[l];
      std::vector<double> delta_prev(s.in, 0.0);
      for (std::size_t o = 0; o < s.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const std::size_t p = winner[l][o];
        const std::size_t base = layer_offsets_[l] + p * (s.out * s.in + s.out);
        const std::size_t wrow = base + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) {
          (*grad)[wrow + i] += d * inputs[l][i];
          delta_prev[i] += d * theta_[wrow + i];
        }
        (*grad)[base + s.out * s.in + o] += d;
      }
      if (l == 0) break;
      // activation derivative of the previous (hidden) layer
      for (std::size_t i = 0; i < s.in; ++i) {
        const double a = preact[l - 1][i];
        double da = 1.0;
        if (act_ == Activation::Tanh) {
          const double t = std::tanh(a);
          da = 1.0 - t * t;
        } else if (act_ == Activation::Rectifier) {
          da = a > 0.0 ? 1.0 : 0.0;
        }  // maxout: identity through the winning piece
        delta_prev[i] *= da;
      }
      delta = std::move(delta_prev);
    }
  }
  return loss;
}

MlpModel train_mlp(const Matrix& x_train, const std::vector<double>& y_train,
                   const Matrix& x_val, const std::vector<double>& y_val,
                   const MlpHp& hp) {
  if (x_train.empty() || x_val.empty())
    throw std::invalid_argument("train_mlp: need nonempty train and val sets");
  const std::size_t d = x_train[0].size();

  MlpModel model;
  model.init(d, hp);

  std::vector<double> mean(d, 0.0), stddev(d, 0.0);
  for (const auto& row : x_train)
    for (std::size_t i = 0; i < d; ++i) mean[i] += row[i];
  for (auto& m : mean) m /= static_cast<double>(x_train.size());
  for (const auto& row : x_train)
    for (std::size_t i = 0; i < d; ++i)
      stddev[i] += (row[i] - mean[i]) * (row[i] - mean[i]);
  for (auto& s : stddev) s = std::sqrt(s / static_cast<double>(x_train.size()));
  model.set_input_stats(mean, stddev);

  double y_min = y_train[0], y_max = y_train[0];
  for (const double v : y_train) {
    y_min = std::min(y_min, v);
    y_max = std::max(y_max, v);
  }
  model.set_target_scale(y_min, y_max);

  auto val_rmse = [&](const MlpModel& m) {
    double sq = 0.0;
    for (std::size_t i = 0; i < x_val.size(); ++i) {
      const double e = m.predict(x_val[i]) - y_val[i];
      sq += e * e;
    }
    return std::sqrt(sq / static_cast<double>(x_val.size()));
  };

  std::vector<double> best_theta = model.parameters();
  double best_rmse = val_rmse(model);

  // Adam, full batch
  std::vector<double> m_t(model.parameters().size(), 0.0);
  std::vector<double> v_t(model.parameters().size(), 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> grad;
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const double loss = model.loss_and_gradient(x_train, y_train, &grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("train_mlp: non-finite loss at epoch " +
                               std::to_string(epoch));
    const double b1c = 1.0 - std::pow(beta1, epoch);
    const double b2c = 1.0 - std::pow(beta2, epoch);
    auto& theta = model.parameters();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m_t[i] = beta1 * m_t[i] + (1.0 - beta1) * grad[i];
      v_t[i] = beta2 * v_t[i] + (1.0 - beta2) * grad[i] * grad[i];
      theta[i] -= hp.learning_rate * (m_t[i] / b1c) / (std::sqrt(v_t[i] / b2c) + eps);
    }
    const double rmse = val_rmse(model);
    if (rmse < best_rmse) {
      best_rmse = rmse;
      best_theta = theta;
    }
  }
  model.parameters() = best_theta;
  return model;
}

std::string MlpModel::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  j["widths"] = widths_;
  j["activation"] = activation_name(act_);
  j["theta"] = theta_;
  j["layer_offsets"] = layer_offsets_;
  j["in_mean"] = in_mean_;
  j["in_std"] = in_std_;
  j["y_min"] = y_min_;
  j["y_max"] = y_max_;
  return j.dump();
}

MlpModel MlpModel::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MlpModel m;
  m.input_dim_ = j.at("input_dim").get<std::size_t>();
  m.widths_ = j.at("widths").get<std::vector<int>>();
  m.act_ = activation_from_name(j.at("activation").get<std::string>());
  m.theta_ = j.at("theta").get<std::vector<double>>();
  m.layer_offsets_ = j.at("layer_offsets").get<std::vector<std::size_t>>();
  m.in_mean_ = j.at("in_mean").get<std::vector<double>>();
  m.in_std_ = j.at("in_std").get<std::vector<double>>();
  m.y_min_ = j.at("y_min").get<double>();
  m.y_max_ = j.at("y_max").get<double>();
  return m;
}

}  // namespace acceldse
