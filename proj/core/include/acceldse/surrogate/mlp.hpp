#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acceldse/surrogate/tree.hpp"  // Matrix

namespace acceldse {

enum class Activation { Tanh, Rectifier, Maxout };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& s);

struct MlpHp {
  int node_count = 16;      // first hidden layer width (layer schedule input)
  int num_layers = 3;       // hidden layer count
  Activation act = Activation::Tanh;
  int epochs = 500;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
};

// Fully connected regressor with the ramp-up/ramp-down hidden widths, a single
// linear output, z-scored inputs and min-max scaled targets. Maxout units use
// two linear pieces. Parameters live in one flat vector so the analytic
// gradient can be checked against finite differences.
class MlpModel {
 public:
  void init(std::size_t input_dim, const MlpHp& hp);

  // Prediction in original target units (applies stored scaling).
  double predict(const std::vector<double>& x) const;

  // MSE loss over scaled targets and its gradient w.r.t. the flat parameters.
  // Inputs are raw; standardization is applied internally.
  double loss_and_gradient(const Matrix& x, const std::vector<double>& y,
                           std::vector<double>* grad) const;

  std::vector<double>& parameters() { return theta_; }
  const std::vector<double>& parameters() const { return theta_; }

  void set_input_stats(std::vector<double> mean, std::vector<double> stddev);
  void set_target_scale(double y_min, double y_max);
  const std::vector<int>& widths() const { return widths_; }

  std::string to_json() const;
  static MlpModel from_json(const std::string& text);

 private:
  friend MlpModel train_mlp(const Matrix&, const std::vector<double>&, const Matrix&,
                            const std::vector<double>&, const MlpHp&);

  double forward_scaled(const std::vector<double>& x_raw) const;

  std::size_t input_dim_ = 0;
  std::vector<int> widths_;
  Activation act_ = Activation::Tanh;
  std::vector<double> theta_;
  std::vector<std::size_t> layer_offsets_;  // offset of each layer's block
  std::vector<double> in_mean_, in_std_;
  double y_min_ = 0.0, y_max_ = 1.0;
};

// Adam on full batches; returns the weights with the best validation RMSE.
// Throws std::runtime_error naming the epoch if the loss goes non-finite.
MlpModel train_mlp(const Matrix& x_train, const std::vector<double>& y_train,
                   const Matrix& x_val, const std::vector<double>& y_val,
                   const MlpHp& hp);

}  // namespace acceldse
