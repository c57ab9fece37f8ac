#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace acceldse {

enum class ConvKind { GraphConv, GcnConv };

std::string conv_kind_name(ConvKind k);
ConvKind conv_kind_from_name(const std::string& s);

// Preprocessed graph input: standardized 8-wide node features plus an
// undirected edge list over node ids.
struct GcnGraph {
  std::vector<std::array<double, 8>> node_features;
  std::vector<std::pair<int, int>> edges;
};

struct GcnHp {
  ConvKind conv = ConvKind::GraphConv;
  int num_conv_layers = 3;   // 2..6
  int num_fc_layers = 3;     // 2..9
  int embedding_width = 16;  // node embedding width of every conv layer
  int batch_size = 32;
  double learning_rate = 1e-3;
  int max_epochs = 200;
  double lr_decay = 0.7;
  int lr_patience = 5;
  int early_stop_patience = 20;
  std::uint64_t seed = 0;
};

// Graph regressor: conv stack -> rectifier -> global mean pool -> embedding
// concatenated with scalar features -> fully connected head (widths from the
// ramp schedule) -> linear output. Trained with the mean-APE loss.
class GcnModel {
 public:
  void init(std::size_t scalar_dim, const GcnHp& hp);

  double predict(const GcnGraph& graph, const std::vector<double>& scalars) const;

  // Mean-APE loss (percent) over a batch and gradient w.r.t. flat parameters.
  double loss_and_gradient(const std::vector<const GcnGraph*>& graphs,
                           const std::vector<std::vector<double>>& scalars,
                           const std::vector<double>& targets,
                           std::vector<double>* grad) const;

  std::vector<double>& parameters() { return theta_; }
  const std::vector<double>& parameters() const { return theta_; }
  const GcnHp& hp() const { return hp_; }

  std::string to_json() const;
  static GcnModel from_json(const std::string& text);

 private:
  double forward(const GcnGraph& graph, const std::vector<double>& scalars,
                 std::vector<std::vector<std::vector<double>>>* conv_acts,
                 std::vector<std::vector<double>>* fc_acts) const;

  std::size_t scalar_dim_ = 0;
  GcnHp hp_;
  std::vector<int> fc_widths_;
  std::vector<double> theta_;
  std::vector<std::size_t> conv_offsets_;
  std::vector<std::size_t> fc_offsets_;
};

// Adam with step-decay on validation plateaus and early stopping; returns the
// best-validation weights.
GcnModel train_gcn(const std::vector<GcnGraph>& train_graphs,
                   const std::vector<std::vector<double>>& train_scalars,
                   const std::vector<double>& train_targets,
                   const std::vector<GcnGraph>& val_graphs,
                   const std::vector<std::vector<double>>& val_scalars,
                   const std::vector<double>& val_targets, const GcnHp& hp);

}  // namespace acceldse
