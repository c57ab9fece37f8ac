#include "acceldse/surrogate/layer_config.hpp"

#include <cmath>
#include <stdexcept>

namespace acceldse {

std::vector<int> hidden_layer_config(int node_count, int hidden_layer_count,
                                     int min_p, int max_p) {
  if (min_p > max_p) throw std::invalid_argument("hidden_layer_config: minP > maxP");
  if (node_count < 2 || hidden_layer_count < 1)
    throw std::invalid_argument("hidden_layer_config: need nodeCount >= 2, hLayerCount >= 1");

  int p = static_cast<int>(std::ceil(std::log2(static_cast<double>(node_count))));
  int exp_max_p = std::min((hidden_layer_count + min_p + p) / 2, max_p);
  if (exp_max_p <= p) exp_max_p = p + 1;
  const int incr_p = exp_max_p - p;
  const int decr_p = std::min(exp_max_p - min_p + 1, hidden_layer_count - incr_p);
  int same_p = 0;
  if (hidden_layer_count > incr_p + decr_p)
    same_p = hidden_layer_count - incr_p - decr_p;

  std::vector<int> layer;
  layer.reserve(static_cast<std::size_t>(hidden_layer_count));
  for (int i = 0; i < incr_p; ++i) {
    layer.push_back(1 << p);
    ++p;
  }
  for (int i = 0; i < same_p; ++i) layer.push_back(1 << p);
  for (int i = 0; i < decr_p; ++i) {
    layer.push_back(1 << p);
    --p;
  }
  return layer;
}

}  // namespace acceldse
