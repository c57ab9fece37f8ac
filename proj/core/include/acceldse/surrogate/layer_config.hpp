#pragma once

#include <vector>

namespace acceldse {

// Hidden-layer width schedule: widths ramp up from nodeCount to a peak of
// 2^expMaxP, hold, then halve down toward 2^minP. All widths are powers of
// two. The expMaxP computation uses integer floor division.
std::vector<int> hidden_layer_config(int node_count, int hidden_layer_count,
                                     int min_p = 2, int max_p = 7);

}  // namespace acceldse
