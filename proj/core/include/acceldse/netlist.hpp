#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace acceldse {

// --- Structural netlist AST -------------------------------------------------
//
// Grammar (line-oriented, // comments):
//   module NAME ( port[, port]* ) ;
//     input|output|wire [MSB:LSB]? name[, name]* ;
//     KIND inst ( out , in[, in]* ) ;            primitive
//     MODULE inst ( .port(net)[, .port(net)]* ); submodule
//   endmodule

enum class PortDir { In, Out };

struct Port {
  std::string name;
  PortDir dir = PortDir::In;
  int width = 1;
};

struct Wire {
  std::string name;
  int width = 1;
};

struct PrimitiveInstance {
  std::string kind;  // and/or/nand/nor/xor/xnor/inv/buf/mux/dff/latch/mem
  std::string name;
  std::vector<std::string> pins;  // first pin is the output
};

struct SubmoduleInstance {
  std::string module_name;
  std::string instance_name;
  std::vector<std::pair<std::string, std::string>> connections;  // (.port, net)
};

struct ModuleDef {
  std::string name;
  std::vector<Port> ports;
  std::vector<Wire> wires;
  std::vector<PrimitiveInstance> primitives;
  std::vector<SubmoduleInstance> submodules;
};

struct NetlistAst {
  std::map<std::string, ModuleDef> modules;
  std::vector<std::string> module_order;  // declaration order
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int column_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(column_) + ": " + what_),
        line(line_),
        column(column_) {}
};

bool is_combinational_primitive(const std::string& kind);
bool is_primitive_kind(const std::string& kind);

// Throws ParseError on syntax errors, std::runtime_error on undefined
// submodule references or duplicate module names.
NetlistAst parse_netlist(const std::string& text);

// Canonical text form; parse(pretty_print(parse(t))) == parse(t).
std::string pretty_print(const NetlistAst& ast);

// --- Node features and logical hierarchy graph -------------------------------

struct NodeFeatures {
  double in_signals = 0;
  double out_signals = 0;
  double avg_in_bits = 0;
  double avg_out_bits = 0;
  double comb_cells = 0;
  double flops = 0;
  double mems = 0;
  double avg_comb_inputs = 0;

  std::array<double, 8> as_array() const {
    return {in_signals, out_signals, avg_in_bits,    avg_out_bits,
            comb_cells, flops,       mems,           avg_comb_inputs};
  }
};

// Counts cover only the module's own body; submodule contents are excluded.
NodeFeatures extract_features(const ModuleDef& module);

struct LhgNode {
  int id = 0;
  std::string module_name;
  NodeFeatures features;
};

struct LogicalHierarchyGraph {
  std::vector<LhgNode> nodes;                 // node i has id i (preorder)
  std::vector<std::pair<int, int>> edges;     // undirected (parent, child)
};

// Depth-first instantiation walk from the top module; every submodule
// instance becomes its own node. Throws on unknown top or hierarchy cycles.
LogicalHierarchyGraph build_lhg(const NetlistAst& ast, const std::string& top_name);

// Per-column standardization statistics for the 8 node-feature columns.
struct FeatureStandardizer {
  std::array<double, 8> mean{};
  std::array<double, 8> stddev{};  // zero-variance columns keep stddev 0

  static FeatureStandardizer fit(const std::vector<LogicalHierarchyGraph>& graphs);
};

// Row i = standardized features of node id i. Edges are emitted once each.
std::pair<std::vector<std::array<double, 8>>, std::vector<std::pair<int, int>>>
lhg_to_matrices(const LogicalHierarchyGraph& lhg, const FeatureStandardizer& stats);

std::string lhg_to_json(const LogicalHierarchyGraph& lhg);
LogicalHierarchyGraph lhg_from_json(const std::string& text);

}  // namespace acceldse
