#include "acceldse/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace acceldse {

namespace {

const std::set<std::string> kCombKinds = {"and", "or",  "nand", "nor", "xor",
                                          "xnor", "inv", "buf",  "mux"};
const std::set<std::string> kSeqKinds = {"dff", "latch", "mem"};

struct Token {
  enum Kind { Ident, Number, Punct, End } kind = End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws_and_comments();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= text_.size()) {
      t.kind = Token::End;
      return t;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_' || text_[pos_] == '$')) {
        t.text += text_[pos_];
        advance();
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::Number;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        t.text += text_[pos_];
        advance();
      }
      return t;
    }
    if (std::string("();,.[]:").find(c) != std::string::npos) {
      t.kind = Token::Punct;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { bump(); }

  NetlistAst parse() {
    NetlistAst ast;
    while (cur_.kind != Token::End) {
      expect_keyword("module");
      ModuleDef m = parse_module();
      if (ast.modules.count(m.name))
        throw std::runtime_error("duplicate module name '" + m.name + "'");
      ast.module_order.push_back(m.name);
      ast.modules.emplace(m.name, std::move(m));
    }
    // Resolve submodule references; anything that is not a defined module and
    // not a primitive kind is an error.
    for (const auto& [name, m] : ast.modules) {
      (void)name;
      for (const auto& sub : m.submodules)
        if (!ast.modules.count(sub.module_name))
          throw std::runtime_error("undefined submodule '" + sub.module_name +
                                   "' instantiated in module '" + m.name + "'");
    }
    return ast;
  }

 private:
  void bump() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(cur_.line, cur_.column, what);
  }

  std::string expect_ident() {
    if (cur_.kind != Token::Ident) fail("expected identifier");
    std::string s = cur_.text;
    bump();
    return s;
  }

  int expect_number() {
    if (cur_.kind != Token::Number) fail("expected number");
    const int v = std::stoi(cur_.text);
    bump();
    return v;
  }

  void expect_punct(const std::string& p) {
    if (cur_.kind != Token::Punct || cur_.text != p) fail("expected '" + p + "'");
    bump();
  }

  bool accept_punct(const std::string& p) {
    if (cur_.kind == Token::Punct && cur_.text == p) {
      bump();
      return true;
    }
    return false;
  }

  void expect_keyword(const std::string& kw) {
    if (cur_.kind != Token::Ident || cur_.text != kw) fail("expected '" + kw + "'");
    bump();
  }

  bool at_keyword(const std::string& kw) const {
    return cur_.kind == Token::Ident && cur_.text == kw;
  }

  ModuleDef parse_module() {
    ModuleDef m;
    m.name = expect_ident();
    expect_punct("(");
    if (!accept_punct(")")) {
      do {
        expect_ident();  // header port list is declarative only
      } while (accept_punct(","));
      expect_punct(")");
    }
    expect_punct(";");

    while (!at_keyword("endmodule")) {
      if (cur_.kind == Token::End) fail("unexpected end of input, missing endmodule");
      if (at_keyword("input") || at_keyword("output") || at_keyword("wire")) {
        parse_declaration(m);
      } else {
        parse_instance(m);
      }
    }
    bump();  // endmodule
    return m;
  }

  void parse_declaration(ModuleDef& m) {
    const std::string kw = expect_ident();
    int width = 1;
    if (accept_punct("[")) {
      const int msb = expect_number();
      expect_punct(":");
      const int lsb = expect_number();
      expect_punct("]");
      width = std::abs(msb - lsb) + 1;
    }
    do {
      const std::string name = expect_ident();
      if (kw == "wire") {
        m.wires.push_back({name, width});
      } else {
        Port p;
        p.name = name;
        p.dir = (kw == "input") ? PortDir::In : PortDir::Out;
        p.width = width;
        m.ports.push_back(p);
      }
    } while (accept_punct(","));
    expect_punct(";");
  }

  void parse_instance(ModuleDef& m) {
    const std::string kind = expect_ident();
    const std::string inst = expect_ident();
    expect_punct("(");
    if (is_primitive_kind(kind)) {
      PrimitiveInstance p;
      p.kind = kind;
      p.name = inst;
      do {
        p.pins.push_back(expect_ident());
      } while (accept_punct(","));
      expect_punct(")");
      expect_punct(";");
      if (p.pins.size() < 2) fail("primitive '" + inst + "' needs an output and at least one input");
      m.primitives.push_back(std::move(p));
    } else {
      SubmoduleInstance s;
      s.module_name = kind;
      s.instance_name = inst;
      if (!accept_punct(")")) {
        do {
          expect_punct(".");
          const std::string port = expect_ident();
          expect_punct("(");
          const std::string net = expect_ident();
          expect_punct(")");
          s.connections.emplace_back(port, net);
        } while (accept_punct(","));
        expect_punct(")");
      }
      expect_punct(";");
      m.submodules.push_back(std::move(s));
    }
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

bool is_combinational_primitive(const std::string& kind) {
  return kCombKinds.count(kind) > 0;
}

bool is_primitive_kind(const std::string& kind) {
  return kCombKinds.count(kind) > 0 || kSeqKinds.count(kind) > 0;
}

NetlistAst parse_netlist(const std::string& text) { return Parser(text).parse(); }

std::string pretty_print(const NetlistAst& ast) {
  std::ostringstream os;
  for (const auto& name : ast.module_order) {
    const ModuleDef& m = ast.modules.at(name);
    os << "module " << m.name << " (";
    for (std::size_t i = 0; i < m.ports.size(); ++i)
      os << (i ? ", " : "") << m.ports[i].name;
    os << ");\n";
    for (const auto& p : m.ports) {
      os << "  " << (p.dir == PortDir::In ? "input" : "output");
      if (p.width != 1) os << " [" << (p.width - 1) << ":0]";
      os << " " << p.name << ";\n";
    }
    for (const auto& w : m.wires) {
      os << "  wire";
      if (w.width != 1) os << " [" << (w.width - 1) << ":0]";
      os << " " << w.name << ";\n";
    }
    for (const auto& p : m.primitives) {
      os << "  " << p.kind << " " << p.name << " (";
      for (std::size_t i = 0; i < p.pins.size(); ++i) os << (i ? ", " : "") << p.pins[i];
      os << ");\n";
    }
    for (const auto& s : m.submodules) {
      os << "  " << s.module_name << " " << s.instance_name << " (";
      for (std::size_t i = 0; i < s.connections.size(); ++i)
        os << (i ? ", " : "") << "." << s.connections[i].first << "("
           << s.connections[i].second << ")";
      os << ");\n";
    }
    os << "endmodule\n";
  }
  return os.str();
}

NodeFeatures extract_features(const ModuleDef& module) {
  NodeFeatures f;
  double in_bits = 0.0, out_bits = 0.0;
  for (const auto& p : module.ports) {
    if (p.dir == PortDir::In) {
      f.in_signals += 1;
      in_bits += p.width;
    } else {
      f.out_signals += 1;
      out_bits += p.width;
    }
  }
  f.avg_in_bits = f.in_signals > 0 ? in_bits / f.in_signals : 0.0;
  f.avg_out_bits = f.out_signals > 0 ? out_bits / f.out_signals : 0.0;
  double comb_inputs = 0.0;
  for (const auto& p : module.primitives) {
    if (is_combinational_primitive(p.kind)) {
      f.comb_cells += 1;
      comb_inputs += static_cast<double>(p.pins.size() - 1);  // first pin is output
    } else if (p.kind == "mem") {
      f.mems += 1;
    } else {  // dff, latch
      f.flops += 1;
    }
  }
  f.avg_comb_inputs = f.comb_cells > 0 ? comb_inputs / f.comb_cells : 0.0;
  return f;
}

namespace {

int add_node_to_graph(const NetlistAst& ast,
                      const std::map<std::string, NodeFeatures>& features,
                      const std::string& module_name, LogicalHierarchyGraph& g,
                      int pid, int id, std::vector<std::string>& stack) {
  if (std::find(stack.begin(), stack.end(), module_name) != stack.end())
    throw std::runtime_error("hierarchy cycle through module '" + module_name + "'");
  const int node_id = id;
  g.nodes.push_back({node_id, module_name, features.at(module_name)});
  ++id;
  if (pid != -1) g.edges.emplace_back(pid, node_id);
  stack.push_back(module_name);
  for (const auto& sub : ast.modules.at(module_name).submodules)
    id = add_node_to_graph(ast, features, sub.module_name, g, node_id, id, stack);
  stack.pop_back();
  return id;
}

}  // namespace

LogicalHierarchyGraph build_lhg(const NetlistAst& ast, const std::string& top_name) {
  if (!ast.modules.count(top_name))
    throw std::runtime_error("unknown top module '" + top_name + "'");
  std::map<std::string, NodeFeatures> features;
  for (const auto& [name, m] : ast.modules) features[name] = extract_features(m);
  LogicalHierarchyGraph g;
  std::vector<std::string> stack;
  add_node_to_graph(ast, features, top_name, g, -1, 0, stack);
  return g;
}

FeatureStandardizer FeatureStandardizer::fit(
    const std::vector<LogicalHierarchyGraph>& graphs) {
  FeatureStandardizer st;
  std::size_t n = 0;
  for (const auto& g : graphs)
    for (const auto& node : g.nodes) {
      const auto row = node.features.as_array();
      for (std::size_t c = 0; c < 8; ++c) st.mean[c] += row[c];
      ++n;
    }
  if (n == 0) return st;
  for (std::size_t c = 0; c < 8; ++c) st.mean[c] /= static_cast<double>(n);
  std::array<double, 8> var{};
  for (const auto& g : graphs)
    for (const auto& node : g.nodes) {
      const auto row = node.features.as_array();
      for (std::size_t c = 0; c < 8; ++c)
        var[c] += (row[c] - st.mean[c]) * (row[c] - st.mean[c]);
    }
  for (std::size_t c = 0; c < 8; ++c)
    st.stddev[c] = std::sqrt(var[c] / static_cast<double>(n));
  return st;
}

std::pair<std::vector<std::array<double, 8>>, std::vector<std::pair<int, int>>>
lhg_to_matrices(const LogicalHierarchyGraph& lhg, const FeatureStandardizer& stats) {
  std::vector<std::array<double, 8>> rows;
  rows.reserve(lhg.nodes.size());
  for (const auto& node : lhg.nodes) {
    auto row = node.features.as_array();
    for (std::size_t c = 0; c < 8; ++c) {
      // zero-variance columns standardize to 0
      row[c] = stats.stddev[c] > 0.0 ? (row[c] - stats.mean[c]) / stats.stddev[c] : 0.0;
    }
    rows.push_back(row);
  }
  return {rows, lhg.edges};
}

std::string lhg_to_json(const LogicalHierarchyGraph& lhg) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& node : lhg.nodes) {
    nlohmann::json n;
    n["id"] = node.id;
    n["module"] = node.module_name;
    n["features"] = node.features.as_array();
    doc["nodes"].push_back(n);
  }
  doc["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : lhg.edges) doc["edges"].push_back({a, b});
  return doc.dump(2);
}

LogicalHierarchyGraph lhg_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  LogicalHierarchyGraph g;
  for (const auto& n : doc.at("nodes")) {
    LhgNode node;
    node.id = n.at("id").get<int>();
    node.module_name = n.at("module").get<std::string>();
    const auto f = n.at("features").get<std::array<double, 8>>();
    node.features = {f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7]};
    g.nodes.push_back(std::move(node));
  }
  for (const auto& e : doc.at("edges"))
    g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

}  // namespace acceldse
