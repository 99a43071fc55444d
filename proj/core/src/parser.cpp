#include "stlccp/parser.hpp"

#include <cctype>
#include <nlohmann/json.hpp>

namespace stlccp {

namespace {

// Recursive-descent parser over the text grammar.  Keeps a cursor into the
// input and reports failures with the offending byte offset.
class Parser {
 public:
  Parser(const std::string& text, int state_dim, const SymbolTable& table)
      : text_(text), dim_(state_dim), table_(table) {}

  Formula parse() {
    Formula f = parse_disj();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after formula");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " (at offset " + std::to_string(pos_) + ")",
                     static_cast<long>(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c, const char* what) {
    if (!eat(c)) fail(std::string("expected '") + c + "' " + what);
  }

  // Temporal operator names G/F/U are reserved; anything else alphanumeric
  // (also '_') is an identifier for the symbol table.
  std::string lex_ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  int lex_int() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected integer");
    return std::stoi(text_.substr(start, pos_ - start));
  }

  double lex_number() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) fail("expected number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("bad exponent");
      }
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    }
    return std::stod(text_.substr(start, pos_ - start));
  }

  std::pair<int, int> lex_interval(const char* op) {
    expect('[', "after temporal operator");
    int t1 = lex_int();
    expect(',', "between interval endpoints");
    int t2 = lex_int();
    expect(']', "after interval");
    if (t1 >= t2) {
      fail(std::string(op) + " interval [" + std::to_string(t1) + "," +
           std::to_string(t2) + "] must satisfy t1 < t2");
    }
    return {t1, t2};
  }

  bool at_temporal_prefix() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (c != 'G' && c != 'F') return false;
    // Only a real prefix when followed by '[' -- otherwise it is an
    // identifier such as a region named G.
    size_t look = pos_ + 1;
    while (look < text_.size() && std::isspace(static_cast<unsigned char>(text_[look]))) {
      ++look;
    }
    return look < text_.size() && text_[look] == '[';
  }

  bool at_until() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != 'U') return false;
    size_t look = pos_ + 1;
    while (look < text_.size() && std::isspace(static_cast<unsigned char>(text_[look]))) {
      ++look;
    }
    return look < text_.size() && text_[look] == '[';
  }

  Formula parse_disj() {
    std::vector<Formula> parts{parse_conj()};
    while (eat('|')) parts.push_back(parse_conj());
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula parse_conj() {
    std::vector<Formula> parts{parse_unary()};
    while (eat('&')) parts.push_back(parse_unary());
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula parse_unary() {
    if (at_temporal_prefix()) {
      char op = text_[pos_++];
      auto [t1, t2] = lex_interval(op == 'G' ? "always" : "eventually");
      Formula body = parse_unary();
      return op == 'G' ? Formula::always(t1, t2, std::move(body))
                       : Formula::eventually(t1, t2, std::move(body));
    }
    Formula lhs = parse_atom();
    if (at_until()) {
      ++pos_;  // consume 'U'
      auto [t1, t2] = lex_interval("until");
      Formula rhs = parse_unary();
      return Formula::until(t1, t2, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Formula f = parse_disj();
      expect(')', "to close group");
      return f;
    }
    if (c == '!') {
      ++pos_;
      std::string name = lex_ident();
      auto it = table_.negated.find(name);
      if (it == table_.negated.end()) {
        fail("unknown name '" + name + "' after '!'");
      }
      return it->second;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'x') {
      size_t save = pos_;
      std::string name = lex_ident();
      auto it = table_.symbols.find(name);
      if (it != table_.symbols.end()) return it->second;
      pos_ = save;
      fail("unknown name '" + name + "'");
    }
    return parse_comparison();
  }

  // linexpr ("<="|">=") number over variables x0..x{dim-1}
  Formula parse_comparison() {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim_);
    parse_linexpr(a);
    skip_ws();
    bool flip;
    if (pos_ + 1 < text_.size() && text_[pos_] == '<' && text_[pos_ + 1] == '=') {
      flip = false;
    } else if (pos_ + 1 < text_.size() && text_[pos_] == '>' && text_[pos_ + 1] == '=') {
      flip = true;
    } else {
      fail("expected '<=' or '>=' in comparison");
    }
    pos_ += 2;
    double b = lex_number();
    if (flip) {  // a'x >= b  ==  -a'x <= -b
      a = -a;
      b = -b;
    }
    return Formula::pred(Predicate{std::move(a), b, ""});
  }

  void parse_linexpr(Eigen::VectorXd& a) {
    double sign = 1.0;
    skip_ws();
    if (eat('-')) sign = -1.0;
    else eat('+');
    parse_term(a, sign);
    while (true) {
      if (eat('+')) parse_term(a, 1.0);
      else if (eat('-')) parse_term(a, -1.0);
      else break;
    }
  }

  void parse_term(Eigen::VectorXd& a, double sign) {
    skip_ws();
    double coeff = 1.0;
    bool saw_number = false;
    if (pos_ < text_.size() &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      coeff = lex_number();
      saw_number = true;
      skip_ws();
      eat('*');
      skip_ws();
    }
    if (pos_ < text_.size() && text_[pos_] == 'x') {
      ++pos_;
      int idx = lex_int();
      if (idx < 0 || idx >= dim_) {
        fail("state index x" + std::to_string(idx) + " out of range for dimension " +
             std::to_string(dim_));
      }
      a[idx] += sign * coeff;
    } else if (!saw_number) {
      fail("expected a term like '2*x0' or 'x1'");
    } else {
      // A bare number on the left moves to the right-hand side unchanged;
      // model it as adding nothing and folding into b via a zero-coefficient
      // trick is messier than rejecting, so reject for clarity.
      fail("constant terms belong on the right-hand side of the comparison");
    }
  }

  const std::string& text_;
  int dim_;
  const SymbolTable& table_;
  size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(const std::string& text, int state_dim,
                      const SymbolTable& table) {
  if (state_dim <= 0) throw std::invalid_argument("state_dim must be positive");
  return Parser(text, state_dim, table).parse();
}

namespace {

Formula node_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ParseError("formula JSON node must be an object with a 'kind' field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "pred") {
      Predicate p;
      const auto& arr = j.at("a");
      p.a.resize(static_cast<Eigen::Index>(arr.size()));
      for (size_t i = 0; i < arr.size(); ++i) p.a[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
      p.b = j.at("b").get<double>();
      if (j.contains("label")) p.label = j.at("label").get<std::string>();
      return Formula::pred(std::move(p));
    }
    if (kind == "and" || kind == "or") {
      std::vector<Formula> children;
      for (const auto& c : j.at("children")) children.push_back(node_from_json(c));
      return kind == "and" ? Formula::conj(std::move(children))
                           : Formula::disj(std::move(children));
    }
    if (kind == "always" || kind == "eventually") {
      int t1 = j.at("t1").get<int>();
      int t2 = j.at("t2").get<int>();
      Formula child = node_from_json(j.at("child"));
      return kind == "always" ? Formula::always(t1, t2, std::move(child))
                              : Formula::eventually(t1, t2, std::move(child));
    }
    if (kind == "until") {
      return Formula::until(j.at("t1").get<int>(), j.at("t2").get<int>(),
                            node_from_json(j.at("lhs")),
                            node_from_json(j.at("rhs")));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed formula JSON: ") + e.what());
  }
  throw ParseError("unknown formula kind '" + kind + "'");
}

}  // namespace

Formula formula_from_json(const nlohmann::json& j) { return node_from_json(j); }

nlohmann::json formula_to_json(const Formula& f) {
  nlohmann::json j;
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      j["kind"] = "pred";
      const auto& p = f.predicate();
      j["a"] = std::vector<double>(p.a.data(), p.a.data() + p.a.size());
      j["b"] = p.b;
      if (!p.label.empty()) j["label"] = p.label;
      break;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      j["kind"] = f.kind() == Formula::Kind::And ? "and" : "or";
      auto arr = nlohmann::json::array();
      for (const auto& c : f.children()) arr.push_back(formula_to_json(c));
      j["children"] = std::move(arr);
      break;
    }
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      j["kind"] = f.kind() == Formula::Kind::Always ? "always" : "eventually";
      j["t1"] = f.t1();
      j["t2"] = f.t2();
      j["child"] = formula_to_json(f.child());
      break;
    case Formula::Kind::Until:
      j["kind"] = "until";
      j["t1"] = f.t1();
      j["t2"] = f.t2();
      j["lhs"] = formula_to_json(f.until_lhs());
      j["rhs"] = formula_to_json(f.until_rhs());
      break;
  }
  return j;
}

}  // namespace stlccp
