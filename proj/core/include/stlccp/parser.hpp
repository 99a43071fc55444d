#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>

#include "stlccp/formula.hpp"

namespace stlccp {

// Parse failure; `pos` is the byte offset into the input text (or -1 when
// the error is not tied to a location, e.g. a bad JSON document).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, long pos = -1)
      : std::runtime_error(msg), pos_(pos) {}
  long pos() const { return pos_; }

 private:
  long pos_;
};

// Name table the parser resolves bare identifiers against.  `symbols` maps
// an identifier to the formula it stands for (a predicate, or the
// inside-region conjunction).  `negated` maps the identifier to its
// complement (flipped predicate, or the outside-region disjunction) and is
// consulted for `!name`.
struct SymbolTable {
  std::map<std::string, Formula> symbols;
  std::map<std::string, Formula> negated;
};

// Text grammar, loosest binding first:
//
//   formula    := conj ("|" conj)*
//   conj       := unary ("&" unary)*
//   unary      := ("G"|"F") "[" int "," int "]" unary
//               | atom "U" "[" int "," int "]" unary
//               | atom
//   atom       := "!" IDENT | IDENT | comparison | "(" formula ")"
//   comparison := linexpr ("<="|">=") number
//   linexpr    := term (("+"|"-") term)*
//   term       := number ["*" var] | var        var := "x" index
//
// G = always, F = eventually, intervals are inclusive with t1 < t2.
// Comparisons produce linear predicates over x0..x{state_dim-1};
// ">=" flips signs so everything lands in the "<= 0 satisfied" convention.
Formula parse_formula(const std::string& text, int state_dim,
                      const SymbolTable& table = {});

// JSON mirror of the AST.  Discriminated on "kind":
//   {"kind":"pred","a":[...],"b":num,"label":str?}
//   {"kind":"and"|"or","children":[...]}
//   {"kind":"always"|"eventually","t1":int,"t2":int,"child":{...}}
//   {"kind":"until","t1":int,"t2":int,"lhs":{...},"rhs":{...}}
Formula formula_from_json(const nlohmann::json& j);
nlohmann::json formula_to_json(const Formula& f);

}  // namespace stlccp
