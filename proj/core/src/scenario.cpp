#include "stlccp/scenario.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace stlccp {

using nlohmann::json;

LinearSystem double_integrator() {
  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Identity(4, 4);
  sys.A(0, 2) = 1.0;
  sys.A(1, 3) = 1.0;
  sys.B = Eigen::MatrixXd::Zero(4, 2);
  sys.B(2, 0) = 1.0;
  sys.B(3, 1) = 1.0;
  return sys;
}

const char* to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Target: return "target";
    case RegionKind::Goal: return "goal";
    case RegionKind::Obstacle: return "obstacle";
    case RegionKind::Key: return "key";
    case RegionKind::Door: return "door";
    case RegionKind::Passage: return "passage";
  }
  return "?";
}

RegionKind region_kind_from_string(const std::string& s) {
  if (s == "target") return RegionKind::Target;
  if (s == "goal") return RegionKind::Goal;
  if (s == "obstacle") return RegionKind::Obstacle;
  if (s == "key") return RegionKind::Key;
  if (s == "door") return RegionKind::Door;
  if (s == "passage") return RegionKind::Passage;
  throw std::invalid_argument("unknown region kind: " + s);
}

const char* to_string(ScenarioTemplate t) {
  switch (t) {
    case ScenarioTemplate::TwoTarget: return "two_target";
    case ScenarioTemplate::NarrowPassage: return "narrow_passage";
    case ScenarioTemplate::ManyTarget: return "many_target";
    case ScenarioTemplate::DoorPuzzle: return "door_puzzle";
    case ScenarioTemplate::Custom: return "custom";
  }
  return "?";
}

ScenarioTemplate template_from_string(const std::string& s) {
  if (s == "two_target") return ScenarioTemplate::TwoTarget;
  if (s == "narrow_passage") return ScenarioTemplate::NarrowPassage;
  if (s == "many_target") return ScenarioTemplate::ManyTarget;
  if (s == "door_puzzle") return ScenarioTemplate::DoorPuzzle;
  if (s == "custom") return ScenarioTemplate::Custom;
  throw std::invalid_argument("unknown scenario template: " + s);
}

namespace {

Predicate face(int state_dim, int axis, double coeff, double b,
               const std::string& label) {
  Predicate p;
  p.a = Eigen::VectorXd::Zero(state_dim);
  p.a[axis] = coeff;
  p.b = b;
  p.label = label;
  return p;
}

}  // namespace

Formula region_inside(const Region& r, int state_dim) {
  // four faces read "coordinate within bound", each in a'x - b <= 0 form
  std::vector<Formula> faces;
  faces.push_back(
      Formula::pred(face(state_dim, 0, -1.0, -r.rect.xmin, r.name + ":xmin")));
  faces.push_back(
      Formula::pred(face(state_dim, 0, 1.0, r.rect.xmax, r.name + ":xmax")));
  faces.push_back(
      Formula::pred(face(state_dim, 1, -1.0, -r.rect.ymin, r.name + ":ymin")));
  faces.push_back(
      Formula::pred(face(state_dim, 1, 1.0, r.rect.ymax, r.name + ":ymax")));
  return Formula::conj(std::move(faces));
}

Formula region_outside(const Region& r, int state_dim) {
  // negation pushed onto the predicates: at least one face violated
  std::vector<Formula> faces;
  faces.push_back(
      Formula::pred(face(state_dim, 0, 1.0, r.rect.xmin, "!" + r.name + ":xmin")));
  faces.push_back(
      Formula::pred(face(state_dim, 0, -1.0, -r.rect.xmax, "!" + r.name + ":xmax")));
  faces.push_back(
      Formula::pred(face(state_dim, 1, 1.0, r.rect.ymin, "!" + r.name + ":ymin")));
  faces.push_back(
      Formula::pred(face(state_dim, 1, -1.0, -r.rect.ymax, "!" + r.name + ":ymax")));
  return Formula::disj(std::move(faces));
}

const Region& Scenario::region(const std::string& region_name) const {
  for (const auto& r : regions) {
    if (r.name == region_name) return r;
  }
  throw std::invalid_argument("scenario '" + name + "' has no region named '" +
                              region_name + "'");
}

SymbolTable scenario_symbols(const Scenario& s) {
  SymbolTable table;
  const int n = s.system.state_dim();
  for (const auto& r : s.regions) {
    table.symbols.emplace(r.name, region_inside(r, n));
    table.negated.emplace(r.name, region_outside(r, n));
  }
  return table;
}

Formula build_scenario_spec(const Scenario& s, std::optional<int> horizon) {
  const int T = horizon.value_or(s.horizon);
  const int n = s.system.state_dim();
  auto inside = [&](const std::string& name) {
    return region_inside(s.region(name), n);
  };
  auto outside = [&](const std::string& name) {
    return region_outside(s.region(name), n);
  };

  switch (s.tmpl) {
    case ScenarioTemplate::TwoTarget: {
      if (T < 6) {
        throw HorizonError("two-target needs T >= 6 for the [0,5] dwell");
      }
      Formula dwell = Formula::disj({Formula::always(0, 5, inside("T1")),
                                     Formula::always(0, 5, inside("T2"))});
      return Formula::conj({Formula::eventually(0, T - 5, std::move(dwell)),
                            Formula::always(0, T, outside("O")),
                            Formula::eventually(0, T, inside("G"))});
    }
    case ScenarioTemplate::NarrowPassage: {
      Formula goals =
          Formula::disj({inside("G1"), inside("G2")});
      std::vector<Formula> avoid;
      for (int i = 1; i <= 4; ++i) avoid.push_back(outside("O" + std::to_string(i)));
      return Formula::conj(
          {Formula::eventually(0, T, std::move(goals)),
           Formula::always(0, T, Formula::conj(std::move(avoid)))});
    }
    case ScenarioTemplate::ManyTarget: {
      std::vector<Formula> parts;
      for (int i = 1; i <= 5; ++i) {
        std::string base = "T" + std::to_string(i);
        parts.push_back(
            Formula::disj({Formula::eventually(0, T, inside(base + "_1")),
                           Formula::eventually(0, T, inside(base + "_2"))}));
      }
      parts.push_back(Formula::always(0, T, outside("O")));
      return Formula::conj(std::move(parts));
    }
    case ScenarioTemplate::DoorPuzzle: {
      std::vector<Formula> parts;
      for (int i = 1; i <= 2; ++i) {
        std::string idx = std::to_string(i);
        parts.push_back(
            Formula::until(0, T, outside("D" + idx), inside("K" + idx)));
      }
      parts.push_back(Formula::eventually(0, T, inside("G")));
      std::vector<Formula> avoid;
      for (int i = 1; i <= 5; ++i) avoid.push_back(outside("O" + std::to_string(i)));
      parts.push_back(Formula::always(0, T, Formula::conj(std::move(avoid))));
      return Formula::conj(std::move(parts));
    }
    case ScenarioTemplate::Custom:
      return parse_formula(s.formula_text, n, scenario_symbols(s));
  }
  throw std::logic_error("unreachable template");
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd json_to_vector(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd json_to_matrix(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return {};
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw ParseError("ragged matrix rows in scenario JSON");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json rows_to_json(const std::vector<InequalityRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back(json{{"a", vector_to_json(r.a)}, {"b", r.b}});
  }
  return arr;
}

std::vector<InequalityRow> rows_from_json(const json& j) {
  std::vector<InequalityRow> rows;
  for (const auto& item : j) {
    rows.push_back({json_to_vector(item.at("a")), item.at("b").get<double>()});
  }
  return rows;
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    s.name = j.value("name", std::string{});
    if (!j.contains("system") || j["system"] == "double_integrator") {
      s.system = double_integrator();
    } else {
      s.system.A = json_to_matrix(j["system"].at("A"));
      s.system.B = json_to_matrix(j["system"].at("B"));
    }
    s.x0 = json_to_vector(j.at("x0"));
    if (j.contains("x0_pinned")) {
      for (const auto& flag : j["x0_pinned"]) {
        s.x0_pinned.push_back(flag.get<bool>());
      }
    }
    s.horizon = j.at("T").get<int>();
    if (j.contains("bounds")) {
      const auto& b = j["bounds"];
      if (b.contains("state_lo")) s.bounds.state_lo = json_to_vector(b["state_lo"]);
      if (b.contains("state_hi")) s.bounds.state_hi = json_to_vector(b["state_hi"]);
      if (b.contains("input_lo")) s.bounds.input_lo = json_to_vector(b["input_lo"]);
      if (b.contains("input_hi")) s.bounds.input_hi = json_to_vector(b["input_hi"]);
      if (b.contains("state_rows")) s.bounds.state_rows = rows_from_json(b["state_rows"]);
      if (b.contains("input_rows")) s.bounds.input_rows = rows_from_json(b["input_rows"]);
    }
    for (const auto& rj : j.value("regions", json::array())) {
      Region r;
      r.name = rj.at("name").get<std::string>();
      const auto& rect = rj.at("rect");
      r.rect.xmin = rect.at("xmin").get<double>();
      r.rect.xmax = rect.at("xmax").get<double>();
      r.rect.ymin = rect.at("ymin").get<double>();
      r.rect.ymax = rect.at("ymax").get<double>();
      r.kind = region_kind_from_string(rj.value("kind", "target"));
      if (!(r.rect.xmin < r.rect.xmax) || !(r.rect.ymin < r.rect.ymax)) {
        throw ParseError("region '" + r.name + "' has an empty rectangle");
      }
      s.regions.push_back(std::move(r));
    }
    s.tmpl = template_from_string(j.value("template", "custom"));
    s.formula_text = j.value("formula", std::string{});
    if (j.contains("quad")) {
      QuadCost quad;
      quad.Q = json_to_matrix(j["quad"].at("Q"));
      quad.R = json_to_matrix(j["quad"].at("R"));
      quad.weight = j["quad"].at("w_q").get<double>();
      s.quad = std::move(quad);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad scenario JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad scenario JSON: ") + e.what());
  }
  if (s.tmpl == ScenarioTemplate::Custom && s.formula_text.empty()) {
    throw ParseError("custom scenario needs a 'formula' entry");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  LinearSystem di = double_integrator();
  if (same_matrix(s.system.A, di.A) && same_matrix(s.system.B, di.B)) {
    j["system"] = "double_integrator";
  } else {
    j["system"] = {{"A", matrix_to_json(s.system.A)},
                   {"B", matrix_to_json(s.system.B)}};
  }
  j["x0"] = vector_to_json(s.x0);
  if (!s.x0_pinned.empty()) {
    json arr = json::array();
    for (bool flag : s.x0_pinned) arr.push_back(flag);
    j["x0_pinned"] = std::move(arr);
  }
  j["T"] = s.horizon;
  json b;
  if (s.bounds.state_lo.size() > 0) b["state_lo"] = vector_to_json(s.bounds.state_lo);
  if (s.bounds.state_hi.size() > 0) b["state_hi"] = vector_to_json(s.bounds.state_hi);
  if (s.bounds.input_lo.size() > 0) b["input_lo"] = vector_to_json(s.bounds.input_lo);
  if (s.bounds.input_hi.size() > 0) b["input_hi"] = vector_to_json(s.bounds.input_hi);
  if (!s.bounds.state_rows.empty()) b["state_rows"] = rows_to_json(s.bounds.state_rows);
  if (!s.bounds.input_rows.empty()) b["input_rows"] = rows_to_json(s.bounds.input_rows);
  if (!b.empty()) j["bounds"] = std::move(b);
  json regions = json::array();
  for (const auto& r : s.regions) {
    regions.push_back(json{{"name", r.name},
                           {"rect",
                            {{"xmin", r.rect.xmin},
                             {"xmax", r.rect.xmax},
                             {"ymin", r.rect.ymin},
                             {"ymax", r.rect.ymax}}},
                           {"kind", to_string(r.kind)}});
  }
  j["regions"] = std::move(regions);
  j["template"] = to_string(s.tmpl);
  if (s.tmpl == ScenarioTemplate::Custom) j["formula"] = s.formula_text;
  if (s.quad) {
    j["quad"] = {{"Q", matrix_to_json(s.quad->Q)},
                 {"R", matrix_to_json(s.quad->R)},
                 {"w_q", s.quad->weight}};
  }
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("cannot parse scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

bool operator==(const Scenario& lhs, const Scenario& rhs) {
  if (lhs.name != rhs.name || lhs.horizon != rhs.horizon ||
      lhs.tmpl != rhs.tmpl || lhs.formula_text != rhs.formula_text ||
      lhs.x0_pinned != rhs.x0_pinned) {
    return false;
  }
  if (!same_matrix(lhs.system.A, rhs.system.A) ||
      !same_matrix(lhs.system.B, rhs.system.B) ||
      !same_vector(lhs.x0, rhs.x0)) {
    return false;
  }
  const Bounds& a = lhs.bounds;
  const Bounds& b = rhs.bounds;
  if (!same_vector(a.state_lo, b.state_lo) ||
      !same_vector(a.state_hi, b.state_hi) ||
      !same_vector(a.input_lo, b.input_lo) ||
      !same_vector(a.input_hi, b.input_hi) ||
      a.state_rows.size() != b.state_rows.size() ||
      a.input_rows.size() != b.input_rows.size()) {
    return false;
  }
  for (size_t i = 0; i < a.state_rows.size(); ++i) {
    if (!same_vector(a.state_rows[i].a, b.state_rows[i].a) ||
        a.state_rows[i].b != b.state_rows[i].b) {
      return false;
    }
  }
  for (size_t i = 0; i < a.input_rows.size(); ++i) {
    if (!same_vector(a.input_rows[i].a, b.input_rows[i].a) ||
        a.input_rows[i].b != b.input_rows[i].b) {
      return false;
    }
  }
  if (lhs.regions.size() != rhs.regions.size()) return false;
  for (size_t i = 0; i < lhs.regions.size(); ++i) {
    const Region& rl = lhs.regions[i];
    const Region& rr = rhs.regions[i];
    if (rl.name != rr.name || rl.kind != rr.kind ||
        rl.rect.xmin != rr.rect.xmin || rl.rect.xmax != rr.rect.xmax ||
        rl.rect.ymin != rr.rect.ymin || rl.rect.ymax != rr.rect.ymax) {
      return false;
    }
  }
  if (lhs.quad.has_value() != rhs.quad.has_value()) return false;
  if (lhs.quad) {
    if (!same_matrix(lhs.quad->Q, rhs.quad->Q) ||
        !same_matrix(lhs.quad->R, rhs.quad->R) ||
        lhs.quad->weight != rhs.quad->weight) {
      return false;
    }
  }
  return true;
}

}  // namespace stlccp
