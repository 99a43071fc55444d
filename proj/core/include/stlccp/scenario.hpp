#pragma once

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "stlccp/dc_program.hpp"
#include "stlccp/formula.hpp"
#include "stlccp/parser.hpp"
#include "stlccp/system.hpp"

namespace stlccp {

// Axis-aligned rectangle in the position plane.
struct Rect {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

enum class RegionKind { Target, Goal, Obstacle, Key, Door, Passage };

const char* to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& s);

struct Region {
  std::string name;
  Rect rect;
  RegionKind kind = RegionKind::Target;
};

// Membership formulas over a state whose first two coordinates are the
// position.  Inside: all four face margins nonpositive (a conjunction).
// Outside: at least one coordinate past a face (a disjunction of the four
// flipped halfplanes).  Both treat the rectangle boundary as satisfied.
Formula region_inside(const Region& r, int state_dim);
Formula region_outside(const Region& r, int state_dim);

enum class ScenarioTemplate { TwoTarget, NarrowPassage, ManyTarget, DoorPuzzle, Custom };

const char* to_string(ScenarioTemplate t);
ScenarioTemplate template_from_string(const std::string& s);

// A synthesis instance: plant, start state, horizon, workspace bounds,
// named regions, and either a formula template keyed on the region names or
// a custom formula in the text grammar.
struct Scenario {
  std::string name;
  LinearSystem system;
  Eigen::VectorXd x0;
  std::vector<bool> x0_pinned;  // empty = pin every coordinate
  int horizon = 0;
  Bounds bounds;
  std::vector<Region> regions;
  ScenarioTemplate tmpl = ScenarioTemplate::Custom;
  std::string formula_text;  // Custom template only
  std::optional<QuadCost> quad;

  const Region& region(const std::string& name) const;
};

// Instantiates the scenario's template at horizon T:
//   TwoTarget:     F[0,T-5](G[0,5]T1 | G[0,5]T2) & G[0,T]!O & F[0,T]G
//   NarrowPassage: F[0,T](G1 | G2) & G[0,T](!O1 & ... & !O4)
//   ManyTarget:    AND_i (F[0,T]Ti_1 | F[0,T]Ti_2) & G[0,T]!O
//   DoorPuzzle:    AND_i (!Di U[0,T] Ki) & F[0,T]G & G[0,T](!O1 & ... & !O5)
// Region names resolve through region_inside / region_outside.  Custom
// scenarios parse `formula_text` against the same name table.
Formula build_scenario_spec(const Scenario& s,
                            std::optional<int> horizon = std::nullopt);

// Name table exposing every region as inside (bare name) / outside (!name).
SymbolTable scenario_symbols(const Scenario& s);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

bool operator==(const Scenario& lhs, const Scenario& rhs);

}  // namespace stlccp
