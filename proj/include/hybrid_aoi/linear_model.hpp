#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybrid_aoi/model.hpp"

namespace hybrid_aoi {

enum class VarKind { kBinary, kInteger, kContinuous };

// What a model variable stands for. Indices not used by a role are -1.
enum class VarRole {
  kTransmission,  // x[i][j][m][k]
  kRegister,      // s[i][k]
  kSwitch,        // z[i][k] >= |s[i][k] - s[i][k-1]|
  kHold,          // w[i][k] = (device i idle at k) * s[i][k-1]
  kOther,
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBinary;
  double lower = 0.0;
  double upper = 1.0;
  VarRole role = VarRole::kOther;
  int i = -1;
  int j = -1;
  int m = -1;
  int k = -1;
};

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// A minimization model with linear rows and a linear objective plus constant.
class LinearModel {
 public:
  int add_variable(Variable v);
  // Every term must reference a registered variable.
  void add_row(Row row);
  void add_objective_term(int var, double coef);
  void set_objective_constant(double c) { objective_constant_ = c; }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  std::optional<int> find_variable(const std::string& name) const;

  double evaluate_objective(const std::vector<double>& values) const;
  // Names of rows and bounds violated by more than `tolerance`.
  std::vector<std::string> violated_rows(const std::vector<double>& values,
                                         double tolerance = 1e-9) const;

 private:
  std::vector<Variable> variables_;
  std::unordered_map<std::string, int> by_name_;
  std::vector<Row> rows_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
};

// Linearized scheduling model. x variables exist only on demanded slots whose
// link passes the threshold; delay is substituted exactly; the switch term
// uses z >= |s_k - s_{k-1}|; register propagation uses exact product bounds.
// Throws std::invalid_argument for scenarios without messages.
LinearModel build_milp(const Scenario& s, const ObjectiveConfig& cfg);

// Assignment of every model variable induced by schedule x (s, z, w derived).
// Throws std::invalid_argument if x uses a transmission the model eliminated.
std::vector<double> induced_assignment(const LinearModel& model,
                                       const Scenario& s, const Schedule& x);

std::string transmission_variable_name(const Transmission& t);

}  // namespace hybrid_aoi
