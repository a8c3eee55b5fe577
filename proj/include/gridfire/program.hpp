#pragma once

#include <array>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gridfire {

enum class VarKind { Continuous, Binary };
enum class RowSense { Eq, Le };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
    int var = -1;
    double coef = 0.0;
};

/// sum(coef * x) + offset
struct LinearExpr {
    std::vector<LinearTerm> terms;
    double offset = 0.0;

    LinearExpr& add(int var, double coef) {
        if (coef != 0.0) terms.push_back({var, coef});
        return *this;
    }
    double eval(const std::vector<double>& x) const;
};

struct VariableInfo {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = -kInf;
    double ub = kInf;
    std::string tag;  // provenance of the bound
};

struct Row {
    LinearExpr expr;
    RowSense sense = RowSense::Le;  // expr (=|<=) rhs
    double rhs = 0.0;
    std::string tag;
    std::string label;
};

/// Membership ||(e_1..e_{k-1})|| <= e_0 over affine expressions e_i.
/// `meta` optionally names the (P, Q, ell, v) variables realizing the
/// branch-flow cone so exactness can be reported per branch.
struct Cone {
    std::vector<LinearExpr> exprs;
    std::string tag;
    std::string label;
    std::array<int, 4> meta{-1, -1, -1, -1};
};

struct ObjectiveTerm {
    int var = -1;
    double coef = 0.0;
    std::string tag;
};

/// Sparse two-stage conic program. Rows, bounds, cones and objective terms
/// all carry a provenance tag; immutable once handed to the solver.
class ConicProgram {
  public:
    int add_variable(const std::string& name, VarKind kind, double lb, double ub,
                     const std::string& tag = "");
    void fix_variable(int var, double value);
    void add_row(LinearExpr expr, RowSense sense, double rhs, const std::string& tag,
                 const std::string& label = "");
    void add_cone(Cone cone);
    void add_objective(int var, double coef, const std::string& tag);
    void add_objective_constant(double value) { objective_constant_ += value; }

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    int num_cones() const { return static_cast<int>(cones_.size()); }
    const std::vector<VariableInfo>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<Cone>& cones() const { return cones_; }
    const std::vector<ObjectiveTerm>& objective() const { return objective_; }
    double objective_constant() const { return objective_constant_; }
    std::vector<int> binary_variables() const;
    int find_variable(const std::string& name) const;  // -1 when absent

    double objective_value(const std::vector<double>& x) const;
    std::set<std::string> provenance_tags() const;

    /// Documented sparse text format for external-solver cross checks.
    std::string dump() const;
    static ConicProgram read_dump(const std::string& text);

    std::string summary() const;

  private:
    std::vector<VariableInfo> vars_;
    std::vector<Row> rows_;
    std::vector<Cone> cones_;
    std::vector<ObjectiveTerm> objective_;
    double objective_constant_ = 0.0;
};

/// Program with some variables pinned; keeps the map back to the original
/// variable indices so solutions can be re-inflated.
struct ReducedProgram {
    ConicProgram program;
    std::vector<int> original_of_reduced;
    std::vector<double> fixed_values;  // indexed by original var, NaN when free
};

ReducedProgram reduce_program(const ConicProgram& program, const std::map<int, double>& fixings);

/// Worst constraint violations of a candidate point, evaluated directly on
/// the program data (independent of any solver internals).
struct ViolationReport {
    double max_bound = 0.0;
    double max_equality = 0.0;
    double max_inequality = 0.0;
    double max_cone = 0.0;
    std::string worst_label;

    double max_any() const { return std::max(std::max(max_bound, max_equality), std::max(max_inequality, max_cone)); }
    bool feasible(double tol) const { return max_any() <= tol; }
};

ViolationReport check_point(const ConicProgram& program, const std::vector<double>& x);

}  // namespace gridfire
