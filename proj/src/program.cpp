#include "gridfire/program.hpp"

#include <cmath>
#include <sstream>

#include "gridfire/errors.hpp"

namespace gridfire {

double LinearExpr::eval(const std::vector<double>& x) const {
    double v = offset;
    for (const auto& t : terms) v += t.coef * x[static_cast<size_t>(t.var)];
    return v;
}

int ConicProgram::add_variable(const std::string& name, VarKind kind, double lb, double ub,
                               const std::string& tag) {
    if (lb > ub) throw Error(ErrorCode::InvalidParameter, "variable '" + name + "' has lb > ub");
    vars_.push_back({name, kind, lb, ub, tag});
    return static_cast<int>(vars_.size()) - 1;
}

void ConicProgram::fix_variable(int var, double value) {
    auto& v = vars_[static_cast<size_t>(var)];
    v.lb = value;
    v.ub = value;
}

void ConicProgram::add_row(LinearExpr expr, RowSense sense, double rhs, const std::string& tag,
                           const std::string& label) {
    for (const auto& t : expr.terms)
        if (t.var < 0 || t.var >= num_variables())
            throw Error(ErrorCode::InvalidParameter, "row '" + label + "' references unknown variable");
    rows_.push_back({std::move(expr), sense, rhs, tag, label});
}

void ConicProgram::add_cone(Cone cone) {
    if (cone.exprs.size() < 2)
        throw Error(ErrorCode::InvalidParameter, "cone '" + cone.label + "' needs at least 2 expressions");
    for (const auto& e : cone.exprs)
        for (const auto& t : e.terms)
            if (t.var < 0 || t.var >= num_variables())
                throw Error(ErrorCode::InvalidParameter, "cone '" + cone.label + "' references unknown variable");
    cones_.push_back(std::move(cone));
}

void ConicProgram::add_objective(int var, double coef, const std::string& tag) {
    if (coef != 0.0) objective_.push_back({var, coef, tag});
}

std::vector<int> ConicProgram::binary_variables() const {
    std::vector<int> out;
    for (int i = 0; i < num_variables(); ++i)
        if (vars_[static_cast<size_t>(i)].kind == VarKind::Binary) out.push_back(i);
    return out;
}

int ConicProgram::find_variable(const std::string& name) const {
    for (int i = 0; i < num_variables(); ++i)
        if (vars_[static_cast<size_t>(i)].name == name) return i;
    return -1;
}

double ConicProgram::objective_value(const std::vector<double>& x) const {
    double v = objective_constant_;
    for (const auto& t : objective_) v += t.coef * x[static_cast<size_t>(t.var)];
    return v;
}

std::set<std::string> ConicProgram::provenance_tags() const {
    std::set<std::string> tags;
    for (const auto& v : vars_)
        if (!v.tag.empty()) tags.insert(v.tag);
    for (const auto& r : rows_)
        if (!r.tag.empty()) tags.insert(r.tag);
    for (const auto& c : cones_)
        if (!c.tag.empty()) tags.insert(c.tag);
    for (const auto& o : objective_)
        if (!o.tag.empty()) tags.insert(o.tag);
    return tags;
}

ReducedProgram reduce_program(const ConicProgram& src, const std::map<int, double>& fixings) {
    ReducedProgram out;
    const int n = src.num_variables();
    out.fixed_values.assign(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
    std::vector<int> new_index(static_cast<size_t>(n), -1);

    for (int i = 0; i < n; ++i) {
        const auto& v = src.variables()[static_cast<size_t>(i)];
        auto it = fixings.find(i);
        double fixed = std::numeric_limits<double>::quiet_NaN();
        if (it != fixings.end())
            fixed = it->second;
        else if (v.lb == v.ub)
            fixed = v.lb;
        if (std::isnan(fixed)) {
            new_index[static_cast<size_t>(i)] =
                out.program.add_variable(v.name, v.kind, v.lb, v.ub, v.tag);
            out.original_of_reduced.push_back(i);
        } else {
            out.fixed_values[static_cast<size_t>(i)] = fixed;
        }
    }

    auto map_expr = [&](const LinearExpr& e) {
        LinearExpr r;
        r.offset = e.offset;
        for (const auto& t : e.terms) {
            const double fixed = out.fixed_values[static_cast<size_t>(t.var)];
            if (std::isnan(fixed))
                r.add(new_index[static_cast<size_t>(t.var)], t.coef);
            else
                r.offset += t.coef * fixed;
        }
        return r;
    };

    for (const auto& row : src.rows()) {
        LinearExpr e = map_expr(row.expr);
        if (e.terms.empty()) continue;  // fully determined rows checked by the caller's feasibility pass
        out.program.add_row(std::move(e), row.sense, row.rhs, row.tag, row.label);
    }
    for (const auto& cone : src.cones()) {
        Cone c;
        c.tag = cone.tag;
        c.label = cone.label;
        for (const auto& e : cone.exprs) c.exprs.push_back(map_expr(e));
        for (size_t k = 0; k < c.meta.size(); ++k) {
            const int ov = cone.meta[k];
            c.meta[k] = (ov >= 0 && std::isnan(out.fixed_values[static_cast<size_t>(ov)]))
                            ? new_index[static_cast<size_t>(ov)]
                            : -1;
        }
        out.program.add_cone(std::move(c));
    }
    out.program.add_objective_constant(src.objective_constant());
    for (const auto& t : src.objective()) {
        const double fixed = out.fixed_values[static_cast<size_t>(t.var)];
        if (std::isnan(fixed))
            out.program.add_objective(new_index[static_cast<size_t>(t.var)], t.coef, t.tag);
        else
            out.program.add_objective_constant(t.coef * fixed);
    }
    return out;
}

ViolationReport check_point(const ConicProgram& program, const std::vector<double>& x) {
    if (x.size() != static_cast<size_t>(program.num_variables()))
        throw Error(ErrorCode::DimensionMismatch, "point dimension differs from variable count");
    ViolationReport rep;
    double worst = 0.0;
    auto note = [&](double viol, double& slot, const std::string& label) {
        if (viol > slot) slot = viol;
        if (viol > worst) {
            worst = viol;
            rep.worst_label = label;
        }
    };

    for (int i = 0; i < program.num_variables(); ++i) {
        const auto& v = program.variables()[static_cast<size_t>(i)];
        const double xi = x[static_cast<size_t>(i)];
        double viol = 0.0;
        if (std::isfinite(v.lb)) viol = std::max(viol, v.lb - xi);
        if (std::isfinite(v.ub)) viol = std::max(viol, xi - v.ub);
        note(viol, rep.max_bound, "bound " + v.name);
    }
    for (const auto& row : program.rows()) {
        const double lhs = row.expr.eval(x);
        const double viol = row.sense == RowSense::Eq ? std::abs(lhs - row.rhs) : std::max(0.0, lhs - row.rhs);
        note(viol, row.sense == RowSense::Eq ? rep.max_equality : rep.max_inequality, row.label);
    }
    for (const auto& cone : program.cones()) {
        const double head = cone.exprs[0].eval(x);
        double norm2 = 0.0;
        for (size_t k = 1; k < cone.exprs.size(); ++k) {
            const double e = cone.exprs[k].eval(x);
            norm2 += e * e;
        }
        const double viol = std::max(0.0, std::sqrt(norm2) - head);
        note(viol, rep.max_cone, cone.label);
    }
    return rep;
}

namespace {
std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

double parse_bound(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    return std::stod(s);
}

std::string quote(const std::string& s) {
    std::string out;
    for (char c : s) out += (c == ' ' ? '~' : c);
    return out.empty() ? "~" : out;
}

std::string unquote(const std::string& s) {
    if (s == "~") return "";
    std::string out;
    for (char c : s) out += (c == '~' ? ' ' : c);
    return out;
}

void write_expr(std::ostringstream& out, const LinearExpr& e) {
    out << e.terms.size();
    for (const auto& t : e.terms) out << " " << t.var << " " << fmt(t.coef);
    out << " " << fmt(e.offset);
}

LinearExpr read_expr(std::istringstream& in) {
    size_t nnz;
    in >> nnz;
    LinearExpr e;
    for (size_t k = 0; k < nnz; ++k) {
        int var;
        std::string coef;
        in >> var >> coef;
        e.add(var, parse_bound(coef));
    }
    std::string off;
    in >> off;
    e.offset = parse_bound(off);
    return e;
}
}  // namespace

std::string ConicProgram::dump() const {
    std::ostringstream out;
    out.precision(17);
    out << "gridfire-program 1\n";
    out << "vars " << vars_.size() << "\n";
    for (const auto& v : vars_)
        out << "v " << quote(v.name) << " " << (v.kind == VarKind::Binary ? "B" : "C") << " "
            << fmt(v.lb) << " " << fmt(v.ub) << " " << quote(v.tag) << "\n";
    out << "objconst " << fmt(objective_constant_) << "\n";
    out << "obj " << objective_.size() << "\n";
    for (const auto& t : objective_) out << "o " << t.var << " " << fmt(t.coef) << " " << quote(t.tag) << "\n";
    out << "rows " << rows_.size() << "\n";
    for (const auto& r : rows_) {
        std::ostringstream expr;
        write_expr(expr, r.expr);
        out << "r " << (r.sense == RowSense::Eq ? "E" : "L") << " " << fmt(r.rhs) << " "
            << quote(r.tag) << " " << quote(r.label) << " " << expr.str() << "\n";
    }
    out << "cones " << cones_.size() << "\n";
    for (const auto& c : cones_) {
        out << "c " << quote(c.tag) << " " << quote(c.label) << " " << c.exprs.size() << " " << c.meta[0]
            << " " << c.meta[1] << " " << c.meta[2] << " " << c.meta[3] << "\n";
        for (const auto& e : c.exprs) {
            std::ostringstream expr;
            write_expr(expr, e);
            out << "e " << expr.str() << "\n";
        }
    }
    return out.str();
}

ConicProgram ConicProgram::read_dump(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, std::string("dump truncated before ") + what);
        return std::istringstream(line);
    };

    ConicProgram p;
    {
        auto ss = next_line("header");
        std::string magic;
        int version;
        ss >> magic >> version;
        if (magic != "gridfire-program" || version != 1)
            throw Error(ErrorCode::ParseError, "not a gridfire program dump");
    }
    size_t nvars;
    {
        auto ss = next_line("vars");
        std::string kw;
        ss >> kw >> nvars;
    }
    for (size_t i = 0; i < nvars; ++i) {
        auto ss = next_line("variable");
        std::string kw, name, kind, lb, ub, tag;
        ss >> kw >> name >> kind >> lb >> ub >> tag;
        p.add_variable(unquote(name), kind == "B" ? VarKind::Binary : VarKind::Continuous,
                       parse_bound(lb), parse_bound(ub), unquote(tag));
    }
    {
        auto ss = next_line("objconst");
        std::string kw, v;
        ss >> kw >> v;
        p.objective_constant_ = parse_bound(v);
    }
    size_t nobj;
    {
        auto ss = next_line("obj");
        std::string kw;
        ss >> kw >> nobj;
    }
    for (size_t i = 0; i < nobj; ++i) {
        auto ss = next_line("objective term");
        std::string kw, coef, tag;
        int var;
        ss >> kw >> var >> coef >> tag;
        p.add_objective(var, parse_bound(coef), unquote(tag));
    }
    size_t nrows;
    {
        auto ss = next_line("rows");
        std::string kw;
        ss >> kw >> nrows;
    }
    for (size_t i = 0; i < nrows; ++i) {
        auto ss = next_line("row");
        std::string kw, sense, rhs, tag, label;
        ss >> kw >> sense >> rhs >> tag >> label;
        LinearExpr e = read_expr(ss);
        p.add_row(std::move(e), sense == "E" ? RowSense::Eq : RowSense::Le, parse_bound(rhs),
                  unquote(tag), unquote(label));
    }
    size_t ncones;
    {
        auto ss = next_line("cones");
        std::string kw;
        ss >> kw >> ncones;
    }
    for (size_t i = 0; i < ncones; ++i) {
        auto ss = next_line("cone");
        std::string kw, tag, label;
        size_t nexpr;
        Cone c;
        ss >> kw >> tag >> label >> nexpr >> c.meta[0] >> c.meta[1] >> c.meta[2] >> c.meta[3];
        c.tag = unquote(tag);
        c.label = unquote(label);
        for (size_t k = 0; k < nexpr; ++k) {
            auto es = next_line("cone expression");
            std::string ekw;
            es >> ekw;
            c.exprs.push_back(read_expr(es));
        }
        p.add_cone(std::move(c));
    }
    return p;
}

std::string ConicProgram::summary() const {
    size_t nnz = 0;
    for (const auto& r : rows_) nnz += r.expr.terms.size();
    int binaries = static_cast<int>(binary_variables().size());
    std::ostringstream out;
    out << num_variables() << " variables (" << binaries << " binary), " << num_rows()
        << " linear rows (" << nnz << " nonzeros), " << num_cones() << " cones";
    return out.str();
}

}  // namespace gridfire
