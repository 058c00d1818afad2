#pragma once

// Epsilon-accurate MILP encoding of sparse PCA and its per-coordinate
// decomposition, plus LP-format serialization, a text parser for round-trip
// checks, an assignment checker, and closed-form witness construction.
//
// The model maximizes w subject to
//   x = delta_i1 + delta_i2,  |delta_i1| <= z_i,  |delta_i2| <= 1 - z_i
//   x = sum_j sigma_j,        |sigma_j| <= y_j,   sigma_jj = y_j, sum_j y_j = 1
//   x = mu_l1 + mu_l2,        |mu_l1| <= alpha_l, |mu_l2| <= 1 - alpha_l
//   w = w_U - (w_U - w_L) * sum_l 2^-l alpha_l
//   | sum_i c_i c_i^T delta_i1 - w_U x + (w_U - w_L) sum_l 2^-l mu_l1 | <= eps
//   sum_i z_i = k
// with every infinity-norm row expanded into +/- linear pairs. The
// per-coordinate variant fixes x_j = 1, drops y and sigma, and may be
// infeasible for a poor choice of j — a legal outcome.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sparse_spectra/problem.hpp"
#include "sparse_spectra/spectral.hpp"

namespace sparse_spectra {

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct LinearTerm {
  std::size_t var = 0;  // index into MilpModel::variables
  double coef = 0.0;
};

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct MilpObjective {
  bool maximize = true;
  std::vector<LinearTerm> terms;
  double constant = 0.0;
};

struct MilpMeta {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double w_lower = 0.0;
  double w_upper = 0.0;
  double epsilon = 0.0;
  std::optional<std::size_t> fixed_j;  // 0-based coordinate when present
};

struct MilpModel {
  std::vector<MilpVariable> variables;
  std::vector<LinearConstraint> linear_constraints;
  MilpObjective objective;
  MilpMeta meta;

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].name == name) return i;
    throw ValidationError("unknown variable '" + name + "'");
  }
};

using Assignment = std::map<std::string, double>;

namespace detail {

inline std::string var_name(const char* stem, std::size_t a) {
  return std::string(stem) + "_" + std::to_string(a + 1);
}
inline std::string var_name(const char* stem, std::size_t a, std::size_t b) {
  return std::string(stem) + "_" + std::to_string(a + 1) + "_" + std::to_string(b + 1);
}

inline std::size_t bit_count(double w_lower, double w_upper, double epsilon) {
  const double ratio = (w_upper - w_lower) / epsilon;
  if (ratio <= 1.0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log2(ratio)));
}

struct MilpBuilder {
  MilpModel model;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t add_var(std::string name, VarKind kind, double lo, double hi) {
    const std::size_t id = model.variables.size();
    index.emplace(name, id);
    model.variables.push_back({std::move(name), kind, lo, hi});
    return id;
  }

  void add_row(std::string name, std::vector<LinearTerm> terms, Sense sense,
               double rhs) {
    model.linear_constraints.push_back({std::move(name), std::move(terms), sense, rhs});
  }

  // |vec_t| <= bound_var for all t (paired rows), where `flip` encodes the
  // complement form |vec_t| <= 1 - bound_var.
  void add_norm_rows(const std::string& stem, const std::vector<std::size_t>& vec,
                     std::size_t bound_var, bool flip) {
    for (std::size_t t = 0; t < vec.size(); ++t) {
      const double bcoef = flip ? 1.0 : -1.0;
      const double rhs = flip ? 1.0 : 0.0;
      add_row(stem + "_p_" + std::to_string(t + 1),
              {{vec[t], 1.0}, {bound_var, bcoef}}, Sense::le, rhs);
      add_row(stem + "_m_" + std::to_string(t + 1),
              {{vec[t], -1.0}, {bound_var, bcoef}}, Sense::le, rhs);
    }
  }
};

inline MilpModel build_milp_impl(const GramFactor& f, std::size_t k, double epsilon,
                                 double w_lower, double w_upper,
                                 std::optional<std::size_t> fixed_j) {
  if (!(w_lower < w_upper)) throw ValidationError("build_milp requires w_L < w_U");
  if (!(epsilon > 0.0)) throw ValidationError("build_milp requires epsilon > 0");
  if (k < 1 || k > f.n) throw ValidationError("build_milp requires 1 <= k <= n");
  if (fixed_j && *fixed_j >= f.d) throw ValidationError("fixed j out of range");
  const std::size_t n = f.n, d = f.d;
  const std::size_t m = bit_count(w_lower, w_upper, epsilon);
  const double range = w_upper - w_lower;

  MilpBuilder b;
  b.model.meta = {n, d, m, k, w_lower, w_upper, epsilon, fixed_j};

  const std::size_t w = b.add_var("w", VarKind::continuous, w_lower, w_upper);
  std::vector<std::size_t> z(n), y, alp(m), x(d);
  for (std::size_t i = 0; i < n; ++i)
    z[i] = b.add_var(var_name("z", i), VarKind::binary, 0.0, 1.0);
  if (!fixed_j) {
    y.resize(d);
    for (std::size_t j = 0; j < d; ++j)
      y[j] = b.add_var(var_name("y", j), VarKind::binary, 0.0, 1.0);
  }
  for (std::size_t l = 0; l < m; ++l)
    alp[l] = b.add_var(var_name("alp", l), VarKind::binary, 0.0, 1.0);
  for (std::size_t t = 0; t < d; ++t) {
    const bool pinned = fixed_j && *fixed_j == t;
    x[t] = b.add_var(var_name("x", t), VarKind::continuous, pinned ? 1.0 : -1.0, 1.0);
  }
  std::vector<std::vector<std::size_t>> del1(n), del2(n), sig, mu1(m), mu2(m);
  for (std::size_t i = 0; i < n; ++i) {
    del1[i].resize(d);
    del2[i].resize(d);
    for (std::size_t t = 0; t < d; ++t) {
      del1[i][t] = b.add_var(var_name("del1", i, t), VarKind::continuous, -1.0, 1.0);
      del2[i][t] = b.add_var(var_name("del2", i, t), VarKind::continuous, -1.0, 1.0);
    }
  }
  if (!fixed_j) {
    sig.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      sig[j].resize(d);
      for (std::size_t t = 0; t < d; ++t)
        sig[j][t] = b.add_var(var_name("sig", j, t), VarKind::continuous, -1.0, 1.0);
    }
  }
  for (std::size_t l = 0; l < m; ++l) {
    mu1[l].resize(d);
    mu2[l].resize(d);
    for (std::size_t t = 0; t < d; ++t) {
      mu1[l][t] = b.add_var(var_name("mu1", l, t), VarKind::continuous, -1.0, 1.0);
      mu2[l][t] = b.add_var(var_name("mu2", l, t), VarKind::continuous, -1.0, 1.0);
    }
  }

  b.model.objective.maximize = true;
  b.model.objective.terms = {{w, 1.0}};

  // Cardinality row.
  {
    std::vector<LinearTerm> terms;
    for (std::size_t i = 0; i < n; ++i) terms.push_back({z[i], 1.0});
    b.add_row("card", std::move(terms), Sense::eq, static_cast<double>(k));
  }
  // z-disjunction: x = delta_i1 + delta_i2 with norm bounds.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < d; ++t)
      b.add_row("zsplit_" + std::to_string(i + 1) + "_" + std::to_string(t + 1),
                {{x[t], 1.0}, {del1[i][t], -1.0}, {del2[i][t], -1.0}}, Sense::eq, 0.0);
    b.add_norm_rows("znorm1_" + std::to_string(i + 1), del1[i], z[i], false);
    b.add_norm_rows("znorm2_" + std::to_string(i + 1), del2[i], z[i], true);
  }
  // y-disjunction (full model only).
  if (!fixed_j) {
    for (std::size_t t = 0; t < d; ++t) {
      std::vector<LinearTerm> terms{{x[t], 1.0}};
      for (std::size_t j = 0; j < d; ++j) terms.push_back({sig[j][t], -1.0});
      b.add_row("ysplit_" + std::to_string(t + 1), std::move(terms), Sense::eq, 0.0);
    }
    for (std::size_t j = 0; j < d; ++j) {
      b.add_norm_rows("ynorm_" + std::to_string(j + 1), sig[j], y[j], false);
      b.add_row("ydiag_" + std::to_string(j + 1), {{sig[j][j], 1.0}, {y[j], -1.0}},
                Sense::eq, 0.0);
    }
    std::vector<LinearTerm> terms;
    for (std::size_t j = 0; j < d; ++j) terms.push_back({y[j], 1.0});
    b.add_row("ysum", std::move(terms), Sense::eq, 1.0);
  }
  // alpha-disjunction.
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t t = 0; t < d; ++t)
      b.add_row("asplit_" + std::to_string(l + 1) + "_" + std::to_string(t + 1),
                {{x[t], 1.0}, {mu1[l][t], -1.0}, {mu2[l][t], -1.0}}, Sense::eq, 0.0);
    b.add_norm_rows("anorm1_" + std::to_string(l + 1), mu1[l], alp[l], false);
    b.add_norm_rows("anorm2_" + std::to_string(l + 1), mu2[l], alp[l], true);
  }
  // Binary expansion of w.
  {
    std::vector<LinearTerm> terms{{w, 1.0}};
    for (std::size_t l = 0; l < m; ++l)
      terms.push_back({alp[l], range * std::ldexp(1.0, -static_cast<int>(l + 1))});
    b.add_row("wexp", std::move(terms), Sense::eq, w_upper);
  }
  // Residual band, expanded per coordinate into a +/- pair.
  for (std::size_t t = 0; t < d; ++t) {
    std::vector<LinearTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector& c = f.columns[i];
      if (c[t] == 0.0) continue;
      for (std::size_t s = 0; s < d; ++s) {
        const double coef = c[t] * c[s];
        if (coef != 0.0) terms.push_back({del1[i][s], coef});
      }
    }
    terms.push_back({x[t], -w_upper});
    for (std::size_t l = 0; l < m; ++l)
      terms.push_back({mu1[l][t], range * std::ldexp(1.0, -static_cast<int>(l + 1))});
    auto negated = terms;
    for (auto& term : negated) term.coef = -term.coef;
    b.add_row("band_p_" + std::to_string(t + 1), std::move(terms), Sense::le, epsilon);
    b.add_row("band_m_" + std::to_string(t + 1), std::move(negated), Sense::le, epsilon);
  }
  return std::move(b.model);
}

}  // namespace detail

inline MilpModel build_milp(const GramFactor& f, std::size_t k, double epsilon,
                            double w_lower, double w_upper) {
  return detail::build_milp_impl(f, k, epsilon, w_lower, w_upper, std::nullopt);
}

inline MilpModel build_milp_fixed_j(const GramFactor& f, std::size_t k, double epsilon,
                                    double w_lower, double w_upper, std::size_t j) {
  return detail::build_milp_impl(f, k, epsilon, w_lower, w_upper, j);
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void append_terms(std::string& out, const MilpModel& model,
                         const std::vector<LinearTerm>& terms) {
  for (const LinearTerm& t : terms) {
    const double c = t.coef;
    out += c < 0.0 ? " - " : " + ";
    out += format_double(std::abs(c));
    out += " ";
    out += model.variables[t.var].name;
  }
}

}  // namespace detail

// Deterministic CPLEX-style LP text. All variables appear in Bounds (in
// declaration order) so a parser can rebuild the variable list; model
// metadata rides along in a leading comment.
inline std::string write_lp(const MilpModel& model) {
  std::string out;
  out += "\\ meta n=" + std::to_string(model.meta.n) + " d=" +
         std::to_string(model.meta.d) + " m=" + std::to_string(model.meta.m) + " k=" +
         std::to_string(model.meta.k) + " eps=" + detail::format_double(model.meta.epsilon) +
         " wl=" + detail::format_double(model.meta.w_lower) + " wu=" +
         detail::format_double(model.meta.w_upper);
  if (model.meta.fixed_j) out += " fixedj=" + std::to_string(*model.meta.fixed_j + 1);
  out += "\n";
  out += model.objective.maximize ? "Maximize\n" : "Minimize\n";
  out += " obj:";
  detail::append_terms(out, model, model.objective.terms);
  if (model.objective.constant != 0.0) {
    out += model.objective.constant < 0.0 ? " - " : " + ";
    out += detail::format_double(std::abs(model.objective.constant));
  }
  out += "\nSubject To\n";
  for (const LinearConstraint& row : model.linear_constraints) {
    out += " " + row.name + ":";
    detail::append_terms(out, model, row.terms);
    switch (row.sense) {
      case Sense::le: out += " <= "; break;
      case Sense::eq: out += " = "; break;
      case Sense::ge: out += " >= "; break;
    }
    out += detail::format_double(row.rhs);
    out += "\n";
  }
  out += "Bounds\n";
  for (const MilpVariable& v : model.variables) {
    out += " " + detail::format_double(v.lower) + " <= " + v.name + " <= " +
           detail::format_double(v.upper) + "\n";
  }
  bool any_binary = false;
  for (const MilpVariable& v : model.variables)
    if (v.kind == VarKind::binary) any_binary = true;
  if (any_binary) {
    out += "Binaries\n";
    std::string line = "";
    for (const MilpVariable& v : model.variables)
      if (v.kind == VarKind::binary) line += " " + v.name;
    out += line + "\n";
  }
  out += "End\n";
  return out;
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ValidationError("trailing characters in number: " + s);
    return v;
  } catch (const std::invalid_argument&) {
    throw ValidationError("expected a number, got '" + s + "'");
  }
}

}  // namespace detail

// Parse the canonical output of write_lp back into a model (round-trip).
inline MilpModel parse_lp(const std::string& text) {
  MilpModel model;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> bounds_order;
  enum class Section { none, objective, rows, bounds, binaries, done };
  Section section = Section::none;

  std::istringstream in(text);
  std::string line;
  auto ensure_var = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const std::size_t id = model.variables.size();
    index.emplace(name, id);
    model.variables.push_back({name, VarKind::continuous, 0.0, 0.0});
    return id;
  };
  // name: (+|-) coef var (+|-) coef var ... [sense rhs]
  auto parse_terms = [&](const std::vector<std::string>& toks, std::size_t start,
                         std::vector<LinearTerm>& terms, Sense* sense, double* rhs) {
    std::size_t p = start;
    while (p < toks.size()) {
      if (toks[p] == "<=" || toks[p] == ">=" || toks[p] == "=") {
        if (!sense) throw ValidationError("unexpected sense token in objective");
        *sense = toks[p] == "<=" ? Sense::le : (toks[p] == ">=" ? Sense::ge : Sense::eq);
        if (p + 1 >= toks.size()) throw ValidationError("missing right-hand side");
        *rhs = detail::parse_double(toks[p + 1]);
        return;
      }
      if (p + 1 >= toks.size()) throw ValidationError("dangling token '" + toks[p] + "'");
      const double sign = toks[p] == "-" ? -1.0 : 1.0;
      if (toks[p] != "+" && toks[p] != "-")
        throw ValidationError("expected sign, got '" + toks[p] + "'");
      const double coef = detail::parse_double(toks[p + 1]);
      if (p + 2 < toks.size() && toks[p + 2] != "+" && toks[p + 2] != "-" &&
          toks[p + 2] != "<=" && toks[p + 2] != ">=" && toks[p + 2] != "=") {
        terms.push_back({ensure_var(toks[p + 2]), sign * coef});
        p += 3;
      } else {
        // bare constant in the objective
        model.objective.constant += sign * coef;
        p += 2;
      }
    }
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '\\') {
      // metadata comment
      const auto toks = detail::tokenize(line.substr(1));
      for (const std::string& t : toks) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = t.substr(0, eq), val = t.substr(eq + 1);
        if (key == "n") model.meta.n = std::stoul(val);
        else if (key == "d") model.meta.d = std::stoul(val);
        else if (key == "m") model.meta.m = std::stoul(val);
        else if (key == "k") model.meta.k = std::stoul(val);
        else if (key == "eps") model.meta.epsilon = detail::parse_double(val);
        else if (key == "wl") model.meta.w_lower = detail::parse_double(val);
        else if (key == "wu") model.meta.w_upper = detail::parse_double(val);
        else if (key == "fixedj") model.meta.fixed_j = std::stoul(val) - 1;
      }
      continue;
    }
    const auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "Maximize" || toks[0] == "Minimize") {
      model.objective.maximize = toks[0] == "Maximize";
      section = Section::objective;
      continue;
    }
    if (toks[0] == "Subject" && toks.size() > 1 && toks[1] == "To") {
      section = Section::rows;
      continue;
    }
    if (toks[0] == "Bounds") {
      section = Section::bounds;
      continue;
    }
    if (toks[0] == "Binaries") {
      section = Section::binaries;
      continue;
    }
    if (toks[0] == "End") {
      section = Section::done;
      continue;
    }
    switch (section) {
      case Section::objective: {
        std::size_t start = 0;
        if (!toks.empty() && toks[0].back() == ':') start = 1;
        parse_terms(toks, start, model.objective.terms, nullptr, nullptr);
        break;
      }
      case Section::rows: {
        if (toks[0].back() != ':')
          throw ValidationError("constraint line missing name: " + line);
        LinearConstraint row;
        row.name = toks[0].substr(0, toks[0].size() - 1);
        parse_terms(toks, 1, row.terms, &row.sense, &row.rhs);
        model.linear_constraints.push_back(std::move(row));
        break;
      }
      case Section::bounds: {
        if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=")
          throw ValidationError("bounds line must be 'lo <= name <= hi': " + line);
        const std::size_t id = ensure_var(toks[2]);
        model.variables[id].lower = detail::parse_double(toks[0]);
        model.variables[id].upper = detail::parse_double(toks[4]);
        bounds_order.push_back(id);
        break;
      }
      case Section::binaries: {
        for (const std::string& name : toks) {
          auto it = index.find(name);
          if (it == index.end())
            throw ValidationError("binary declares unknown variable '" + name + "'");
          model.variables[it->second].kind = VarKind::binary;
        }
        break;
      }
      default:
        throw ValidationError("unexpected line outside any section: " + line);
    }
  }
  // Restore declaration order: rows precede Bounds in the format, so the
  // first-mention order above differs from the canonical one; the Bounds
  // section lists every variable in declaration order.
  if (!bounds_order.empty()) {
    if (bounds_order.size() != model.variables.size())
      throw ValidationError("Bounds section must list every variable exactly once");
    std::vector<std::size_t> perm(model.variables.size());
    std::vector<MilpVariable> reordered(model.variables.size());
    for (std::size_t pos = 0; pos < bounds_order.size(); ++pos) {
      perm[bounds_order[pos]] = pos;
      reordered[pos] = model.variables[bounds_order[pos]];
    }
    model.variables = std::move(reordered);
    for (LinearConstraint& row : model.linear_constraints)
      for (LinearTerm& t : row.terms) t.var = perm[t.var];
    for (LinearTerm& t : model.objective.terms) t.var = perm[t.var];
  }
  return model;
}

struct CheckResult {
  bool feasible = true;
  std::vector<std::string> violations;
  double objective = 0.0;
};

// Evaluate an assignment against every bound and row with absolute slack.
inline CheckResult check_point(const MilpModel& model, const Assignment& a,
                               double slack = 1e-7) {
  CheckResult res;
  std::vector<double> value(model.variables.size());
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    const MilpVariable& v = model.variables[i];
    const auto it = a.find(v.name);
    if (it == a.end())
      throw ValidationError("assignment is missing variable '" + v.name + "'");
    value[i] = it->second;
    if (v.kind == VarKind::binary &&
        std::min(std::abs(value[i]), std::abs(value[i] - 1.0)) > 1e-9)
      res.violations.push_back("binary " + v.name + " is not 0/1");
    if (value[i] < v.lower - slack || value[i] > v.upper + slack)
      res.violations.push_back("bounds of " + v.name);
  }
  for (const LinearConstraint& row : model.linear_constraints) {
    double lhs = 0.0;
    for (const LinearTerm& t : row.terms) lhs += t.coef * value[t.var];
    const double diff = lhs - row.rhs;
    const bool bad = (row.sense == Sense::le && diff > slack) ||
                     (row.sense == Sense::ge && diff < -slack) ||
                     (row.sense == Sense::eq && std::abs(diff) > slack);
    if (bad) res.violations.push_back(row.name);
  }
  res.feasible = res.violations.empty();
  res.objective = model.objective.constant;
  for (const LinearTerm& t : model.objective.terms)
    res.objective += t.coef * value[t.var];
  return res;
}

// Closed-form feasible point from a support set, following the construction
// used to prove the model's accuracy: x is the restricted leading eigenvector
// scaled so its largest-magnitude coordinate is +1, products with binaries
// become the split variables, and alpha holds the binary expansion of the
// largest representable w that stays within epsilon of lambda_max(A_SS).
inline Assignment witness_from_support(const GramFactor& f, const Selection& sel,
                                       double epsilon, double w_lower, double w_upper,
                                       std::optional<std::size_t> fixed_j = std::nullopt,
                                       double eig_tol = kDefaultEigTol) {
  sel.validate_for(f.n);
  if (!(w_lower < w_upper)) throw ValidationError("witness requires w_L < w_U");
  const std::size_t n = f.n, d = f.d;
  const std::size_t m = detail::bit_count(w_lower, w_upper, epsilon);
  const double range = w_upper - w_lower;

  Matrix acc(d, d);
  for (std::size_t i : sel.support) {
    const Vector& c = f.columns[i];
    for (std::size_t a = 0; a < d; ++a) {
      if (c[a] == 0.0) continue;
      for (std::size_t bcol = 0; bcol < d; ++bcol) acc(a, bcol) += c[a] * c[bcol];
    }
  }
  const EigenPair top = detail::power_iteration(acc, nullptr, eig_tol);
  const double lambda = top.value;
  if (lambda < w_lower - 1e-9 || lambda > w_upper + 1e-9)
    throw ValidationError("support value lies outside [w_L, w_U]; bounds too tight");

  std::size_t j = 0;
  if (fixed_j) {
    j = *fixed_j;
    if (j >= d) throw ValidationError("fixed j out of range");
  } else {
    for (std::size_t t = 1; t < d; ++t)
      if (std::abs(top.vector[t]) > std::abs(top.vector[j])) j = t;
  }
  if (std::abs(top.vector[j]) <= 1e-12)
    throw ValidationError("eigenvector vanishes at the pinned coordinate");
  Vector x(d);
  for (std::size_t t = 0; t < d; ++t) x[t] = top.vector[t] / top.vector[j];

  // Largest representable w <= lambda + epsilon (steps of range / 2^m).
  std::uint64_t levels = std::uint64_t{1} << m;
  const double h = range / static_cast<double>(levels);
  double steps_real = std::ceil((w_upper - lambda - epsilon) / h);
  if (steps_real < 0.0) steps_real = 0.0;
  std::uint64_t steps = static_cast<std::uint64_t>(steps_real);
  if (steps > levels - 1) steps = levels - 1;
  const double w_val = w_upper - h * static_cast<double>(steps);

  Assignment a;
  a["w"] = w_val;
  std::vector<char> in_sel(n, 0);
  for (std::size_t i : sel.support) in_sel[i] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    a[detail::var_name("z", i)] = in_sel[i] ? 1.0 : 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      a[detail::var_name("del1", i, t)] = in_sel[i] ? x[t] : 0.0;
      a[detail::var_name("del2", i, t)] = in_sel[i] ? 0.0 : x[t];
    }
  }
  if (!fixed_j) {
    for (std::size_t jj = 0; jj < d; ++jj) {
      a[detail::var_name("y", jj)] = jj == j ? 1.0 : 0.0;
      for (std::size_t t = 0; t < d; ++t)
        a[detail::var_name("sig", jj, t)] = jj == j ? x[t] : 0.0;
    }
  }
  for (std::size_t t = 0; t < d; ++t) a[detail::var_name("x", t)] = x[t];
  for (std::size_t l = 0; l < m; ++l) {
    const bool bit = (steps >> (m - 1 - l)) & 1u;
    a[detail::var_name("alp", l)] = bit ? 1.0 : 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      a[detail::var_name("mu1", l, t)] = bit ? x[t] : 0.0;
      a[detail::var_name("mu2", l, t)] = bit ? 0.0 : x[t];
    }
  }
  return a;
}

// Solution files: `name value` per line; '#' or '\' comments ignored.
inline Assignment read_solution(const std::string& text) {
  Assignment a;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == '\\') continue;
    const auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw ValidationError("solution line must be 'name value': " + line);
    a[toks[0]] = detail::parse_double(toks[1]);
  }
  return a;
}

}  // namespace sparse_spectra
