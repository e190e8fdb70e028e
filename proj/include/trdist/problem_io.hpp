#pragma once

// Problem and scenario files (JSON) and probability curves (CSV).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trdist/error.hpp"
#include "trdist/prob.hpp"
#include "trdist/quadratic.hpp"

namespace trdist {

struct ProblemFile {
  int dim = 0;
  Vector f_hess_diag, f_lin;
  double f_offset = 0.0;
  Vector q_hess_diag, q_lin;
  double q_offset = 0.0;
  Vector x0;
  double omega1 = 0.0, omega1_t = 0.0, omega2 = 0.0, omega2_t = 0.0;
  double epsilon = 0.0;

  DiagQuadratic f() const { return {f_hess_diag, f_lin, f_offset}; }
  DiagQuadratic q() const { return {q_hess_diag, q_lin, q_offset}; }
  DampingSchedule schedule() const { return {omega1, omega1_t, omega2, omega2_t}; }

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

/// Worked two-dimensional instance: f = -1/2 x^T diag(1,2) x + (1/7, 5/3) x,
/// Q = -1/2 ||x||^2, x0 = (1,1), multipliers (3, 3, 4, 5), eps = 1/2.
/// Stored with h = -diag(A).
inline ProblemFile example1_problem() {
  ProblemFile p;
  p.dim = 2;
  p.f_hess_diag = {-1.0, -2.0};
  p.f_lin = {1.0 / 7.0, 5.0 / 3.0};
  p.q_hess_diag = {-1.0, -1.0};
  p.q_lin = {0.0, 0.0};
  p.x0 = {1.0, 1.0};
  p.omega1 = 3.0;
  p.omega1_t = 3.0;
  p.omega2 = 4.0;
  p.omega2_t = 5.0;
  p.epsilon = 0.5;
  return p;
}

namespace detail {

inline const std::set<std::string>& problem_keys() {
  static const std::set<std::string> keys = {
      "dim",    "f_hess_diag", "f_lin",    "f_offset", "q_hess_diag", "q_lin",   "q_offset",
      "x0",     "omega1",      "omega1_t", "omega2",   "omega2_t",    "epsilon"};
  return keys;
}

inline std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline nlohmann::json parse_json_object(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::parse_error, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                            ": malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw Error(ErrorCode::parse_error, source + ": top level must be a JSON object");
  return j;
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& source) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::parse_error, source + ": unknown key '" + key + "'");
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) throw Error(ErrorCode::parse_error, source + ": missing key '" + key + "'");
  }
}

inline double number_field(const nlohmann::json& j, const std::string& key, const std::string& source) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::parse_error, source + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline Vector vector_field(const nlohmann::json& j, const std::string& key, const std::string& source) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorCode::parse_error, source + ": field '" + key + "' must be an array");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw Error(ErrorCode::parse_error,
                  source + ": field '" + key + "[" + std::to_string(i) + "]' must be a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Throws ValidationError naming the first violated invariant.
inline void validate(const ProblemFile& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::validation_error, msg); };
  if (p.dim < 1) fail("dim must be at least 1");
  const auto n = static_cast<std::size_t>(p.dim);
  const std::pair<const char*, const Vector*> vectors[] = {{"f_hess_diag", &p.f_hess_diag},
                                                           {"f_lin", &p.f_lin},
                                                           {"q_hess_diag", &p.q_hess_diag},
                                                           {"q_lin", &p.q_lin},
                                                           {"x0", &p.x0}};
  for (const auto& [name, v] : vectors) {
    if (v->size() != n) fail(std::string(name) + " has length " + std::to_string(v->size()) + ", expected dim = " + std::to_string(n));
    for (double x : *v) {
      if (!std::isfinite(x)) fail(std::string(name) + " has a non-finite entry");
    }
  }
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) fail("epsilon must lie in [0, 1]");
  try {
    check_feasible(p.schedule(), p.f(), p.q());
  } catch (const Error& e) {
    fail(std::string("schedule infeasible: ") + e.what());
  }
}

inline ProblemFile parse_problem_text(const std::string& text, const std::string& source = "<problem>") {
  const auto j = detail::parse_json_object(text, source);
  detail::reject_unknown_keys(j, detail::problem_keys(), source);

  ProblemFile p;
  const auto& dim = j.at("dim");
  if (!dim.is_number_integer()) throw Error(ErrorCode::parse_error, source + ": field 'dim' must be an integer");
  p.dim = dim.get<int>();
  p.f_hess_diag = detail::vector_field(j, "f_hess_diag", source);
  p.f_lin = detail::vector_field(j, "f_lin", source);
  p.f_offset = detail::number_field(j, "f_offset", source);
  p.q_hess_diag = detail::vector_field(j, "q_hess_diag", source);
  p.q_lin = detail::vector_field(j, "q_lin", source);
  p.q_offset = detail::number_field(j, "q_offset", source);
  p.x0 = detail::vector_field(j, "x0", source);
  p.omega1 = detail::number_field(j, "omega1", source);
  p.omega1_t = detail::number_field(j, "omega1_t", source);
  p.omega2 = detail::number_field(j, "omega2", source);
  p.omega2_t = detail::number_field(j, "omega2_t", source);
  p.epsilon = detail::number_field(j, "epsilon", source);
  validate(p);
  return p;
}

inline ProblemFile parse_problem(const std::filesystem::path& path) {
  return parse_problem_text(detail::read_file(path), path.string());
}

inline nlohmann::json to_json(const ProblemFile& p) {
  return {{"dim", p.dim},           {"f_hess_diag", p.f_hess_diag}, {"f_lin", p.f_lin},
          {"f_offset", p.f_offset}, {"q_hess_diag", p.q_hess_diag}, {"q_lin", p.q_lin},
          {"q_offset", p.q_offset}, {"x0", p.x0},                   {"omega1", p.omega1},
          {"omega1_t", p.omega1_t}, {"omega2", p.omega2},           {"omega2_t", p.omega2_t},
          {"epsilon", p.epsilon}};
}

/// Shortest round-trip decimal for every number.
inline std::string serialize_problem(const ProblemFile& p) { return to_json(p).dump(2) + "\n"; }

inline ProbScenario parse_scenario_text(const std::string& text, const std::string& source = "<scenario>") {
  const auto j = detail::parse_json_object(text, source);
  static const std::set<std::string> keys = {"hess_f", "hess_q", "omega1", "omega1_t", "kappa"};
  detail::reject_unknown_keys(j, keys, source);
  ProbScenario s{detail::number_field(j, "hess_f", source), detail::number_field(j, "hess_q", source),
                 detail::number_field(j, "omega1", source), detail::number_field(j, "omega1_t", source),
                 detail::number_field(j, "kappa", source)};
  try {
    validate(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::validation_error, source + ": " + e.what());
  }
  return s;
}

inline ProbScenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(detail::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Header `m,epsilon,prob,stderr,method`, rows ordered by m then eps.
inline void write_csv(const std::vector<ProbCurve>& curves, std::ostream& out) {
  std::vector<const ProbCurve*> order;
  for (const auto& c : curves) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const ProbCurve* a, const ProbCurve* b) { return a->m < b->m; });

  out << "m,epsilon,prob,stderr,method\n";
  for (const ProbCurve* c : order) {
    std::vector<std::size_t> idx(c->epsilons.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c->epsilons[a] < c->epsilons[b]; });
    for (std::size_t i : idx) {
      out << format_g12(c->m) << ',' << format_g12(c->epsilons[i]) << ',' << format_g12(c->probs[i]) << ','
          << format_g12(c->std_errors[i]) << ',' << to_string(c->method) << '\n';
    }
  }
}

inline void write_csv(const std::vector<ProbCurve>& curves, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  write_csv(curves, out);
  out.flush();
  if (!out) throw Error(ErrorCode::io_error, "write to " + path.string() + " failed");
}

}  // namespace trdist
