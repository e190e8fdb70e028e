#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 success (or condition satisfied for `check`), 2 condition
// not satisfied, 1 any error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trdist/trdist.hpp"

namespace trdist::cli {

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool color = false;

  std::string tag(bool ok) const {
    if (!color) return ok ? "PASS" : "FAIL";
    return ok ? "\x1b[32mPASS\x1b[0m" : "\x1b[31mFAIL\x1b[0m";
  }
};

inline std::string format_vector(std::span<const double> v, int precision = 12) {
  std::ostringstream s;
  s << std::setprecision(precision) << '(';
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  s << ')';
  return s.str();
}

inline nlohmann::json report_json(const ConditionReport& r, std::string_view theorem) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& c : r.per_coord) {
    coords.push_back({{"i", c.index},
                      {"G", c.G},
                      {"H", c.H},
                      {"kappa_defined", c.kappa_defined},
                      {"kappa", c.kappa},
                      {"kappa1", c.kappa1},
                      {"kappa2", c.kappa2},
                      {"branch", std::string(to_string(c.branch))},
                      {"min_epsilon", c.min_epsilon},
                      {"satisfied", c.satisfied}});
  }
  return {{"theorem", std::string(theorem)},
          {"epsilon", r.epsilon},
          {"theorem_satisfied", r.theorem_satisfied},
          {"min_epsilon", r.min_epsilon},
          {"observed_ratio", r.observed_ratio},
          {"per_coord", coords}};
}

inline void print_report(const Console& con, const ConditionReport& r, std::string_view theorem) {
  auto& o = con.out;
  o << std::setprecision(12);
  o << "condition (" << theorem << ") at epsilon = " << r.epsilon << "\n";
  for (const auto& c : r.per_coord) {
    o << "  [" << c.index << "] G = " << c.G << ", H = " << c.H;
    if (c.kappa_defined) {
      o << ", kappa = " << c.kappa;
    } else {
      o << ", kappa undefined";
    }
    o << ", kappa1 = " << c.kappa1 << ", kappa2 = " << c.kappa2 << ", branch " << to_string(c.branch)
      << ", min eps = " << c.min_epsilon << " -> " << con.tag(c.satisfied) << "\n";
  }
  o << "  satisfied: " << (r.theorem_satisfied ? "yes" : "no") << "\n";
  o << "  min epsilon: " << r.min_epsilon << "\n";
  o << "  observed ratio ||x2_t - x2|| / ||x1_t - x1||: " << r.observed_ratio << "\n";
}

inline int run_check(const Console& con, const std::string& path) {
  const ProblemFile p = parse_problem(path);
  const auto f = p.f();
  const auto q = p.q();
  const auto sched = p.schedule();
  const TwoStepTrace trace = run_two_steps(f, q, p.x0, sched);
  const bool one_d = p.dim == 1;
  const ConditionReport r = one_d ? check_theorem1(f, q, sched, trace, p.epsilon)
                                  : check_theorem2(f, q, sched, trace, p.epsilon);
  const std::string_view theorem = one_d ? "theorem1" : "theorem2";
  print_report(con, r, theorem);
  auto j = report_json(r, theorem);
  j["trace"] = {{"x0", trace.x0}, {"x1", trace.x1}, {"x1_t", trace.x1_t}, {"x2", trace.x2},
                {"x2_t", trace.x2_t}, {"delta1", trace.delta1}, {"delta1_t", trace.delta1_t},
                {"delta2", trace.delta2}, {"delta2_t", trace.delta2_t}};
  con.out << j.dump() << "\n";
  return r.theorem_satisfied ? 0 : 2;
}

inline int run_kappa(const Console& con, const std::string& path) {
  const ProblemFile p = parse_problem(path);
  const TwoStepTrace trace = run_two_steps(p.f(), p.q(), p.x0, p.schedule());
  const KappaDiag k = compute_kappa(trace);
  con.out << "kappa = " << format_vector(k.values) << "\n";
  con.out << "defined = (";
  for (std::size_t i = 0; i < k.defined_mask.size(); ++i) con.out << (i ? ", " : "") << (k.defined_mask[i] ? "true" : "false");
  con.out << ")\n";
  nlohmann::json j = {{"kappa", k.values}, {"defined_mask", std::vector<bool>(k.defined_mask)}};
  con.out << j.dump() << "\n";
  return 0;
}

inline int run_trs(const Console& con, const std::string& path, double radius, const std::string& model) {
  const ProblemFile p = parse_problem(path);
  const DiagQuadratic q = model == "f" ? p.f() : p.q();
  const TrsSolution s = solve_trs(q, p.x0, radius);
  con.out << std::setprecision(15);
  con.out << "step = " << format_vector(s.step, 15) << "\n";
  con.out << "multiplier = " << s.multiplier << "\n";
  con.out << "on_boundary = " << (s.on_boundary ? "true" : "false") << "\n";
  con.out << "hard_case = " << (s.hard_case ? "true" : "false") << "\n";
  con.out << "objective = " << trs_objective(q, p.x0, s) << "\n";
  nlohmann::json j = {{"step", s.step},
                      {"multiplier", s.multiplier},
                      {"on_boundary", s.on_boundary},
                      {"hard_case", s.hard_case},
                      {"objective", trs_objective(q, p.x0, s)}};
  con.out << j.dump() << "\n";
  return 0;
}

struct ProbArgs {
  std::vector<double> m_list{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  std::size_t eps_points = 101;
  std::string method = "grid";
  int cells = 1024;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = SweepOptions{}.seed;
  std::string domain = "whole";
  std::string scenario_path;
  std::string out = "-";
};

inline int run_prob(const Console& con, const ProbArgs& a) {
  const ProbScenario s = a.scenario_path.empty() ? ProbScenario::example2() : parse_scenario(a.scenario_path);
  SweepOptions opt;
  opt.method = a.method == "grid" ? ProbMethod::grid : ProbMethod::monte_carlo;
  opt.cells_per_axis = a.cells;
  opt.samples = a.samples;
  opt.seed = a.seed;
  opt.domain = a.domain == "whole" ? ShiftDomain::whole_rectangle : ShiftDomain::positive_shifts;
  const auto curves = sweep(s, a.m_list, uniform_epsilon_grid(a.eps_points), opt);
  if (a.out == "-") {
    write_csv(curves, con.out);
  } else {
    write_csv(curves, std::filesystem::path(a.out));
    con.err << "wrote " << curves.size() << " curves to " << a.out << "\n";
  }
  return 0;
}

struct Expectation {
  std::string name;
  std::string rational;
  double expected;
  double actual;
};

/// Reproduces the worked 2-D instance and compares every value against its
/// exact rational to 1e-12.
inline int run_verify_example1(const Console& con) {
  constexpr double tol = 1e-12;
  const ProblemFile p = example1_problem();
  const auto f = p.f();
  const auto q = p.q();
  const auto sched = p.schedule();
  const TwoStepTrace t = run_two_steps(f, q, p.x0, sched);
  const KappaDiag k = compute_kappa(t);
  const ConditionReport r = check_theorem2(f, q, sched, t, k, p.epsilon);
  const Vector diff = difference_identity(f, q, t, sched);
  const Vector realized = subtract(t.x2_t, t.x2);
  const double diff_norm = norm2(realized);
  const double gap_norm = distance(t.x1_t, t.x1);
  const double root = std::sqrt(29.0 / 2.0);

  const std::vector<Expectation> checks = {
      {"x1[0]", "10/7", 10.0 / 7.0, t.x1[0]},
      {"x1[1]", "4/3", 4.0 / 3.0, t.x1[1]},
      {"x1_t[0]", "3/2", 1.5, t.x1_t[0]},
      {"x1_t[1]", "3/2", 1.5, t.x1_t[1]},
      {"kappa[0]", "6", 6.0, k.values[0]},
      {"kappa[1]", "2", 2.0, k.values[1]},
      {"kappa1[0]", "5", 5.0, r.per_coord[0].kappa1},
      {"kappa1[1]", "5/3", 5.0 / 3.0, r.per_coord[1].kappa1},
      {"kappa2[0]", "9", 9.0, r.per_coord[0].kappa2},
      {"kappa2[1]", "3", 3.0, r.per_coord[1].kappa2},
      {"identity (x2_t - x2)[0]", "1/56", 1.0 / 56.0, diff[0]},
      {"identity (x2_t - x2)[1]", "1/24", 1.0 / 24.0, diff[1]},
      {"iterates (x2_t - x2)[0]", "1/56", 1.0 / 56.0, realized[0]},
      {"iterates (x2_t - x2)[1]", "1/24", 1.0 / 24.0, realized[1]},
      {"||x2_t - x2||", "sqrt(29/2)/84", root / 84.0, diff_norm},
      {"||x1_t - x1||", "sqrt(29/2)/21", root / 21.0, gap_norm},
      {"G[0] omega1", "12", 12.0, r.per_coord[0].G * sched.omega1},
      {"H[0] omega1_t", "9", 9.0, r.per_coord[0].H * sched.omega1_t},
      {"G[1] omega1", "12", 12.0, r.per_coord[1].G * sched.omega1},
      {"H[1] omega1_t", "6", 6.0, r.per_coord[1].H * sched.omega1_t},
  };

  bool ok = true;
  con.out << std::setprecision(17);
  for (const auto& c : checks) {
    const double err = std::abs(c.actual - c.expected);
    const bool pass = err <= tol;
    ok = ok && pass;
    con.out << con.tag(pass) << "  " << c.name << ": expected " << c.rational << " = " << c.expected
            << ", actual " << c.actual << ", |err| = " << std::setprecision(3) << err << std::setprecision(17)
            << "\n";
  }
  const bool branches = r.per_coord[0].branch == Branch::eq4 && r.per_coord[1].branch == Branch::eq4;
  const bool contraction = diff_norm <= p.epsilon * gap_norm + tol;
  const bool verdict = r.theorem_satisfied;
  con.out << con.tag(branches) << "  both coordinates take branch Eq4\n";
  con.out << con.tag(verdict) << "  sufficient condition satisfied at epsilon = 1/2\n";
  con.out << con.tag(contraction) << "  ||x2_t - x2|| <= (1/2) ||x1_t - x1||\n";
  ok = ok && branches && contraction && verdict;

  char line[160];
  std::snprintf(line, sizeof line, "‖x̃₂−x₂‖₂ = %.10f, bound = %.10f\n", diff_norm, p.epsilon * gap_norm);
  con.out << line;
  return ok ? 0 : 1;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false) {
  Console con{out, err, color};
  CLI::App app{"Distance contraction between two-step trust-region minimizers of diagonal quadratics", "trdist"};
  app.require_subcommand(1);

  std::string problem_path;
  auto* check = app.add_subcommand("check", "Run both models two steps and test the contraction condition");
  check->add_option("problem", problem_path, "Problem JSON file")->required();

  auto* kappa = app.add_subcommand("kappa", "Print the diagonal kappa of a problem");
  kappa->add_option("problem", problem_path, "Problem JSON file")->required();

  double radius = 0.0;
  std::string model = "f";
  auto* trs = app.add_subcommand("trs", "Solve the trust-region subproblem from x0");
  trs->add_option("problem", problem_path, "Problem JSON file")->required();
  trs->add_option("--radius", radius, "Trust-region radius")->required()->check(CLI::PositiveNumber);
  trs->add_option("--model", model, "Which model to minimize")->check(CLI::IsMember({"f", "q"}));

  ProbArgs pa;
  auto* prob = app.add_subcommand("prob", "Sweep the probability of contraction over epsilon");
  prob->add_option("--m", pa.m_list, "Region scales (comma separated)")->delimiter(',');
  prob->add_option("--eps-points", pa.eps_points, "Number of epsilon grid points on [0, 1]")->check(CLI::Range(2, 1000000));
  prob->add_option("--method", pa.method, "Estimator")->check(CLI::IsMember({"grid", "mc"}));
  prob->add_option("--cells", pa.cells, "Grid cells per axis")->check(CLI::Range(64, 1 << 15));
  prob->add_option("--samples", pa.samples, "Monte Carlo samples")->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 32));
  prob->add_option("--seed", pa.seed, "Monte Carlo seed");
  prob->add_option("--domain", pa.domain, "whole: integrate the predicate over the full rectangle; positive: only positive shifted curvatures")
      ->check(CLI::IsMember({"whole", "positive"}));
  prob->add_option("--scenario", pa.scenario_path, "Scenario JSON overriding the default constants");
  prob->add_option("--out", pa.out, "Output CSV path, - for stdout");

  auto* verify = app.add_subcommand("verify-example1", "Reproduce the worked 2-D example and check every value");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*check) return run_check(con, problem_path);
    if (*kappa) return run_kappa(con, problem_path);
    if (*trs) return run_trs(con, problem_path, radius, model);
    if (*prob) return run_prob(con, pa);
    if (*verify) return run_verify_example1(con);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace trdist::cli
