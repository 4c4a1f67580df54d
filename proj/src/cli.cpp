#include "concentra/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "concentra/annulus.hpp"
#include "concentra/bubble.hpp"
#include "concentra/energy.hpp"
#include "concentra/errors.hpp"
#include "concentra/greens.hpp"
#include "concentra/interaction.hpp"
#include "concentra/parallel.hpp"

namespace concentra::cli {

using json = nlohmann::ordered_json;

namespace {

struct Report {
  json inputs = json::object();
  json results = json::object();
  json diagnostics = json::object();
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
  bool predicate = true;
  bool csv_default = false;
};

struct Globals {
  int threads = 0;
  std::string config;
  std::string format = "auto";
  std::string output = "-";
  bool timing = false;
};

json fd_json(const numerics::FiniteDifference& d) {
  return {{"value", d.value}, {"error", d.error}, {"step", d.step}};
}

json point_json(const Point3& p) { return json::array({p[0], p[1], p[2]}); }

Point3 to_point(const std::vector<double>& v, const std::string& name) {
  if (v.size() != 3) throw CLI::ValidationError(name, "expects three comma-separated coordinates");
  return {v[0], v[1], v[2]};
}

Domain make_domain(const std::string& kind, double a) {
  return kind == "ball" ? Domain::unit_ball() : Domain::annulus(a);
}

json domain_json(const std::string& kind, double a) {
  json d = {{"kind", kind}};
  if (kind == "annulus") d["a"] = a;
  return d;
}

void require_ascending(const std::vector<double>& g, const std::string& name) {
  if (g.empty()) throw CLI::ValidationError(name, "grid must be nonempty");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw CLI::ValidationError(name, "grid must be strictly ascending");
}

std::vector<Point3> parse_points(const std::string& text) {
  std::vector<Point3> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::vector<double> c;
    std::stringstream is(item);
    std::string num;
    while (std::getline(is, num, ',')) c.push_back(std::stod(num));
    pts.push_back(to_point(c, "--points"));
  }
  if (pts.empty()) throw CLI::ValidationError("--points", "no points given");
  return pts;
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render_csv(const Report& r) {
  std::string out;
  for (std::size_t i = 0; i < r.header.size(); ++i) out += (i ? "," : "") + r.header[i];
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

struct GreenOpts {
  std::string domain = "annulus";
  double a = 0.5;
  double lambda = 1.0;
  std::vector<double> x{0.75, 0.0, 0.0};
  std::vector<double> y{-0.75, 0.0, 0.0};
  double tol = 1e-13;
  bool d_lambda = false;
};

Report cmd_green(const GreenOpts& o) {
  Report r;
  r.inputs = {{"domain", domain_json(o.domain, o.a)}, {"lambda", o.lambda}, {"x", o.x},
              {"y", o.y},  {"tol", o.tol},  {"d_lambda", o.d_lambda}};
  const Domain d = make_domain(o.domain, o.a);
  const Point3 x = to_point(o.x, "--x"), y = to_point(o.y, "--y");
  const GreenEval g = green(d, o.lambda, x, y, o.tol);
  const GreenEval h = regular_part(d, o.lambda, x, y, o.tol);
  r.results = {{"green", g.value}, {"green_tail_bound", g.tail_bound}, {"regular_part", h.value},
               {"lambda1", lambda1(d)}};
  r.header = {"green", "tail_bound", "regular_part", "order"};
  r.rows.push_back({g.value, g.tail_bound, h.value, g.order});
  r.diagnostics = {{"truncation_order", g.order}};
  if (o.d_lambda) {
    const auto dl = d_lambda_green(d, o.lambda, x, y, 0.0, o.tol);
    r.results["d_lambda_green"] = fd_json(dl);
    r.diagnostics["fd_step"] = dl.step;
  }
  return r;
}

struct RobinOpts {
  std::string domain = "annulus";
  double a = 0.5;
  double lambda = 1.0;
  std::vector<double> x{0.75, 0.0, 0.0};
  std::vector<double> r_grid;
  double tol = 1e-13;
  bool d_lambda = false;
};

Report cmd_robin(const RobinOpts& o) {
  Report r;
  r.inputs = {{"domain", domain_json(o.domain, o.a)}, {"lambda", o.lambda}, {"x", o.x},
              {"r_grid", o.r_grid}, {"tol", o.tol}, {"d_lambda", o.d_lambda}};
  const Domain d = make_domain(o.domain, o.a);
  std::vector<Point3> pts;
  if (o.r_grid.empty()) {
    pts.push_back(to_point(o.x, "--x"));
  } else {
    require_ascending(o.r_grid, "--r-grid");
    for (double t : o.r_grid) pts.push_back({t, 0.0, 0.0});
  }
  std::vector<GreenEval> vals(pts.size());
  std::vector<numerics::FiniteDifference> dl(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    vals[i] = robin(d, o.lambda, pts[i], o.tol);
    if (o.d_lambda) dl[i] = d_lambda_robin(d, o.lambda, pts[i], 0.0, o.tol);
  });
  r.header = {"x", "y", "z", "robin", "tail_bound", "order"};
  if (o.d_lambda) r.header.insert(r.header.end(), {"d_lambda", "d_lambda_error"});
  json rows = json::array();
  int max_order = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<json> row{pts[i][0], pts[i][1], pts[i][2], vals[i].value, vals[i].tail_bound,
                          vals[i].order};
    json item = {{"x", point_json(pts[i])}, {"robin", vals[i].value}, {"tail_bound", vals[i].tail_bound}};
    if (o.d_lambda) {
      row.push_back(dl[i].value);
      row.push_back(dl[i].error);
      item["d_lambda_robin"] = fd_json(dl[i]);
    }
    r.rows.push_back(row);
    rows.push_back(item);
    max_order = std::max(max_order, vals[i].order);
  }
  r.results = {{"lambda1", lambda1(d)}, {"values", rows}};
  r.diagnostics = {{"max_truncation_order", max_order}};
  return r;
}

struct MatrixOpts {
  std::string domain = "annulus";
  double a = 0.5;
  double lambda = 1.0;
  int k = 2;
  double r = 0.75;
  std::string points;
  double tol = 1e-13;
};

Report cmd_matrix(const MatrixOpts& o) {
  Report r;
  r.inputs = {{"domain", domain_json(o.domain, o.a)}, {"lambda", o.lambda}, {"k", o.k},
              {"r", o.r}, {"points", o.points}, {"tol", o.tol}};
  const Domain d = make_domain(o.domain, o.a);
  const bool polygon = o.points.empty();
  const auto pts = polygon ? polygon_points({o.k, o.r, d.inner_radius()}) : parse_points(o.points);
  const auto m = build_matrix(d, o.lambda, pts, o.tol);
  const auto e = eigen(m);
  const int n = m.size();
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) {
      row.push_back(m.m(i, j));
      r.rows.push_back({i, j, m.m(i, j)});
    }
    rows.push_back(row);
  }
  r.header = {"i", "j", "value"};
  const double psd_tol = 10.0 * m.max_tail + 1e-12 * m.m.max_abs();
  json pts_json = json::array();
  for (const auto& p : pts) pts_json.push_back(point_json(p));
  r.results = {{"points", pts_json},
               {"matrix", rows},
               {"psi", psi(m)},
               {"eigenvalues", e.values},
               {"smallest_eigenvector", e.vector(0)},
               {"psd", e.values.front() >= -psd_tol},
               {"psd_tolerance", psd_tol}};
  if (polygon) {
    std::vector<double> first(m.m.data.begin(), m.m.data.begin() + n);
    r.results["circulant_eigenvalues"] = circulant_eigenvalues(first);
  }
  r.diagnostics = {{"max_truncation_order", m.max_order}, {"max_tail_bound", m.max_tail}};
  return r;
}

struct ScanOpts {
  double a = 0.5;
  int k = 2;
  std::vector<double> lambda_grid{0.0};
  std::vector<double> r_grid;
  int n_r = 33;
  double tol = 1e-13;
};

Report cmd_polygon_scan(const ScanOpts& o) {
  Report r;
  r.csv_default = true;
  require_ascending(o.lambda_grid, "--lambda-grid");
  const auto rg = o.r_grid.empty() ? radial_grid(o.a, o.n_r) : o.r_grid;
  require_ascending(rg, "--r-grid");
  r.inputs = {{"a", o.a}, {"k", o.k}, {"lambda_grid", o.lambda_grid}, {"r_grid", rg}, {"tol", o.tol}};
  struct Cell {
    double sigma1, nu_min, psi;
  };
  const std::size_t nr = rg.size();
  std::vector<Cell> cells(o.lambda_grid.size() * nr);
  parallel_for(cells.size(), [&](std::size_t i) {
    const double lam = o.lambda_grid[i / nr], rad = rg[i % nr];
    const auto row = polygon_first_row(o.a, o.k, lam, rad, o.tol);
    const auto nu = circulant_eigenvalues(row);
    double p = 1.0;
    for (double v : nu) p *= v;
    cells[i] = {numerics::compensated_total(row), *std::min_element(nu.begin(), nu.end()), p};
  });
  r.header = {"lambda", "r", "sigma1", "nu_min", "psi"};
  json rows = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double lam = o.lambda_grid[i / nr], rad = rg[i % nr];
    r.rows.push_back({lam, rad, cells[i].sigma1, cells[i].nu_min, cells[i].psi});
    rows.push_back({{"lambda", lam}, {"r", rad}, {"sigma1", cells[i].sigma1},
                    {"nu_min", cells[i].nu_min}, {"psi", cells[i].psi}});
  }
  r.results = {{"lambda1", lambda1(Domain::annulus(o.a))}, {"cells", rows}};
  r.diagnostics = {{"green_tol", o.tol}};
  return r;
}

struct CriticalOpts {
  double a = 0.9;
  int k = 2;
  double rel_tol = 1e-10;
};

Report cmd_find_critical(const CriticalOpts& o) {
  Report r;
  r.inputs = {{"a", o.a}, {"k", o.k}, {"rel_tol", o.rel_tol}};
  const double tol = o.rel_tol * lambda1(Domain::annulus(o.a));
  const CriticalityReport c = criticality_report(o.a, o.k, tol);
  json curve = json::array();
  for (const auto& [eps, mu] : c.mu0_curve) {
    curve.push_back({{"eps", eps}, {"mu0", mu}});
    r.rows.push_back({eps, mu});
  }
  r.header = {"eps", "mu0"};
  r.results = {{"lambda1", c.lambda1},
               {"lambda0", c.lambda0},
               {"r0", c.r0},
               {"sigma1_at_crit", c.sigma1_at_crit},
               {"psi_at_crit", c.psi_at_crit},
               {"eigenvalues_at_crit", c.eigenvalues_at_crit},
               {"d_sigma1_d_lambda", fd_json(c.d_sigma1_d_lambda)},
               {"radial_slope", fd_json(c.radial_slope)},
               {"radial_curvature", fd_json(c.radial_curvature)},
               {"max_d_sigma1_d_lambda_on_grid", c.max_d_sigma1_d_lambda_on_grid},
               {"lambda_star", c.lambda_star},
               {"lambda_star_minus_lambda0", c.lambda_gap},
               {"ordering_resolution", c.lambda_resolution},
               {"near_zero_minima", c.near_zero_minima},
               {"mu0_curve", curve},
               {"checks",
                {{"psi_zero", c.checks.psi_zero},
                 {"psd", c.checks.psd},
                 {"radial_crit", c.checks.radial_crit},
                 {"monotone_lambda", c.checks.monotone_lambda},
                 {"lambda0_below_lambda_star", c.checks.lambda0_below_lambda_star}}}};
  r.diagnostics = {{"lambda_tolerance", tol}, {"check_tolerance", c.tolerance}};
  r.predicate = c.checks.psi_zero && c.checks.psd && c.checks.radial_crit &&
                c.checks.monotone_lambda && c.checks.lambda0_below_lambda_star;
  return r;
}

struct ThresholdOpts {
  int k = 2;
  double tol = 1e-3;
};

Report cmd_threshold(const ThresholdOpts& o) {
  Report r;
  r.inputs = {{"k", o.k}, {"tol", o.tol}};
  const ThresholdResult t = a_threshold(o.k, o.tol);
  json scan = json::array();
  for (const auto& [a, ok] : t.scan) {
    scan.push_back({{"a", a}, {"predicate", ok}});
    r.rows.push_back({a, ok});
  }
  r.header = {"a", "predicate"};
  r.results = {{"threshold", t.threshold}, {"bracket", {t.lo, t.hi}},
               {"predicate_lo", t.predicate_lo}, {"predicate_hi", t.predicate_hi},
               {"scan", scan}};
  if (o.k == 2) r.results["certificate_bound"] = t.certificate_bound;
  r.diagnostics = {{"bracket_width", t.hi - t.lo}};
  return r;
}

struct CertificateOpts {
  double a = 0.5;
};

Report cmd_certificate(const CertificateOpts& o) {
  Report r;
  r.inputs = {{"a", o.a}};
  if (!(o.a > 0.0 && o.a < 1.0)) throw Error(ErrorKind::DomainError, "a must lie in (0, 1)");
  const Certificate c = two_bubble_certificate(o.a);
  r.results = {{"holds", c.holds}, {"margin", c.margin}, {"argmin_t", c.argmin_t},
               {"touch_t", c.touch_t ? json(*c.touch_t) : json(nullptr)}};
  if (c.negative_region)
    r.results["negative_region"] = {c.negative_region->first, c.negative_region->second};
  else
    r.results["negative_region"] = nullptr;
  r.header = {"a", "holds", "margin", "argmin_t"};
  r.rows.push_back({o.a, c.holds, c.margin, c.argmin_t});
  r.diagnostics = {{"method", "closed-form vertex of the quadratic"}};
  r.predicate = c.holds;
  return r;
}

struct ConstantsOpts {
  double tol = 1e-12;
  double max_rel_error = 1e-8;
};

Report cmd_verify_constants(const ConstantsOpts& o) {
  Report r;
  r.inputs = {{"tol", o.tol}, {"max_rel_error", o.max_rel_error}};
  const EnergyConstants c = compute_constants(o.tol);
  const std::pair<const char*, const ConstantPair*> items[] = {
      {"a0", &c.a0}, {"a1", &c.a1}, {"a2", &c.a2}, {"a3", &c.a3}};
  json rows = json::array();
  double worst = 0.0;
  for (const auto& [name, p] : items) {
    rows.push_back({{"name", name},
                    {"closed_form", p->closed_form},
                    {"quadrature", p->quadrature},
                    {"error_estimate", p->error_estimate},
                    {"relative_error", p->relative_error()}});
    r.rows.push_back({name, p->closed_form, p->quadrature, p->error_estimate, p->relative_error()});
    worst = std::max(worst, p->relative_error());
  }
  r.header = {"name", "closed_form", "quadrature", "error_estimate", "relative_error"};
  r.results = {{"constants", rows}, {"max_relative_error", worst}, {"pass", worst <= o.max_rel_error}};
  r.diagnostics = {{"quadrature_tol", o.tol}};
  r.predicate = worst <= o.max_rel_error;
  return r;
}

struct EnergyOpts {
  std::string domain = "annulus";
  double a = 0.9;
  int k = 2;
  std::optional<double> r;
  std::optional<double> lambda;
  double lambda_fraction = 0.9;
  std::vector<double> mu_grid;
  double tol = 1e-10;
  double c1_tol = 0.02;
  double c2_tol = 0.10;
  double min_order = 2.3;
};

std::vector<double> default_mu_grid() {
  std::vector<double> g;
  for (int i = 0; i < 6; ++i) g.push_back(std::pow(10.0, -3.5 + 0.2 * i));
  return g;
}

Report cmd_energy_check(const EnergyOpts& o) {
  Report r;
  const Domain d = make_domain(o.domain, o.a);
  const auto mus = o.mu_grid.empty() ? default_mu_grid() : o.mu_grid;
  require_ascending(mus, "--mu-grid");
  double rad = 0.5, lam = 1.0;
  json crit = nullptr;
  if (o.domain == "annulus" && (!o.r || !o.lambda)) {
    const auto l0 = find_lambda0(o.a, o.k, 1e-10 * lambda1(d));
    rad = l0.r0;
    lam = o.lambda_fraction * l0.lambda0;
    crit = {{"lambda0", l0.lambda0}, {"r0", l0.r0}};
  }
  if (o.r) rad = *o.r;
  if (o.lambda) lam = *o.lambda;
  r.inputs = {{"domain", domain_json(o.domain, o.a)}, {"k", o.k}, {"r", rad}, {"lambda", lam},
              {"lambda_fraction", o.lambda_fraction}, {"mu_grid", mus}, {"tol", o.tol},
              {"c1_tol", o.c1_tol}, {"c2_tol", o.c2_tol}, {"min_order", o.min_order}};
  std::vector<double> desc(mus.rbegin(), mus.rend());
  const auto fit = expansion_fit(d, {o.k, rad, d.inner_radius()}, lam, desc,
                                 EnergyConstants::closed_forms(), o.tol);
  r.header = {"mu", "energy_minus_k_a0", "two_term_prediction", "quadrature_error"};
  json sweep = json::array();
  for (std::size_t i = fit.mu.size(); i-- > 0;) {
    const double m = fit.mu[i];
    const double pred = fit.c1_target * m + fit.c2_target * m * m;
    r.rows.push_back({m, fit.excess[i], pred, fit.quad_error[i]});
    sweep.push_back({{"mu", m}, {"excess", fit.excess[i]}, {"prediction", pred},
                     {"quadrature_error", fit.quad_error[i]}});
  }
  const bool ok = fit.c1_relative_error() <= o.c1_tol && fit.c2_relative_error() <= o.c2_tol &&
                  fit.order >= o.min_order;
  r.results = {{"sigma1", fit.sigma1},
               {"c1", fit.c1},
               {"c1_target", fit.c1_target},
               {"c1_relative_error", fit.c1_relative_error()},
               {"c2", fit.c2},
               {"c2_target", fit.c2_target},
               {"c2_relative_error", fit.c2_relative_error()},
               {"c3", fit.c3},
               {"remainder_order", fit.order},
               {"sweep", sweep},
               {"pass", ok}};
  if (!crit.is_null()) r.results["critical_point"] = crit;
  r.diagnostics = {{"fit_condition", fit.condition},
                   {"max_quadrature_error",
                    *std::max_element(fit.quad_error.begin(), fit.quad_error.end())}};
  r.predicate = ok;
  return r;
}

struct NormOpts {
  std::string mode = "critical";
  double a = 0.9;
  int k = 2;
  std::vector<double> eps_grid{0.01, 0.02, 0.05, 0.1};
  double nu = 0.5;
  int budget = 6000;
  std::string domain = "ball";
  double lambda = 1.0;
  double r = 0.25;
  double min_exponent = 1.6;
  double max_exponent = 1.3;
};

Report cmd_error_norm(const NormOpts& o) {
  Report r;
  require_ascending(o.eps_grid, "--eps-grid");
  const bool critical = o.mode == "critical";
  r.inputs = {{"mode", o.mode}, {"k", o.k}, {"eps_grid", o.eps_grid}, {"nu", o.nu},
              {"budget", o.budget}};
  std::vector<double> mus(o.eps_grid.size());
  std::vector<double> lams(o.eps_grid.size());
  Domain d = Domain::unit_ball();
  std::vector<Point3> centers;
  if (critical) {
    d = Domain::annulus(o.a);
    const auto l0 = find_lambda0(o.a, o.k, 1e-10 * lambda1(d));
    centers = polygon_points({o.k, l0.r0, o.a});
    const auto c = EnergyConstants::closed_forms();
    for (std::size_t i = 0; i < mus.size(); ++i) {
      lams[i] = l0.lambda0 + o.eps_grid[i];
      mus[i] = mu0(o.a, o.k, lams[i], l0.r0, c);
    }
    r.inputs["a"] = o.a;
    r.inputs["min_exponent"] = o.min_exponent;
    r.results["lambda0"] = l0.lambda0;
    r.results["r0"] = l0.r0;
  } else {
    d = make_domain(o.domain, o.a);
    centers = polygon_points({o.k, o.r, d.inner_radius()});
    for (std::size_t i = 0; i < mus.size(); ++i) {
      lams[i] = o.lambda;
      mus[i] = o.eps_grid[i];
    }
    r.inputs["domain"] = domain_json(o.domain, o.a);
    r.inputs["lambda"] = o.lambda;
    r.inputs["r"] = o.r;
    r.inputs["max_exponent"] = o.max_exponent;
  }
  std::vector<NormResult> norms(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const Ansatz A = polygon_ansatz(d, lams[i], centers, mus[i]);
    norms[i] = norm_star_star(A, o.eps_grid[i], o.nu, o.budget);
  }
  std::vector<double> values;
  json sweep = json::array();
  r.header = {"eps", "lambda", "mu", "norm", "argmax_x", "argmax_y", "argmax_z", "samples"};
  for (std::size_t i = 0; i < mus.size(); ++i) {
    values.push_back(norms[i].value);
    const auto& p = norms[i].argmax;
    r.rows.push_back({o.eps_grid[i], lams[i], mus[i], norms[i].value, p[0], p[1], p[2], norms[i].samples});
    sweep.push_back({{"eps", o.eps_grid[i]}, {"lambda", lams[i]}, {"mu", mus[i]},
                     {"norm", norms[i].value}, {"argmax", point_json(p)},
                     {"samples", norms[i].samples}});
  }
  const double exponent = numerics::fit_power_law(o.eps_grid, values).exponent;
  const bool ok = critical ? exponent >= o.min_exponent : exponent <= o.max_exponent;
  r.results["exponent"] = exponent;
  r.results["sweep"] = sweep;
  r.results["pass"] = ok;
  r.diagnostics = {{"sampling", "log shells around each rescaled center plus a product grid"},
                   {"sample_budget", o.budget}};
  r.predicate = ok;
  return r;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Opts>
void add_domain(CLI::App* sub, Opts& o) {
  sub->add_option("--domain", o.domain, "domain kind")->check(CLI::IsMember({"ball", "annulus"}));
  sub->add_option("--a", o.a, "annulus inner radius");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string line;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& input_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Green/Robin functions of -Laplacian - lambda on balls and annuli, interaction "
               "matrices, annulus criticality and multi-bubble energy checks"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads,
                 "worker threads; 0 uses CONCENTRA_THREADS, else the hardware concurrency")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "key=value file; command-line flags take precedence");
  app.add_option("--format", g.format, "report format: auto, json or csv")
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_option("--output", g.output, "report path, - for standard output");
  app.add_flag("--timing", g.timing, "add wall time to diagnostics (reports stop being reproducible)");

  std::function<Report()> action;
  std::string command;

  GreenOpts green_o;
  auto* s = app.add_subcommand("green", "Dirichlet Green function and regular part at (x, y)");
  add_domain(s, green_o);
  s->add_option("--lambda", green_o.lambda, "spectral parameter in [0, lambda1)");
  s->add_option("--x", green_o.x, "first point x,y,z")->delimiter(',');
  s->add_option("--y", green_o.y, "second point x,y,z")->delimiter(',');
  s->add_option("--tol", green_o.tol, "mode series tolerance")->check(CLI::PositiveNumber);
  s->add_flag("--d-lambda", green_o.d_lambda, "also report d/dlambda by Richardson differences");
  s->callback([&] { command = "green"; action = [&] { return cmd_green(green_o); }; });

  RobinOpts robin_o;
  s = app.add_subcommand("robin", "Robin function at a point or along the positive x axis");
  add_domain(s, robin_o);
  s->add_option("--lambda", robin_o.lambda, "spectral parameter in [0, lambda1)");
  s->add_option("--x", robin_o.x, "point x,y,z (ignored when --r-grid is given)")->delimiter(',');
  s->add_option("--r-grid", robin_o.r_grid, "ascending radii on the x axis; empty uses --x")
      ->delimiter(',');
  s->add_option("--tol", robin_o.tol, "mode series tolerance")->check(CLI::PositiveNumber);
  s->add_flag("--d-lambda", robin_o.d_lambda, "also report d/dlambda by Richardson differences");
  s->callback([&] { command = "robin"; action = [&] { return cmd_robin(robin_o); }; });

  MatrixOpts matrix_o;
  s = app.add_subcommand("matrix", "interaction matrix, determinant and spectrum");
  add_domain(s, matrix_o);
  s->add_option("--lambda", matrix_o.lambda, "spectral parameter in [0, lambda1)");
  s->add_option("--k", matrix_o.k, "polygon size")->check(CLI::Range(1, kMaxEigenSize));
  s->add_option("--r", matrix_o.r, "polygon radius");
  s->add_option("--points", matrix_o.points, "explicit points x,y,z;x,y,z;... (overrides the polygon)");
  s->add_option("--tol", matrix_o.tol, "mode series tolerance")->check(CLI::PositiveNumber);
  s->callback([&] { command = "matrix"; action = [&] { return cmd_matrix(matrix_o); }; });

  ScanOpts scan_o;
  s = app.add_subcommand("polygon-scan", "sigma1, smallest eigenvalue and determinant over a (lambda, r) grid");
  s->add_option("--a", scan_o.a, "annulus inner radius");
  s->add_option("--k", scan_o.k, "polygon size")->check(CLI::Range(2, kMaxEigenSize));
  s->add_option("--lambda-grid", scan_o.lambda_grid, "ascending lambda values")->delimiter(',');
  s->add_option("--r-grid", scan_o.r_grid, "ascending radii; empty uses the Chebyshev radial grid")
      ->delimiter(',');
  s->add_option("--n-r", scan_o.n_r, "Chebyshev radial grid size")->check(CLI::Range(3, 4097));
  s->add_option("--tol", scan_o.tol, "mode series tolerance")->check(CLI::PositiveNumber);
  s->callback([&] { command = "polygon-scan"; action = [&] { return cmd_polygon_scan(scan_o); }; });

  CriticalOpts crit_o;
  s = app.add_subcommand("find-critical", "critical lambda0, r0 and the criticality checks");
  s->add_option("--a", crit_o.a, "annulus inner radius");
  s->add_option("--k", crit_o.k, "polygon size")->check(CLI::Range(2, kMaxEigenSize));
  s->add_option("--rel-tol", crit_o.rel_tol, "lambda bisection tolerance relative to lambda1")
      ->check(CLI::PositiveNumber);
  s->callback([&] { command = "find-critical"; action = [&] { return cmd_find_critical(crit_o); }; });

  ThresholdOpts thr_o;
  s = app.add_subcommand("threshold-a", "empirical inner radius above which the polygon pipeline applies");
  s->add_option("--k", thr_o.k, "polygon size")->check(CLI::Range(2, kMaxEigenSize));
  s->add_option("--tol", thr_o.tol, "bisection tolerance in a")->check(CLI::PositiveNumber);
  s->callback([&] { command = "threshold-a"; action = [&] { return cmd_threshold(thr_o); }; });

  CertificateOpts cert_o;
  s = app.add_subcommand("certificate", "two-bubble positivity certificate 4t^2 - (7a+1)t + 4a > 0 on (a, 1)");
  s->add_option("--a", cert_o.a, "annulus inner radius");
  s->callback([&] { command = "certificate"; action = [&] { return cmd_certificate(cert_o); }; });

  ConstantsOpts const_o;
  s = app.add_subcommand("verify-constants", "bubble energy constants by quadrature against closed forms");
  s->add_option("--tol", const_o.tol, "quadrature tolerance")->check(CLI::PositiveNumber);
  s->add_option("--max-rel-error", const_o.max_rel_error, "largest accepted relative error")
      ->check(CLI::PositiveNumber);
  s->callback([&] { command = "verify-constants"; action = [&] { return cmd_verify_constants(const_o); }; });

  EnergyOpts energy_o;
  s = app.add_subcommand("energy-check", "fit of the polygon energy in mu against its two-term expansion");
  add_domain(s, energy_o);
  s->add_option("--k", energy_o.k, "polygon size")->check(CLI::Range(1, kMaxEigenSize));
  s->add_option("--r", energy_o.r, "polygon radius (default: r0 from find-critical on the annulus, 0.5 on the ball)");
  s->add_option("--lambda", energy_o.lambda,
                "spectral parameter (default: lambda-fraction * lambda0 on the annulus, 1 on the ball)");
  s->add_option("--lambda-fraction", energy_o.lambda_fraction, "lambda / lambda0 when --lambda is unset");
  s->add_option("--mu-grid", energy_o.mu_grid, "ascending mu values (default: 6 points from 10^-3.5 to 10^-2.5)")
      ->delimiter(',');
  s->add_option("--tol", energy_o.tol, "energy quadrature tolerance")->check(CLI::PositiveNumber);
  s->add_option("--c1-tol", energy_o.c1_tol, "accepted relative error of c1")->check(CLI::PositiveNumber);
  s->add_option("--c2-tol", energy_o.c2_tol, "accepted relative error of c2")->check(CLI::PositiveNumber);
  s->add_option("--min-order", energy_o.min_order, "smallest accepted remainder order");
  s->callback([&] { command = "energy-check"; action = [&] { return cmd_energy_check(energy_o); }; });

  NormOpts norm_o;
  s = app.add_subcommand("error-norm", "weighted sup norm of the ansatz error and its eps exponent");
  s->add_option("--mode", norm_o.mode, "critical: annulus polygon at lambda0 + eps with mu = mu0; generic: mu = eps")
      ->check(CLI::IsMember({"critical", "generic"}));
  s->add_option("--a", norm_o.a, "annulus inner radius");
  s->add_option("--k", norm_o.k, "polygon size")->check(CLI::Range(1, kMaxEigenSize));
  s->add_option("--eps-grid", norm_o.eps_grid, "ascending eps values")->delimiter(',');
  s->add_option("--nu", norm_o.nu, "weight exponent offset")->check(CLI::Range(0.0, 1.0));
  s->add_option("--budget", norm_o.budget, "sample budget per norm")->check(CLI::Range(100, 10000000));
  s->add_option("--domain", norm_o.domain, "generic mode domain")->check(CLI::IsMember({"ball", "annulus"}));
  s->add_option("--lambda", norm_o.lambda, "generic mode spectral parameter");
  s->add_option("--r", norm_o.r, "generic mode polygon radius");
  s->add_option("--min-exponent", norm_o.min_exponent, "critical mode: smallest accepted exponent");
  s->add_option("--max-exponent", norm_o.max_exponent, "generic mode: largest accepted exponent");
  s->callback([&] { command = "error-norm"; action = [&] { return cmd_error_norm(norm_o); }; });

  std::vector<std::string> args = input_args;
  try {
    if (const auto path = find_config(args)) {
      for (const auto& [key, value] : parse_config(read_file(*path)))
        if (key != "config" && !has_flag(args, key)) {
          args.push_back("--" + key);
          args.push_back(value);
        }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (g.threads > 0) set_thread_count(g.threads);
  Report report;
  const auto start = std::chrono::steady_clock::now();
  try {
    report = action();
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string format = g.format;
  if (format == "auto") format = report.csv_default ? "csv" : "json";
  std::string text;
  if (format == "csv") {
    text = render_csv(report);
  } else {
    json inputs = report.inputs;
    inputs["command"] = command;
    inputs["threads"] = thread_count();
    inputs["config"] = g.config;
    json diag = report.diagnostics;
    if (g.timing) diag["wall_time_s"] = wall;
    json doc = {{"schema_version", "1"},
                {"command", command},
                {"inputs", inputs},
                {"results", report.results},
                {"diagnostics", diag}};
    text = doc.dump(2) + "\n";
  }
  if (g.output == "-") {
    out << text;
  } else {
    std::ofstream f(g.output);
    if (!f) {
      err << "error: cannot write " << g.output << "\n";
      return kExitUsage;
    }
    f << text;
  }
  return report.predicate ? kExitOk : kExitPredicateFalse;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace concentra::cli
