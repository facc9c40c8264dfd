#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nblab.h"

using json = nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  nblab_status status;
  double achievable;
  ApiError(nblab_status s, const std::string& what, double a) : std::runtime_error(what), status(s), achievable(a) {}
};

void check(nblab_status s) {
  if (s != NBLAB_OK) throw ApiError(s, nblab_last_error(), nblab_last_error_achievable());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dist = std::unique_ptr<nblab_distribution, Deleter<nblab_distribution, nblab_distribution_free>>;
using Basis = std::unique_ptr<nblab_basis, Deleter<nblab_basis, nblab_basis_free>>;
using Gram = std::unique_ptr<nblab_gram, Deleter<nblab_gram, nblab_gram_free>>;
using Report = std::unique_ptr<nblab_report, Deleter<nblab_report, nblab_report_free>>;
using Grid = std::unique_ptr<nblab_grid, Deleter<nblab_grid, nblab_grid_free>>;

// ---- parameters ------------------------------------------------------------

enum class Kind { integer, real, text, flag, int_list, real_list, text_list };

struct Param {
  std::string name;  // config key; the flag is --name with '_' -> '-'
  Kind kind;
  json def;          // null means unset
  std::string help;
};

std::string flag_of(const std::string& name) {
  std::string f = "--" + name;
  for (auto& c : f)
    if (c == '_') c = '-';
  return f;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

long long to_int(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError(key + ": expected an integer, got '" + s + "'");
  return v;
}

double to_real(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(key + ": expected a number, got '" + s + "'");
}

json from_text(const Param& p, const std::string& s) {
  switch (p.kind) {
    case Kind::integer:
      return to_int(p.name, s);
    case Kind::real:
      return to_real(p.name, s);
    case Kind::text:
      return s;
    case Kind::flag:
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw UsageError(p.name + ": expected true or false");
    case Kind::int_list: {
      json a = json::array();
      for (const auto& x : split(s, ',')) a.push_back(to_int(p.name, x));
      return a;
    }
    case Kind::real_list: {
      json a = json::array();
      for (const auto& x : split(s, ',')) a.push_back(to_real(p.name, x));
      return a;
    }
    case Kind::text_list: {
      json a = json::array();
      for (const auto& x : split(s, ',')) a.push_back(x);
      return a;
    }
  }
  return nullptr;
}

json from_config(const Param& p, const json& v) {
  if (v.is_null()) return v;
  if (v.is_string()) return from_text(p, v.get<std::string>());
  const auto bad = [&] { return UsageError("config key '" + p.name + "' has the wrong type"); };
  switch (p.kind) {
    case Kind::integer:
      if (!v.is_number_integer()) throw bad();
      return v;
    case Kind::real:
      if (!v.is_number()) throw bad();
      return v.get<double>();
    case Kind::flag:
      if (!v.is_boolean()) throw bad();
      return v;
    case Kind::text:
      throw bad();
    case Kind::int_list:
    case Kind::real_list:
    case Kind::text_list: {
      if (!v.is_array()) {
        json a = json::array();
        a.push_back(v);
        return from_config(p, a);
      }
      json a = json::array();
      for (const auto& x : v) {
        if (p.kind == Kind::text_list ? !x.is_string()
                                      : (p.kind == Kind::int_list ? !x.is_number_integer() : !x.is_number()))
          throw bad();
        a.push_back(p.kind == Kind::real_list ? json(x.get<double>()) : x);
      }
      return a;
    }
  }
  return nullptr;
}

// Resolved configuration of one run.
class Config {
 public:
  explicit Config(json values) : v_(std::move(values)) {}
  const json& raw() const { return v_; }
  bool has(const std::string& k) const { return v_.contains(k) && !v_.at(k).is_null(); }
  long long integer(const std::string& k) const { return need(k).get<long long>(); }
  double real(const std::string& k) const { return need(k).get<double>(); }
  std::string text(const std::string& k) const { return need(k).get<std::string>(); }
  bool flag(const std::string& k) const { return need(k).get<bool>(); }
  std::vector<long long> ints(const std::string& k) const { return need(k).get<std::vector<long long>>(); }
  std::vector<double> reals(const std::string& k) const { return need(k).get<std::vector<double>>(); }
  std::vector<std::string> texts(const std::string& k) const { return need(k).get<std::vector<std::string>>(); }
  void set(const std::string& k, json v) { v_[k] = std::move(v); }

 private:
  const json& need(const std::string& k) const {
    if (!has(k)) throw UsageError("missing required option " + flag_of(k));
    return v_.at(k);
  }
  json v_;
};

// ---- reports -----------------------------------------------------------------

struct Table {
  std::vector<std::pair<std::string, json>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  int exit_code = 0;
};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

// JSON has no inf/nan; such values become strings.
json json_cell(const json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return format_number(v.get<double>());
  return v;
}

std::string render(const std::string& command, const Config& cfg, const Table& t, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    json doc;
    doc["tool"] = std::string("nblab ") + nblab_version();
    doc["command"] = command;
    doc["config"] = cfg.raw();
    json meta = json::object();
    for (const auto& [k, v] : t.meta) meta[k] = json_cell(v);
    doc["meta"] = meta;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::object();
      for (std::size_t i = 0; i < r.size(); ++i) row[t.columns[i]] = json_cell(r[i]);
      rows.push_back(row);
    }
    doc["rows"] = rows;
    out << doc.dump(2) << "\n";
    return out.str();
  }
  out << "# tool: nblab " << nblab_version() << "\n";
  out << "# command: " << command << "\n";
  out << "# config: " << cfg.raw().dump() << "\n";
  for (const auto& [k, v] : t.meta) out << "# " << k << ": " << format_cell(v) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_cell(r[i]);
    out << "\n";
  }
  return out.str();
}

// ---- shared helpers ------------------------------------------------------------

Dist parse_dist(const std::string& literal) {
  nblab_distribution* d = nullptr;
  if (nblab_distribution_parse(literal.c_str(), &d) != NBLAB_OK)
    throw UsageError("bad distribution literal '" + literal + "': " + nblab_last_error());
  return Dist(d);
}

std::string dist_string(const nblab_distribution* d) {
  size_t needed = 0;
  check(nblab_distribution_to_string(d, nullptr, 0, &needed));
  std::string s(needed, '\0');
  check(nblab_distribution_to_string(d, s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

int parse_mode(const std::string& m) {
  if (m.empty()) return -1;
  if (m == "deterministic") return NBLAB_MODE_DETERMINISTIC;
  if (m == "gnb") return NBLAB_MODE_GNB;
  if (m == "pnb") return NBLAB_MODE_PNB;
  throw UsageError("unknown mode '" + m + "' (deterministic, gnb, pnb)");
}

bool is_preset(const std::string& p) {
  return p == "bd" || p == "exp-dilated" || p == "gamma-kn" || p == "concentrated";
}

Basis make_preset(const Config& cfg, const std::string& name, int n, int mode) {
  if (!is_preset(name)) throw UsageError("unknown preset '" + name + "' (bd, exp-dilated, gamma-kn, concentrated)");
  nblab_basis* b = nullptr;
  const double scale = cfg.has("scale") ? cfg.real("scale") : 0.0;
  const double vartheta = cfg.has("vartheta") ? cfg.real("vartheta") : 1.0;
  check(nblab_basis_preset(name.c_str(), n, scale, vartheta, mode, &b));
  return Basis(b);
}

void apply_target(const Config& cfg, nblab_basis* b) {
  const auto target = cfg.has("target") ? cfg.text("target") : std::string("chi");
  if (target == "chi") {
    check(nblab_basis_set_target_chi(b));
  } else {
    const auto d = parse_dist(target);
    check(nblab_basis_set_target_survival(b, d.get()));
  }
}

nblab_mode basis_mode(const nblab_basis* b) {
  nblab_mode m;
  check(nblab_basis_get_mode(b, &m));
  return m;
}

const char* mode_name(nblab_mode m) {
  return m == NBLAB_MODE_DETERMINISTIC ? "deterministic" : m == NBLAB_MODE_GNB ? "gnb" : "pnb";
}

double resolved_tol(Config& cfg, nblab_mode mode) {
  if (!cfg.has("tol")) cfg.set("tol", mode == NBLAB_MODE_DETERMINISTIC ? 1e-6 : 1e-9);
  return cfg.real("tol");
}

unsigned threads_of(const Config& cfg) {
  const auto t = cfg.integer("threads");
  if (t < 1 || t > 1024) throw UsageError("--threads must be in [1, 1024]");
  return static_cast<unsigned>(t);
}

std::uint64_t seed_of(const Config& cfg) {
  if (!cfg.has("seed")) throw UsageError("--seed is required for Monte Carlo runs");
  const auto s = cfg.integer("seed");
  if (s < 0) throw UsageError("--seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

int positive_int(const Config& cfg, const std::string& key) {
  const auto v = cfg.integer(key);
  if (v < 1 || v > 1'000'000) throw UsageError(flag_of(key) + " must be a positive integer");
  return static_cast<int>(v);
}

struct Solved {
  double distance_sq, slack, condition;
  size_t dropped;
  int clamped;
  std::vector<double> coeffs;
};

Solved read_report(const nblab_report* r) {
  Solved s{};
  check(nblab_report_distance_sq(r, &s.distance_sq));
  check(nblab_report_slack(r, &s.slack));
  check(nblab_report_condition(r, &s.condition));
  check(nblab_report_dropped_modes(r, &s.dropped));
  check(nblab_report_clamped(r, &s.clamped));
  size_t n = 0;
  check(nblab_report_coeffs(r, nullptr, 0, &n));
  s.coeffs.resize(n);
  check(nblab_report_coeffs(r, s.coeffs.data(), n, &n));
  return s;
}

Solved solve_gram(const nblab_gram* g, double cutoff) {
  nblab_report* r = nullptr;
  check(nblab_solve(g, cutoff, &r));
  return read_report(Report(r).get());
}

Gram assemble(const nblab_basis* b, double tol, unsigned threads) {
  nblab_gram* g = nullptr;
  check(nblab_gram_assemble(b, tol, threads, &g));
  return Gram(g);
}

Gram leading(const nblab_gram* g, size_t n) {
  nblab_gram* out = nullptr;
  check(nblab_gram_leading(g, n, &out));
  return Gram(out);
}

// Presets whose first n elements do not depend on the family size.
bool nested_preset(const std::string& p) { return p == "bd" || p == "exp-dilated"; }

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi >= lo) || points < 1) throw UsageError("bad t grid");
  std::vector<double> t(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i)
    t[static_cast<size_t>(i)] = points == 1 ? lo : lo * std::pow(hi / lo, double(i) / (points - 1));
  return t;
}

std::vector<double> coefficients(const Config& cfg, int n) {
  if (!cfg.has("coeffs")) return {};
  const auto spec = cfg.text("coeffs");
  if (spec.rfind("mobius", 0) == 0) {
    double eps = 0.1;
    if (spec.size() > 6) {
      if (spec[6] != ':') throw UsageError("coefficients: expected mobius or mobius:EPS");
      eps = to_real("coeffs", spec.substr(7));
    }
    std::vector<double> c(static_cast<size_t>(n));
    check(nblab_mobius_coefficients(n, eps, c.data()));
    return c;
  }
  std::vector<double> c;
  for (const auto& x : split(spec, ',')) c.push_back(to_real("coeffs", x));
  if (c.size() != static_cast<size_t>(n))
    throw UsageError("--coeffs has " + std::to_string(c.size()) + " entries for a basis of size " + std::to_string(n));
  return c;
}

// ---- subcommands ---------------------------------------------------------------

Table run_dist(Config& cfg) {
  const auto preset = cfg.text("preset");
  const int n_max = positive_int(cfg, "n_max");
  const unsigned threads = threads_of(cfg);
  const double cutoff = cfg.real("cutoff");
  double c_const = 0;
  check(nblab_burnol_constant(&c_const));

  Table t;
  t.columns = {"n", "d_n_sq", "slack", "dn_sq_times_log_n", "C_over_log_n", "condition", "dropped_modes"};
  Gram full;
  for (int n = 1; n <= n_max; ++n) {
    Gram g;
    if (nested_preset(preset)) {
      if (!full) {
        const auto b = make_preset(cfg, preset, n_max, parse_mode(cfg.text("mode")));
        apply_target(cfg, b.get());
        full = assemble(b.get(), resolved_tol(cfg, basis_mode(b.get())), threads);
        t.meta.emplace_back("mode", mode_name(basis_mode(b.get())));
      }
      g = leading(full.get(), static_cast<size_t>(n));
    } else {
      const auto b = make_preset(cfg, preset, n, parse_mode(cfg.text("mode")));
      apply_target(cfg, b.get());
      if (n == 1) t.meta.emplace_back("mode", mode_name(basis_mode(b.get())));
      g = assemble(b.get(), resolved_tol(cfg, basis_mode(b.get())), threads);
    }
    const auto s = solve_gram(g.get(), cutoff);
    const double logn = std::log(double(n));
    t.rows.push_back({n, s.distance_sq, s.slack, s.distance_sq * logn, n == 1 ? INFINITY : c_const / logn,
                      s.condition, s.dropped});
  }
  t.meta.emplace_back("C", c_const);
  return t;
}

Table run_nu(Config& cfg) {
  const int n = positive_int(cfg, "n");
  const auto eps = cfg.reals("eps");
  if (eps.empty()) throw UsageError("--eps needs at least one value");
  const unsigned threads = threads_of(cfg);
  const double tol = resolved_tol(cfg, NBLAB_MODE_DETERMINISTIC);
  std::vector<double> thetas(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) thetas[static_cast<size_t>(k - 1)] = 1.0 / k;
  nblab_gram* raw = nullptr;
  check(nblab_gram_deterministic(thetas.data(), thetas.size(), tol, threads, &raw));
  const Gram g(raw);

  Table t;
  t.columns = {"n", "eps", "nu", "slack"};
  const bool scan = cfg.flag("scan");
  for (double e : eps)
    for (int m = scan ? 1 : n; m <= n; ++m) {
      double v = 0, s = 0;
      check(nblab_nu_from_gram(g.get(), m, e, &v, &s));
      t.rows.push_back({m, e, v, s});
    }
  return t;
}

Basis basis_from(Config& cfg, nblab_mode mode) {
  Basis b;
  if (cfg.has("basis")) {
    if (cfg.has("preset")) throw UsageError("give either --basis or --preset, not both");
    nblab_basis* raw = nullptr;
    check(nblab_basis_create(mode, &raw));
    b.reset(raw);
    for (const auto& lit : cfg.texts("basis")) {
      const auto d = parse_dist(lit);
      check(nblab_basis_add(b.get(), d.get()));
    }
  } else if (cfg.has("preset")) {
    b = make_preset(cfg, cfg.text("preset"), positive_int(cfg, "n"), mode);
  } else {
    throw UsageError("a basis is required: --basis literals or --preset NAME --n N");
  }
  check(nblab_basis_set_independence(b.get(), cfg.flag("independent") ? 1 : 0));
  apply_target(cfg, b.get());
  return b;
}

Table run_distance(Config& cfg, nblab_mode mode) {
  const auto b = basis_from(cfg, mode);
  const unsigned threads = threads_of(cfg);
  size_t n = 0;
  check(nblab_basis_size(b.get(), &n));
  const auto c = coefficients(cfg, static_cast<int>(n));
  const double tol = resolved_tol(cfg, mode);
  nblab_report* raw = nullptr;
  const double* cp = c.empty() ? nullptr : c.data();
  check(mode == NBLAB_MODE_PNB ? nblab_pnb_distance(b.get(), cp, c.size(), tol, threads, &raw)
                               : nblab_gnb_distance(b.get(), cp, c.size(), tol, threads, &raw));
  const auto s = read_report(Report(raw).get());

  Table t;
  t.meta = {{"distance_sq", s.distance_sq}, {"slack", s.slack},     {"condition", s.condition},
            {"dropped_modes", s.dropped},   {"clamped", s.clamped != 0}, {"coefficients", c.empty() ? "optimal" : "given"}};
  t.columns = {"k", "element", "coeff"};
  for (size_t k = 0; k < n; ++k) {
    nblab_distribution* d = nullptr;
    check(nblab_basis_element(b.get(), k, &d));
    const Dist owned(d);
    t.rows.push_back({k + 1, dist_string(owned.get()), k < s.coeffs.size() ? json(s.coeffs[k]) : json(nullptr)});
  }
  return t;
}

Grid load_grid(const Config& cfg, unsigned threads) {
  const double t_max = cfg.real("T"), step = cfg.real("step"), fine_step = cfg.real("fine_step"),
               fine_until = cfg.real("fine_until");
  nblab_grid* g = nullptr;
  if (cfg.has("grid_cache"))
    check(nblab_grid_cached(cfg.text("grid_cache").c_str(), t_max, step, fine_step, fine_until, threads, &g));
  else
    check(nblab_grid_build(t_max, step, fine_step, fine_until, threads, &g));
  return Grid(g);
}

Table run_crosscheck(Config& cfg) {
  const auto ns = cfg.ints("n");
  if (ns.empty()) throw UsageError("--n needs at least one value");
  const auto preset = cfg.text("preset");
  const unsigned threads = threads_of(cfg);
  const auto grid = load_grid(cfg, threads);
  size_t points = 0;
  double gap = 0, t_max = 0;
  check(nblab_grid_info(grid.get(), &points, &t_max, &gap));

  Table t;
  t.meta = {{"grid_points", points}, {"grid_t_max", t_max}, {"grid_max_method_gap", gap}};
  t.columns = {"n", "time_domain", "mellin", "diff", "tail_bound", "allowed", "pass"};
  bool all = true;
  for (long long n : ns) {
    if (n < 1 || n > 100000) throw UsageError("--n entries must be positive");
    const auto b = make_preset(cfg, preset, static_cast<int>(n), parse_mode(cfg.text("mode")));
    apply_target(cfg, b.get());
    const auto g = assemble(b.get(), resolved_tol(cfg, basis_mode(b.get())), threads);
    const auto s = solve_gram(g.get(), cfg.real("cutoff"));
    double residual = 0, slack = 0, mellin = 0, tail = 0;
    check(nblab_residual(g.get(), s.coeffs.data(), s.coeffs.size(), &residual, &slack));
    check(nblab_plancherel(b.get(), s.coeffs.data(), s.coeffs.size(), grid.get(), &mellin, &tail));
    const double diff = residual - mellin, allowed = cfg.real("allowance") + tail;
    const bool pass = std::abs(diff) <= allowed;
    all = all && pass;
    t.rows.push_back({n, residual, mellin, diff, tail, allowed, pass});
  }
  t.meta.emplace_back("all_pass", all);
  return t;
}

Table run_muntz_check(Config& cfg) {
  const auto d = parse_dist(cfg.text("dist"));
  const auto samples = cfg.integer("samples");
  if (samples < 1) throw UsageError("--samples must be positive");
  const auto seed = seed_of(cfg);
  const auto grid = log_grid(cfg.real("t_min"), cfg.real("t_max"), positive_int(cfg, "points"));
  const size_t nt = grid.size();
  std::vector<double> gap(nt), se(nt), mc(nt), tr(nt);
  check(nblab_identity_gap(d.get(), grid.data(), nt, static_cast<size_t>(samples), seed, threads_of(cfg), gap.data(),
                           se.data(), mc.data(), tr.data()));
  Table t;
  t.columns = {"t", "mc_mean", "transform", "gap", "std_error", "gap_over_stderr"};
  double max_gap = 0, max_ratio = 0;
  bool pass = true;
  for (size_t i = 0; i < nt; ++i) {
    const double ratio = se[i] > 0 ? gap[i] / se[i] : (gap[i] > 0 ? INFINITY : 0.0);
    max_gap = std::max(max_gap, gap[i]);
    max_ratio = std::max(max_ratio, ratio);
    pass = pass && gap[i] <= 4 * se[i];
    t.rows.push_back({grid[i], mc[i], tr[i], gap[i], se[i], ratio});
  }
  t.meta = {{"distribution", dist_string(d.get())}, {"max_gap", max_gap}, {"max_gap_over_stderr", max_ratio},
            {"within_4_stderr", pass}};
  return t;
}

Table run_zeta(Config& cfg) {
  const auto ts = cfg.reals("t");
  if (ts.empty()) throw UsageError("--t needs at least one value");
  const double sigma = cfg.real("sigma");
  Table t;
  t.columns = {"sigma", "t", "re", "im", "abs", "method_gap", "degraded"};
  for (double x : ts) {
    double re = 0, im = 0, gap = 0;
    int degraded = 0;
    check(nblab_zeta(sigma, x, &re, &im, &gap, &degraded));
    t.rows.push_back({sigma, x, re, im, std::hypot(re, im), gap, degraded != 0});
  }
  return t;
}

Table run_hypotheses(Config& cfg) {
  const auto preset = cfg.text("preset");
  const int n = positive_int(cfg, "n");
  const unsigned threads = threads_of(cfg);
  const auto family = make_preset(cfg, preset, n, -1);
  const bool random = preset != "bd";
  Table t;
  t.columns = {"check", "parameter", "value", "error", "flag"};

  double p = 0;
  check(nblab_assumption_p(family.get(), &p));
  t.rows.push_back({"assumption_p", n, p, nullptr, nullptr});

  for (double a : cfg.reals("alphas")) {
    double sup = 0;
    int argmax = 0, violation = 0;
    check(nblab_moment_growth(family.get(), a, &sup, &argmax, &violation));
    t.rows.push_back({"moment_growth", a, sup, argmax, violation != 0});
  }

  // Condition (C) over the coefficient vectors for sizes 1..n.
  std::vector<double> flat;
  std::vector<size_t> lengths;
  const auto source = cfg.text("c_coeffs");
  if (source == "mobius") {
    for (int m = 1; m <= n; ++m) {
      std::vector<double> c(static_cast<size_t>(m));
      check(nblab_mobius_coefficients(m, cfg.real("eps"), c.data()));
      flat.insert(flat.end(), c.begin(), c.end());
      lengths.push_back(c.size());
    }
  } else if (source == "optimal") {
    Gram full;
    for (int m = 1; m <= n; ++m) {
      Gram g;
      if (nested_preset(preset)) {
        if (!full) {
          const auto b = make_preset(cfg, preset, n, random ? NBLAB_MODE_GNB : NBLAB_MODE_DETERMINISTIC);
          full = assemble(b.get(), resolved_tol(cfg, basis_mode(b.get())), threads);
        }
        g = leading(full.get(), static_cast<size_t>(m));
      } else {
        const auto b = make_preset(cfg, preset, m, random ? NBLAB_MODE_GNB : NBLAB_MODE_DETERMINISTIC);
        g = assemble(b.get(), resolved_tol(cfg, basis_mode(b.get())), threads);
      }
      const auto s = solve_gram(g.get(), cfg.real("cutoff"));
      flat.insert(flat.end(), s.coeffs.begin(), s.coeffs.end());
      lengths.push_back(s.coeffs.size());
    }
  } else {
    throw UsageError("--c-coeffs must be mobius or optimal");
  }
  double cval = 0;
  int growing = 0;
  check(nblab_condition_c(flat.data(), lengths.data(), lengths.size(), cfg.real("beta"), &cval, &growing));
  t.rows.push_back({"condition_c", cfg.real("beta"), cval, nullptr, growing != 0});

  Dist target;
  if (cfg.text("target") != "chi") target = parse_dist(cfg.text("target"));
  for (double m : cfg.reals("m_grid")) {
    double v = 0, e = 0;
    check(nblab_t2_check(target.get(), m, &v, &e));
    t.rows.push_back({"t2", m, v, e, nullptr});
    if (preset == "gamma-kn") {
      double tail = 0;
      check(nblab_gamma_kn_tail_term(n, cfg.real("beta"), m, &tail));
      t.rows.push_back({"gamma_kn_tail_term", m, tail, nullptr, nullptr});
    }
  }

  double value = 0, mlog = 0, se = 0;
  const size_t samples = static_cast<size_t>(cfg.integer("samples"));
  check(nblab_suffi_bound(family.get(), samples, random ? seed_of(cfg) : 0, threads, &value, &mlog, &se));
  t.rows.push_back({"suffi_bound", n, value, se, nullptr});
  t.rows.push_back({"mean_abs_log_min", n, mlog, se, nullptr});

  if (cfg.flag("ratio")) {
    const auto b = make_preset(cfg, preset, n, random ? NBLAB_MODE_PNB : NBLAB_MODE_DETERMINISTIC);
    nblab_report* raw = nullptr;
    const double tol = resolved_tol(cfg, basis_mode(b.get()));
    if (random)
      check(nblab_pnb_distance(b.get(), nullptr, 0, tol, threads, &raw));
    else
      check(nblab_solve(assemble(b.get(), tol, threads).get(), cfg.real("cutoff"), &raw));
    const auto s = read_report(Report(raw).get());
    t.rows.push_back({"pnb_distance_sq", n, s.distance_sq, s.slack, nullptr});
    t.rows.push_back({"pnb_over_suffi", n, s.distance_sq / value, nullptr, nullptr});
  }
  return t;
}

Table run_vn(Config& cfg) {
  const int n = positive_int(cfg, "n");
  const auto family = make_preset(cfg, cfg.text("preset"), n, -1);
  const auto grid = log_grid(cfg.real("t_min"), cfg.real("T"), positive_int(cfg, "points"));
  const size_t nt = grid.size();
  std::vector<double> mean(nt), se(nt), bound(nt), bound_mc(nt);
  const auto samples = cfg.integer("samples");
  if (samples < 1) throw UsageError("--samples must be positive");
  check(nblab_vn_profile(family.get(), cfg.real("eps"), grid.data(), nt, static_cast<size_t>(samples), seed_of(cfg),
                         threads_of(cfg), mean.data(), se.data(), bound.data(), bound_mc.data()));
  Table t;
  t.columns = {"t", "mean_vn", "std_error", "bound", "bound_mc"};
  double peak = 0;
  for (size_t i = 0; i < nt; ++i) {
    peak = std::max(peak, mean[i]);
    t.rows.push_back({grid[i], mean[i], se[i], bound[i], bound_mc[i]});
  }
  t.meta = {{"max_mean_vn", peak}};
  return t;
}

// ---- command table ---------------------------------------------------------------

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<Table(Config&)> run;
};

std::vector<Param> common_params(bool monte_carlo) {
  std::vector<Param> p = {
      {"threads", Kind::integer, 1, "worker threads"},
      {"format", Kind::text, "csv", "csv or json"},
      {"output", Kind::text, nullptr, "write the report here instead of stdout"},
  };
  if (monte_carlo) p.push_back({"seed", Kind::integer, nullptr, "random seed (required)"});
  return p;
}

std::vector<Param> basis_params() {
  return {
      {"preset", Kind::text, nullptr, "bd, exp-dilated, gamma-kn or concentrated"},
      {"n", Kind::integer, nullptr, "family size for --preset"},
      {"basis", Kind::text_list, nullptr, "comma-separated distribution literals"},
      {"scale", Kind::real, nullptr, "preset scale parameter"},
      {"vartheta", Kind::real, 1.0, "concentrated family parameter"},
      {"target", Kind::text, "chi", "chi or a distribution literal whose survival function is the target"},
      {"coeffs", Kind::text, nullptr, "fixed coefficients: comma list, mobius or mobius:EPS"},
      {"independent", Kind::flag, true, "declare the family independent"},
      {"tol", Kind::real, nullptr, "quadrature tolerance"},
  };
}

std::vector<Command> commands() {
  std::vector<Command> c;
  c.push_back({"dist",
               "scan of the projection distance for n = 1..n-max",
               {{"preset", Kind::text, "bd", "family"},
                {"n_max", Kind::integer, nullptr, "largest n"},
                {"mode", Kind::text, "", "deterministic, gnb or pnb (default per preset)"},
                {"scale", Kind::real, nullptr, "preset scale parameter"},
                {"vartheta", Kind::real, 1.0, "concentrated family parameter"},
                {"target", Kind::text, "chi", "chi or a distribution literal"},
                {"tol", Kind::real, nullptr, "quadrature tolerance"},
                {"cutoff", Kind::real, 1e-12, "relative eigenvalue cutoff"}},
               run_dist});
  c.push_back({"nu",
               "Mobius-weighted distance nu_{n,eps}",
               {{"n", Kind::integer, nullptr, "number of dilations"},
                {"eps", Kind::real_list, json::array({0.1}), "comma-separated epsilons"},
                {"scan", Kind::flag, false, "report every m = 1..n"},
                {"tol", Kind::real, nullptr, "quadrature tolerance"}},
               run_nu});
  c.push_back({"gnb", "distance of a random family in the mean (gnb) sense", basis_params(),
               [](Config& cfg) { return run_distance(cfg, NBLAB_MODE_GNB); }});
  c.push_back({"pnb", "distance of a random family in the pathwise (pnb) sense", basis_params(),
               [](Config& cfg) { return run_distance(cfg, NBLAB_MODE_PNB); }});
  c.push_back({"crosscheck",
               "time-domain residual against its Mellin-side (Plancherel) value",
               {{"n", Kind::int_list, nullptr, "comma-separated basis sizes"},
                {"T", Kind::real, 5000.0, "height of the critical-line grid"},
                {"step", Kind::real, 0.05, "grid step"},
                {"fine_step", Kind::real, 0.005, "grid step near t = 0"},
                {"fine_until", Kind::real, 2.0, "end of the fine part"},
                {"grid_cache", Kind::text, nullptr, "CSV cache for the zeta grid"},
                {"preset", Kind::text, "bd", "family"},
                {"mode", Kind::text, "", "deterministic or gnb"},
                {"scale", Kind::real, nullptr, "preset scale parameter"},
                {"vartheta", Kind::real, 1.0, "concentrated family parameter"},
                {"target", Kind::text, "chi", "chi or a distribution literal"},
                {"allowance", Kind::real, 1e-2, "allowed gap on top of the tail bound"},
                {"tol", Kind::real, nullptr, "quadrature tolerance"},
                {"cutoff", Kind::real, 1e-12, "relative eigenvalue cutoff"}},
               run_crosscheck});
  c.push_back({"muntz-check",
               "Monte Carlo check of E{X/t} = -Pf(t)",
               {{"dist", Kind::text, nullptr, "distribution literal"},
                {"samples", Kind::integer, 1000000, "Monte Carlo draws"},
                {"t_min", Kind::real, 0.05, "smallest t"},
                {"t_max", Kind::real, 20.0, "largest t"},
                {"points", Kind::integer, 20, "log-spaced grid points"}},
               run_muntz_check});
  c.push_back({"zeta",
               "zeta(sigma + i t)",
               {{"t", Kind::real_list, nullptr, "comma-separated heights"},
                {"sigma", Kind::real, 0.5, "real part"}},
               run_zeta});
  c.push_back({"hypotheses",
               "assumption (P), moment growth, condition (C), (T2) tails and the min-log lower bound",
               {{"preset", Kind::text, nullptr, "family"},
                {"n", Kind::integer, 16, "family size"},
                {"scale", Kind::real, nullptr, "preset scale parameter"},
                {"vartheta", Kind::real, 1.0, "concentrated family parameter"},
                {"alphas", Kind::real_list, json::array({1.0, 2.0, 3.0}), "moment orders (>= 1)"},
                {"beta", Kind::real, 1.5, "weight exponent of condition (C)"},
                {"c_coeffs", Kind::text, "mobius", "coefficients for (C): mobius or optimal"},
                {"eps", Kind::real, 0.1, "epsilon of the Mobius coefficients"},
                {"target", Kind::text, "chi", "target for (T2)"},
                {"m_grid", Kind::real_list, json::array({1.0, 2.0, 4.0, 8.0, 16.0}), "M values for (T2)"},
                {"samples", Kind::integer, 100000, "Monte Carlo draws for the min-log bound"},
                {"ratio", Kind::flag, false, "also report the pnb distance and its ratio to the bound"},
                {"tol", Kind::real, nullptr, "quadrature tolerance"},
                {"cutoff", Kind::real, 1e-12, "relative eigenvalue cutoff"}},
               run_hypotheses});
  c.push_back({"vn",
               "Monte Carlo profile of E V_n(t) on a log grid up to T",
               {{"n", Kind::integer, nullptr, "family size"},
                {"eps", Kind::real, 0.1, "Mobius weight exponent"},
                {"preset", Kind::text, "concentrated", "family"},
                {"scale", Kind::real, nullptr, "preset scale parameter"},
                {"vartheta", Kind::real, 1.0, "concentrated family parameter"},
                {"t_min", Kind::real, 0.1, "smallest t"},
                {"T", Kind::real, 100.0, "largest t"},
                {"points", Kind::integer, 40, "log-spaced grid points"},
                {"samples", Kind::integer, 10000, "Monte Carlo draws"}},
               run_vn});
  const std::vector<std::string> mc = {"muntz-check", "hypotheses", "vn"};
  for (auto& cmd : c) {
    const bool is_mc = std::find(mc.begin(), mc.end(), cmd.name) != mc.end();
    for (auto& p : common_params(is_mc)) cmd.params.push_back(p);
  }
  return c;
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  json norm = json::object();
  for (auto& [k, v] : doc.items()) {
    std::string key = k;
    for (auto& ch : key)
      if (ch == '-') ch = '_';
    norm[key] = v;
  }
  return norm;
}

int run(int argc, char** argv) {
  const auto cmds = commands();
  CLI::App app{"Numerical experiments with dilations of the fractional part"};
  app.set_version_flag("--version", std::string(nblab_version()));
  std::string app_config;
  app.add_option("--config", app_config, "JSON file with the subcommand and its options");
  app.require_subcommand(0, 1);

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, std::string> sub_config;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", sub_config[cmd.name], "JSON file with options");
    for (const auto& p : cmd.params) {
      auto& slot = raw[cmd.name][p.name];
      std::string help = p.help;
      if (!p.def.is_null()) help += " [" + (p.def.is_string() ? p.def.get<std::string>() : p.def.dump()) + "]";
      opts[cmd.name][p.name] = p.kind == Kind::flag ? sub->add_flag(flag_of(p.name), slot, help)
                                                    : sub->add_option(flag_of(p.name), slot, help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  json file;
  std::string config_path = app_config;
  for (const auto& c : cmds)
    if (app.got_subcommand(c.name)) {
      cmd = &c;
      if (!sub_config[c.name].empty()) config_path = sub_config[c.name];
    }
  if (!config_path.empty()) file = read_config(config_path);
  if (file.contains("subcommand")) {
    const auto name = file["subcommand"].get<std::string>();
    if (cmd && cmd->name != name) throw UsageError("config is for '" + name + "', command line asks for " + cmd->name);
    for (const auto& c : cmds)
      if (c.name == name) cmd = &c;
    if (!cmd) throw UsageError("unknown subcommand '" + name + "' in config");
    file.erase("subcommand");
  }
  if (!cmd) {
    std::cerr << app.help();
    return kExitUsage;
  }

  json values = json::object();
  for (const auto& p : cmd->params) values[p.name] = p.def;
  for (auto& [k, v] : file.items()) {
    auto it = std::find_if(cmd->params.begin(), cmd->params.end(), [&](const Param& p) { return p.name == k; });
    if (it == cmd->params.end()) throw UsageError("unknown config key '" + k + "' for " + cmd->name);
    values[k] = from_config(*it, v);
  }
  for (const auto& p : cmd->params)
    if (opts[cmd->name][p.name]->count() > 0) values[p.name] = from_text(p, raw[cmd->name][p.name]);

  Config cfg(values);
  const auto format = cfg.text("format");
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");

  const auto table = cmd->run(cfg);
  const auto text = render(cmd->name, cfg, table, format);
  if (cfg.has("output")) {
    std::ofstream out(cfg.text("output"));
    if (!out || !(out << text)) {
      std::cout << json{{"error", {{"status", "io"}, {"message", "cannot write " + cfg.text("output")}}}}.dump()
                << "\n";
      return kExitNumeric;
    }
  } else {
    std::cout << text;
  }
  return table.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    json err = {{"status", nblab_status_name(e.status)}, {"code", static_cast<int>(e.status)}, {"message", e.what()}};
    if (e.status == NBLAB_ERR_RESOURCE) err["achievable"] = e.achievable;
    std::cout << json{{"error", err}}.dump() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"status", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return kExitNumeric;
  }
}
