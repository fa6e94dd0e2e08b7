// Command line front end: six subcommands over the oscillator laboratory,
// JSON run configuration in, deterministic CSV reports out.
//
// Exit codes: 0 every checked row passed, 2 at least one row failed,
// 1 operational error (bad flags, malformed config, I/O failure).

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tdho/errors.hpp"
#include "tdho/estimates.hpp"
#include "tdho/grid.hpp"
#include "tdho/logging.hpp"
#include "tdho/magnetic.hpp"
#include "tdho/oscillator.hpp"
#include "tdho/potential.hpp"
#include "tdho/propagator.hpp"
#include "tdho/scattering.hpp"
#include "tdho/snapshot.hpp"
#include "tdho/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tdho;

namespace {

// ---------------------------------------------------------------------------
// formatting: shortest round-trip for doubles, fixed everywhere else

std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(int v) { return std::to_string(v); }

std::string fnv8(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(h & 0xffffffffu));
  return buf;
}

// ---------------------------------------------------------------------------
// report rows

struct ReportRow {
  std::string metric;
  double value = 0.0;
  std::optional<double> tolerance;
  bool pass = true;
};

class Report {
 public:
  Report(std::string subcommand, std::string params)
      : sub_(std::move(subcommand)), params_(std::move(params)) {}

  void info(const std::string& metric, double value) {
    rows_.push_back({metric, value, std::nullopt, true});
  }
  /// Checked row: pass iff value <= tolerance.  Every checked metric is a
  /// nonnegative deviation or a one-sided bound, so <= is the whole contract.
  void check(const std::string& metric, double value, double tolerance) {
    rows_.push_back({metric, value, tolerance, value <= tolerance});
  }
  /// Boolean verdict carried as 1/0 with no tolerance column.
  void flag(const std::string& metric, bool ok) {
    rows_.push_back({metric, ok ? 1.0 : 0.0, std::nullopt, ok});
  }

  int failures() const {
    int n = 0;
    for (const auto& r : rows_) n += r.pass ? 0 : 1;
    return n;
  }

  void write(const fs::path& dir) const {
    const fs::path path = dir / "report.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const std::string run_id = sub_ + "-" + fnv8(params_);
    out << "run,subcommand,params,metric,value,tolerance,status\n";
    for (const auto& r : rows_) {
      out << run_id << ',' << sub_ << ',' << params_ << ',' << r.metric << ','
          << fmt(r.value) << ',' << (r.tolerance ? fmt(*r.tolerance) : std::string())
          << ',' << (r.pass ? "pass" : "fail") << '\n';
    }
    if (!out) throw IoError("short write on " + path.string());
    log::info("report: " + path.string() + " (" + std::to_string(rows_.size()) +
              " rows, " + std::to_string(failures()) + " failures)");
  }

 private:
  std::string sub_, params_;
  std::vector<ReportRow> rows_;
};

void write_series(const fs::path& path, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j)
    out << header[j] << (j + 1 < header.size() ? ',' : '\n');
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < columns.size(); ++j)
      out << fmt(columns[j][i]) << (j + 1 < columns.size() ? ',' : '\n');
  if (!out) throw IoError("short write on " + path.string());
}

// ---------------------------------------------------------------------------
// config plumbing: strict key sets, typed getters

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

const json* block(const json& cfg, const char* name) {
  auto it = cfg.find(name);
  if (it == cfg.end()) return nullptr;
  if (!it->is_object()) throw ConfigError(std::string(name) + " must be an object");
  return &*it;
}

double get_num(const json& j, const std::string& where, const char* key,
               double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + "." + key + " must be a number");
  return it->get<double>();
}

int get_int(const json& j, const std::string& where, const char* key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    throw ConfigError(where + "." + key + " must be an integer");
  return it->get<int>();
}

bool get_bool(const json& j, const std::string& where, const char* key,
              bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
  return it->get<bool>();
}

std::string get_str(const json& j, const std::string& where, const char* key,
                    const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw ConfigError(where + "." + key + " must be a string");
  return it->get<std::string>();
}

std::vector<double> get_num_array(const json& j, const std::string& where,
                                  const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array())
    throw ConfigError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number())
      throw ConfigError(where + "." + key + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::array<double, 2> get_vec(const json& j, const std::string& where,
                              const char* key, int dim,
                              std::array<double, 2> fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  std::vector<double> v = get_num_array(j, where, key);
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError(where + "." + key + " needs exactly " + std::to_string(dim) +
                      " entries");
  std::array<double, 2> out{0.0, 0.0};
  for (int a = 0; a < dim; ++a) out[a] = v[a];
  return out;
}

// ---------------------------------------------------------------------------
// block parsers with per-subcommand defaults

OscillatorModel parse_model(const json* b) {
  double m = 1.0, k = 3.0 / 16.0, r0 = 1.0;
  InnerProfile inner = InnerProfile::constant(0.0);
  if (b) {
    require_keys(*b, "model", {"m", "k", "r0", "inner"});
    m = get_num(*b, "model", "m", m);
    k = get_num(*b, "model", "k", k);
    r0 = get_num(*b, "model", "r0", r0);
    if (auto it = b->find("inner"); it != b->end()) {
      if (!it->is_object()) throw ConfigError("model.inner must be an object");
      const std::string kind = get_str(*it, "model.inner", "kind", "constant");
      if (kind == "constant") {
        require_keys(*it, "model.inner", {"kind", "k0"});
        inner = InnerProfile::constant(get_num(*it, "model.inner", "k0", 0.0));
      } else if (kind == "tabulated") {
        require_keys(*it, "model.inner", {"kind", "times", "values"});
        inner = InnerProfile::tabulated(get_num_array(*it, "model.inner", "times"),
                                        get_num_array(*it, "model.inner", "values"));
      } else {
        throw ConfigError("model.inner.kind must be \"constant\" or \"tabulated\"");
      }
    }
  }
  return OscillatorModel::make(m, k, r0, inner);
}

MagneticModel parse_magnetic_model(const json* b) {
  double q = 1.0, b0 = 0.5, bbar = 0.5, r0 = 1.0, m = 1.0;
  if (b) {
    require_keys(*b, "model", {"q", "b0", "bbar", "r0", "m"});
    q = get_num(*b, "model", "q", q);
    b0 = get_num(*b, "model", "b0", b0);
    bbar = get_num(*b, "model", "bbar", bbar);
    r0 = get_num(*b, "model", "r0", r0);
    m = get_num(*b, "model", "m", m);
  }
  return MagneticModel::make(q, b0, bbar, r0, m);
}

Grid parse_grid(const json* b, Grid fallback) {
  if (!b) return fallback;
  require_keys(*b, "grid", {"dim", "n", "half_width"});
  return Grid::make(get_int(*b, "grid", "dim", fallback.dim),
                    get_int(*b, "grid", "n", fallback.n),
                    get_num(*b, "grid", "half_width", fallback.half_width));
}

std::optional<PotentialSpec> parse_potential(const json* b, double lambda,
                                             std::optional<PotentialSpec> fallback) {
  if (!b) return fallback;
  require_keys(*b, "potential", {"shape", "g", "rho", "omega"});
  const std::string shape = get_str(*b, "potential", "shape", "bump");
  if (shape == "none") {
    require_keys(*b, "potential", {"shape"});
    return std::nullopt;
  }
  const double g = get_num(*b, "potential", "g", fallback ? fallback->g : 1.0);
  const double rho = get_num(*b, "potential", "rho", fallback ? fallback->rho : 2.0);
  if (shape == "bump") return PotentialSpec::static_bump(g, rho, lambda);
  if (shape == "oscillating")
    return PotentialSpec::oscillating_bump(
        g, rho, get_num(*b, "potential", "omega", 0.5), lambda);
  throw ConfigError("potential.shape must be \"none\", \"bump\", or \"oscillating\"");
}

struct StateParams {
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> momentum{0.0, 0.0};
  double width = 1.0;
};

StateParams parse_state(const json* b, StateParams fallback, int dim) {
  if (!b) return fallback;
  require_keys(*b, "state", {"center", "momentum", "width"});
  StateParams s = fallback;
  s.center = get_vec(*b, "state", "center", dim, fallback.center);
  s.momentum = get_vec(*b, "state", "momentum", dim, fallback.momentum);
  s.width = get_num(*b, "state", "width", fallback.width);
  if (s.width <= 0.0) throw ConfigError("state.width must be positive");
  return s;
}

struct Schedule {
  StepPolicy policy{0.25, 1e-7, 12};
  std::optional<double> tolerance;
  double t_max = 512.0;
  int k_max = 8;
  double eps0 = 0.025;
  std::vector<double> times;
};

Schedule parse_schedule(const json* b, Schedule fallback) {
  if (!b) return fallback;
  require_keys(*b, "schedule",
               {"dt_max", "error_target", "max_halvings", "tolerance", "t_max",
                "k_max", "eps0", "times"});
  Schedule s = fallback;
  s.policy.dt_max = get_num(*b, "schedule", "dt_max", fallback.policy.dt_max);
  s.policy.error_target =
      get_num(*b, "schedule", "error_target", fallback.policy.error_target);
  s.policy.max_halvings =
      get_int(*b, "schedule", "max_halvings", fallback.policy.max_halvings);
  if (auto it = b->find("tolerance"); it != b->end())
    s.tolerance = get_num(*b, "schedule", "tolerance", 0.0);
  s.t_max = get_num(*b, "schedule", "t_max", fallback.t_max);
  s.k_max = get_int(*b, "schedule", "k_max", fallback.k_max);
  s.eps0 = get_num(*b, "schedule", "eps0", fallback.eps0);
  if (b->contains("times")) s.times = get_num_array(*b, "schedule", "times");
  return s;
}

struct CutoffParams {
  double kappa1 = 0.05, R1 = 16.0, kappa2 = 0.05;
  std::optional<double> eps, eta0, eps2, eps3, eps5;
};

CutoffParams parse_cutoffs(const json* b, CutoffParams fallback) {
  if (!b) return fallback;
  require_keys(*b, "cutoffs",
               {"kappa1", "R1", "kappa2", "eps", "eta0", "eps2", "eps3", "eps5"});
  CutoffParams c = fallback;
  c.kappa1 = get_num(*b, "cutoffs", "kappa1", fallback.kappa1);
  c.R1 = get_num(*b, "cutoffs", "R1", fallback.R1);
  c.kappa2 = get_num(*b, "cutoffs", "kappa2", fallback.kappa2);
  for (auto [key, slot] : {std::pair{"eps", &c.eps}, {"eta0", &c.eta0},
                           {"eps2", &c.eps2}, {"eps3", &c.eps3},
                           {"eps5", &c.eps5}})
    if (b->contains(key)) *slot = get_num(*b, "cutoffs", key, 0.0);
  return c;
}

struct OutputParams {
  std::string directory = ".";
  bool snapshot = false;
};

OutputParams parse_output(const json* b, OutputParams fallback) {
  if (!b) return fallback;
  require_keys(*b, "output", {"directory", "snapshot"});
  OutputParams o = fallback;
  o.directory = get_str(*b, "output", "directory", fallback.directory);
  o.snapshot = get_bool(*b, "output", "snapshot", fallback.snapshot);
  return o;
}

// ---------------------------------------------------------------------------
// shared run scaffolding

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool snapshot = false;
};

struct RunContext {
  fs::path dir;
  bool snapshot = false;
};

RunContext resolve_output(const json& cfg, const CommonArgs& args) {
  OutputParams out = parse_output(block(cfg, "output"), {});
  RunContext ctx;
  ctx.dir = args.out_dir.empty() ? fs::path(out.directory) : fs::path(args.out_dir);
  ctx.snapshot = args.snapshot || out.snapshot;
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec && !fs::is_directory(ctx.dir))
    throw IoError("cannot create output directory " + ctx.dir.string());
  return ctx;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    out += (i ? ";" : "") + parts[i];
  return out;
}

std::string echo_model(const OscillatorModel& model) {
  std::string inner = model.inner.kind == InnerProfile::Kind::constant
                          ? "constant:" + fmt(model.inner.k0)
                          : "tabulated:" + fmt(static_cast<int>(model.inner.times.size()));
  return "m=" + fmt(model.m) + ";k=" + fmt(model.k) + ";r0=" + fmt(model.r0) +
         ";inner=" + inner;
}

std::string echo_grid(const Grid& g) {
  return "dim=" + fmt(g.dim) + ";n=" + fmt(g.n) + ";half_width=" + fmt(g.half_width);
}

std::string echo_potential(const std::optional<PotentialSpec>& pot) {
  if (!pot) return "potential=none";
  std::string s = "potential=" + std::string(pot->oscillating ? "oscillating" : "bump") +
                  ";g=" + fmt(pot->g) + ";rho=" + fmt(pot->rho);
  if (pot->oscillating) s += ";omega=" + fmt(pot->omega);
  return s;
}

std::string echo_state(const StateParams& s, int dim) {
  std::string c = fmt(s.center[0]), p = fmt(s.momentum[0]);
  if (dim == 2) {
    c += ":" + fmt(s.center[1]);
    p += ":" + fmt(s.momentum[1]);
  }
  return "center=" + c + ";momentum=" + p + ";width=" + fmt(s.width);
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] * (1.0 - 1e-12) - 1e-15) return false;
  return true;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_fundamental(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config", {"model", "output"});
  const OscillatorModel model = parse_model(block(cfg, "model"));
  const RunContext ctx = resolve_output(cfg, args);
  const FundamentalSolution fsol = solve_fundamental(model);

  // geometric sample sweep on both sides plus the origin
  std::vector<double> ts{0.0};
  for (int s : {-1, 1})
    for (int i = 0; i <= 60; ++i)
      ts.push_back(s * model.r0 * std::pow(10.0, -2.0 + 5.0 * i / 60.0));
  std::sort(ts.begin(), ts.end());

  std::vector<double> z1, s1, z2, s2, w;
  for (double t : ts) {
    const ValueSlope a = fsol.cosine_like(t), b = fsol.sine_like(t);
    z1.push_back(a.value);
    s1.push_back(a.slope);
    z2.push_back(b.value);
    s2.push_back(b.slope);
    w.push_back(fsol.wronskian(t));
  }
  write_series(ctx.dir / "fundamental_series.csv",
               {"t", "zeta1", "zeta1_slope", "zeta2", "zeta2_slope", "wronskian"},
               {ts, z1, s1, z2, s2, w});

  Report rep("fundamental", echo_model(model));
  const TailCoefficients tail = fsol.tail(true);
  rep.info("c1", tail.c1);
  rep.info("c2", tail.c2);
  rep.info("c3", tail.c3);
  rep.info("c4", tail.c4);
  if (model.inner.kind == InnerProfile::Kind::constant) {
    const TailCoefficients closed = matching_coefficients(model);
    rep.check("c1_error", std::abs(tail.c1 - closed.c1), 1e-10);
    rep.check("c2_error", std::abs(tail.c2 - closed.c2), 1e-10);
    rep.check("c3_error", std::abs(tail.c3 - closed.c3), 1e-10);
    rep.check("c4_error", std::abs(tail.c4 - closed.c4), 1e-10);
  }
  const AsymptoticCoefficients ac = asymptotic_coefficients(fsol);
  rep.info("ctilde1", ac.ctilde1);
  rep.info("ctilde2", ac.ctilde2);
  rep.check("asymptotic_error_1", std::abs(ac.ctilde1 - tail.c1), 1e-6);
  rep.check("asymptotic_error_2", std::abs(ac.ctilde2 - tail.c3), 1e-6);

  double worst_dev = 0.0, worst_w = 1.0;
  for (double t : ts) {
    const double wt = fsol.wronskian(t);
    if (std::abs(wt - 1.0) > worst_dev) {
      worst_dev = std::abs(wt - 1.0);
      worst_w = wt;
    }
  }
  rep.info("wronskian", worst_w);
  rep.check("wronskian_deviation", worst_dev, 1e-8);

  rep.write(ctx.dir);
  return rep.failures();
}

int cmd_factorization(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config",
               {"model", "grid", "potential", "state", "schedule", "output"});
  const OscillatorModel model = parse_model(block(cfg, "model"));
  const Grid grid = parse_grid(block(cfg, "grid"), Grid::make(1, 2048, 64.0));
  const std::optional<PotentialSpec> pot =
      parse_potential(block(cfg, "potential"), model.lambda,
                      PotentialSpec::static_bump(1.0, 2.0, model.lambda));
  const StateParams st =
      parse_state(block(cfg, "state"), {{0.0, 0.0}, {1.0, 0.0}, 2.0}, grid.dim);
  Schedule sch = parse_schedule(block(cfg, "schedule"), {});
  if (sch.times.empty())
    sch.times = {model.r0, 2.0 * model.r0, 4.0 * model.r0, 8.0 * model.r0};
  const double tol = sch.tolerance.value_or(pot ? 1e-5 : 1e-6);
  const RunContext ctx = resolve_output(cfg, args);

  const WaveFunction psi = make_gaussian(grid, st.center, st.momentum, st.width);
  const PotentialSpec* vp = pot ? &*pot : nullptr;

  Report rep("factorization",
             join({echo_model(model), echo_grid(grid), echo_potential(pot),
                   echo_state(st, grid.dim), "dt_max=" + fmt(sch.policy.dt_max),
                   "tol=" + fmt(tol)}));
  for (double t : sch.times)
    rep.check("residual_t=" + fmt(t),
              factorization_residual(model, vp, psi, t, sch.policy), tol);

  if (ctx.snapshot) {
    const WaveFunction fin =
        evolve_full(model, vp, psi, 0.0, sch.times.back(), sch.policy);
    write_snapshot((ctx.dir / "factorization_final.snap").string(), fin);
  }
  rep.write(ctx.dir);
  return rep.failures();
}

int cmd_waveop(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config",
               {"model", "grid", "potential", "state", "schedule", "output"});
  const OscillatorModel model = parse_model(block(cfg, "model"));
  const Grid grid = parse_grid(block(cfg, "grid"), Grid::make(1, 2048, 128.0));
  const std::optional<PotentialSpec> pot =
      parse_potential(block(cfg, "potential"), model.lambda,
                      PotentialSpec::static_bump(1.0, 3.0, model.lambda));
  const StateParams st =
      parse_state(block(cfg, "state"), {{0.0, 0.0}, {2.5, 0.0}, 2.0}, grid.dim);
  Schedule defaults;
  defaults.policy = StepPolicy{0.25, 2e-9, 16};
  const Schedule sch = parse_schedule(block(cfg, "schedule"), defaults);
  const double tol = sch.tolerance.value_or(1e-4);
  const RunContext ctx = resolve_output(cfg, args);

  const WaveFunction psi = make_gaussian(grid, st.center, st.momentum, st.width);
  const PotentialSpec spec =
      pot ? *pot : PotentialSpec::static_bump(0.0, 2.0, model.lambda);

  const WaveOpReport w =
      wave_operator_forward(model, spec, psi, tol, sch.policy, sch.eps0, sch.k_max);

  Report rep("waveop",
             join({echo_model(model), echo_grid(grid), echo_potential(pot),
                   echo_state(st, grid.dim), "tol=" + fmt(tol),
                   "eps0=" + fmt(sch.eps0), "k_max=" + fmt(sch.k_max)}));
  std::vector<double> horizon_col, gap_col;
  for (std::size_t i = 0; i < w.cauchy_gaps.size(); ++i) {
    rep.info("gap_T=" + fmt(w.horizons[i + 1]), w.cauchy_gaps[i]);
    horizon_col.push_back(w.horizons[i + 1]);
    gap_col.push_back(w.cauchy_gaps[i]);
  }
  write_series(ctx.dir / "waveop_gaps.csv", {"horizon", "gap"},
               {horizon_col, gap_col});
  rep.check("final_gap", w.cauchy_gaps.back(), tol);
  rep.flag("converged", w.converged);
  rep.check("isometry_error", std::abs(norm(w.result) - norm(psi)), 1e-6);

  if (ctx.snapshot)
    write_snapshot((ctx.dir / "waveop_limit.snap").string(), w.result);
  rep.write(ctx.dir);
  return rep.failures();
}

int cmd_complete(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config", {"model", "grid", "potential", "state", "cutoffs",
                               "schedule", "output"});
  const OscillatorModel model = parse_model(block(cfg, "model"));
  const Grid grid = parse_grid(block(cfg, "grid"), Grid::make(1, 2048, 128.0));
  const std::optional<PotentialSpec> pot =
      parse_potential(block(cfg, "potential"), model.lambda,
                      PotentialSpec::static_bump(1.0, 3.0, model.lambda));
  const StateParams st =
      parse_state(block(cfg, "state"), {{0.0, 0.0}, {2.5, 0.0}, 2.0}, grid.dim);
  CutoffParams cut_defaults;
  cut_defaults.R1 = 64.0;
  const CutoffParams cut = parse_cutoffs(block(cfg, "cutoffs"), cut_defaults);
  Schedule defaults;
  defaults.policy = StepPolicy{0.25, 1e-8, 16};
  const Schedule sch = parse_schedule(block(cfg, "schedule"), defaults);
  const double tol = sch.tolerance.value_or(1e-4);
  const RunContext ctx = resolve_output(cfg, args);

  const WaveFunction psi = make_gaussian(grid, st.center, st.momentum, st.width);
  const PotentialSpec spec =
      pot ? *pot : PotentialSpec::static_bump(0.0, 2.0, model.lambda);
  const RangeCutoffs cuts = RangeCutoffs::make(cut.kappa1, cut.R1, cut.kappa2);

  const CompletenessReport c = completeness_roundtrip(model, spec, psi, cuts, tol,
                                                      sch.policy, sch.eps0, sch.k_max);

  Report rep("complete",
             join({echo_model(model), echo_grid(grid), echo_potential(pot),
                   echo_state(st, grid.dim), "tol=" + fmt(tol),
                   "kappa1=" + fmt(cut.kappa1), "R1=" + fmt(cut.R1),
                   "kappa2=" + fmt(cut.kappa2), "eps0=" + fmt(sch.eps0),
                   "k_max=" + fmt(sch.k_max)}));
  for (std::size_t i = 0; i < c.forward.cauchy_gaps.size(); ++i)
    rep.info("forward_gap_T=" + fmt(c.forward.horizons[i + 1]),
             c.forward.cauchy_gaps[i]);
  rep.check("forward_final_gap", c.forward.cauchy_gaps.back(), tol);
  rep.flag("forward_converged", c.forward.converged);
  rep.check("isometry_error", std::abs(norm(c.forward.result) - norm(psi)), 1e-6);
  rep.check("membership_w1_final", c.membership.w1_defect.back(), 1e-3);
  rep.check("membership_w2_final", c.membership.w2_defect.back(), 1e-3);
  rep.flag("member", c.membership.member);
  for (std::size_t i = 0; i < c.inverse.cauchy_gaps.size(); ++i)
    rep.info("inverse_gap_T=" + fmt(c.inverse.horizons[i + 1]),
             c.inverse.cauchy_gaps[i]);
  rep.check("inverse_final_gap", c.inverse.cauchy_gaps.back(), tol);
  rep.flag("inverse_converged", c.inverse.converged);
  rep.check("roundtrip_error", c.roundtrip_error, 1e-3);

  if (ctx.snapshot)
    write_snapshot((ctx.dir / "complete_forward.snap").string(), c.forward.result);
  rep.write(ctx.dir);
  return rep.failures();
}

int cmd_estimates(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config", {"model", "grid", "potential", "state", "cutoffs",
                               "schedule", "output"});
  const OscillatorModel model = parse_model(block(cfg, "model"));
  const Grid grid = parse_grid(block(cfg, "grid"), Grid::make(1, 2048, 128.0));
  const std::optional<PotentialSpec> pot =
      parse_potential(block(cfg, "potential"), model.lambda, std::nullopt);
  const StateParams st =
      parse_state(block(cfg, "state"), {{0.0, 0.0}, {1.0, 0.0}, 10.0}, grid.dim);
  const CutoffParams cut = parse_cutoffs(block(cfg, "cutoffs"), {});
  Schedule defaults;
  defaults.eps0 = 0.1;
  const Schedule sch = parse_schedule(block(cfg, "schedule"), defaults);
  const RunContext ctx = resolve_output(cfg, args);

  auto build_config = [&](double t_max) {
    EstimateConfig ec = EstimateConfig::make(model, t_max);
    ec.kappa1 = cut.kappa1;
    ec.R1 = cut.R1;
    ec.kappa2 = cut.kappa2;
    if (cut.eps) ec.eps = *cut.eps;
    if (cut.eta0) ec.eta0 = *cut.eta0;
    if (cut.eps2) ec.eps2 = *cut.eps2;
    if (cut.eps3) ec.eps3 = *cut.eps3;
    ec.eps5 = cut.eps5 ? *cut.eps5 : 0.0;  // zero requests the derived midpoint
    ec.finalize(model);
    return ec;
  };
  const EstimateConfig ec = build_config(sch.t_max);
  const EstimateConfig ec2 = build_config(2.0 * sch.t_max);

  const WaveFunction psi = make_gaussian(grid, st.center, st.momentum, st.width);
  const PotentialSpec* vp = pot ? &*pot : nullptr;

  Report rep("estimates",
             join({echo_model(model), echo_grid(grid), echo_potential(pot),
                   echo_state(st, grid.dim), "t_max=" + fmt(sch.t_max),
                   "kappa1=" + fmt(ec.kappa1), "R1=" + fmt(ec.R1),
                   "eps=" + fmt(ec.eps), "eps2=" + fmt(ec.eps2),
                   "eps3=" + fmt(ec.eps3), "eps5=" + fmt(ec.eps5),
                   "eps0=" + fmt(sch.eps0)}));

  const IntegralSeries large = large_velocity_integral(model, vp, psi, ec, sch.policy);
  write_series(ctx.dir / "estimates_large_velocity.csv",
               {"t", "integrand", "partial_integral"},
               {large.times, large.integrand, large.partial});
  rep.info("large_velocity_bound", large.bound_estimate);
  rep.flag("large_partials_nondecreasing", nondecreasing(large.partial));

  const IntegralSeries middle =
      middle_velocity_integral(model, vp, psi, ec, sch.policy);
  write_series(ctx.dir / "estimates_middle_velocity.csv",
               {"t", "integrand", "partial_integral"},
               {middle.times, middle.integrand, middle.partial});
  rep.info("middle_velocity_bound", middle.bound_estimate);
  rep.flag("middle_partials_nondecreasing", nondecreasing(middle.partial));

  const IntegralSeries large2 =
      large_velocity_integral(model, vp, psi, ec2, sch.policy);
  const IntegralSeries middle2 =
      middle_velocity_integral(model, vp, psi, ec2, sch.policy);
  const auto change = [](double b1, double b2) {
    return std::abs(b2 - b1) / std::max(b1, 1e-12);
  };
  rep.check("large_bound_change", change(large.bound_estimate, large2.bound_estimate),
            0.05);
  rep.check("middle_bound_change",
            change(middle.bound_estimate, middle2.bound_estimate), 0.05);

  const DecayProfile prof =
      minimal_velocity_profile(model, vp, psi, ec, 1e-2, sch.policy);
  write_series(ctx.dir / "estimates_minimal_profile.csv", {"t", "value"},
               {prof.times, prof.values});
  rep.flag("minimal_decaying", prof.decaying);
  rep.check("minimal_final_defect", prof.values.back(), prof.tol);

  const DecayFit fit = free_min_velocity_decay(model, psi, sch.eps0, 24, sch.t_max);
  write_series(ctx.dir / "estimates_free_decay.csv", {"t", "value"},
               {fit.times, fit.values});
  rep.check("free_decay_slope", fit.slope, -(1.0 - 2.0 * model.lambda));

  rep.write(ctx.dir);
  return rep.failures();
}

int cmd_magnetic(const json& cfg, const CommonArgs& args) {
  require_keys(cfg, "config",
               {"model", "grid", "potential", "state", "schedule", "output"});
  const MagneticModel mm = parse_magnetic_model(block(cfg, "model"));
  const Grid grid = parse_grid(block(cfg, "grid"), Grid::make(2, 512, 12.0));
  if (grid.dim != 2) throw ConfigError("magnetic runs need a dim = 2 grid");
  const std::optional<PotentialSpec> pot =
      parse_potential(block(cfg, "potential"), mm.oscillator.lambda,
                      PotentialSpec::static_bump(1.0, 4.0, mm.oscillator.lambda));
  const StateParams st =
      parse_state(block(cfg, "state"), {{1.0, 0.0}, {0.0, 1.0}, 1.0}, grid.dim);
  Schedule defaults;
  defaults.policy = StepPolicy{0.25, 2e-7, 16};
  const Schedule sch = parse_schedule(block(cfg, "schedule"), defaults);
  const RunContext ctx = resolve_output(cfg, args);

  Report rep("magnetic",
             join({"q=" + fmt(mm.q), "b0=" + fmt(mm.b0), "bbar=" + fmt(mm.bbar),
                   "r0=" + fmt(mm.r0), "m=" + fmt(mm.m), echo_grid(grid),
                   echo_potential(pot), echo_state(st, grid.dim)}));

  // rotation phase: exact zero at t = 0, echo values at the corners
  rep.check("omega_t0", std::abs(omega_phase(mm, 0.0)), 1e-15);
  rep.info("omega_r0", omega_phase(mm, mm.r0));
  rep.info("omega_minus_r0", omega_phase(mm, -mm.r0));
  std::vector<double> ot, ov;
  for (int i = 0; i <= 80; ++i) {
    const double t = mm.r0 * (-8.0 + 16.0 * i / 80.0);
    ot.push_back(t);
    ov.push_back(omega_phase(mm, t));
  }
  write_series(ctx.dir / "magnetic_omega.csv", {"t", "omega"}, {ot, ov});

  // constant-field orbit: one full period inside the flat window, fixed setup
  {
    const double two_pi = 2.0 * std::acos(-1.0);
    const MagneticModel cyc = MagneticModel::make(1.0, two_pi, 0.5, 1.0, 1.0);
    const Grid cg = Grid::make(2, 128, 6.0);
    const WaveFunction orbit = make_gaussian(cg, {2.0, 0.0}, {0.0, -two_pi}, 0.5);
    const WaveFunction spun =
        evolve_magnetic(cyc, nullptr, orbit, 0.0, 1.0, StepPolicy{0.25, 1e-4, 14});
    const std::vector<double> mean = mean_position(spun);
    rep.check("cyclotron_period_error",
              std::abs(std::atan2(mean[1], mean[0])) / two_pi, 1e-3);
  }

  // rotation reduction to the companion oscillator
  const WaveFunction psi = make_gaussian(grid, st.center, st.momentum, st.width);
  rep.check("reduction_residual_free",
            reduction_residual(mm, nullptr, psi, mm.r0, sch.policy), 1e-6);
  if (pot)
    rep.check("reduction_residual_potential",
              reduction_residual(mm, &*pot, psi, 2.0 * mm.r0, sch.policy), 1e-6);

  if (ctx.snapshot) {
    const WaveFunction fin =
        evolve_magnetic(mm, pot ? &*pot : nullptr, psi, 0.0, mm.r0, sch.policy);
    write_snapshot((ctx.dir / "magnetic_final.snap").string(), fin);
  }
  rep.write(ctx.dir);
  return rep.failures();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-decaying oscillator laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON run configuration");
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_option("--jobs", args.jobs, "worker budget for sweeps")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--snapshot", args.snapshot, "write binary state snapshots");
    return sub;
  };

  CLI::App* fundamental =
      add_common(app.add_subcommand("fundamental", "fundamental solutions and tails"));
  CLI::App* factorization = add_common(
      app.add_subcommand("factorization", "propagator factorization residuals"));
  CLI::App* waveop =
      add_common(app.add_subcommand("waveop", "forward wave operator gaps"));
  CLI::App* complete =
      add_common(app.add_subcommand("complete", "range membership and round trip"));
  CLI::App* estimates =
      add_common(app.add_subcommand("estimates", "propagation estimate functionals"));
  CLI::App* magnetic =
      add_common(app.add_subcommand("magnetic", "magnetic reduction checks"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const json cfg =
        args.config_path.empty() ? json::object() : load_config(args.config_path);
    int failures = 0;
    if (fundamental->parsed()) failures = cmd_fundamental(cfg, args);
    if (factorization->parsed()) failures = cmd_factorization(cfg, args);
    if (waveop->parsed()) failures = cmd_waveop(cfg, args);
    if (complete->parsed()) failures = cmd_complete(cfg, args);
    if (estimates->parsed()) failures = cmd_estimates(cfg, args);
    if (magnetic->parsed()) failures = cmd_magnetic(cfg, args);
    if (failures > 0) {
      std::cerr << failures << " checked row(s) failed\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
