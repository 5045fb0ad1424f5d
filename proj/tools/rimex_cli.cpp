// Command-line front end; talks to the library only through rimex.h.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rimex/rimex.h"

namespace {

struct Failure {
  std::string message;
};

void check(rimex_status s, const char* context) {
  if (s != RIMEX_OK) {
    throw Failure{std::string(context) + ": " + rimex_status_string(s) + ": " +
                  rimex_last_error()};
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

// Short form for header values and file names.
std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, double>)
      s += short_num(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

using Header = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const Header& h) {
  out << "# rimex " << rimex_version() << "\n";
  for (const auto& [k, v] : h) out << "# " << k << " = " << v << "\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{"cannot open " + path + " for writing"};
  return f;
}

struct CommonOptions {
  double tau = 1e-6;
  int max_iterations = 200;
  int points_per_half = 20;
  int threads = 1;
  double cfl = 1.0;
  double material_time_fraction = 0.5;

  void add(CLI::App* app) {
    app->add_option("--tau", tau, "closure gradient tolerance")->capture_default_str();
    app->add_option("--max-iterations", max_iterations, "Newton iterations per closure")
        ->capture_default_str();
    app->add_option("--quadrature", points_per_half, "Gauss points per half interval")
        ->capture_default_str();
    app->add_option("--threads", threads, "worker threads")->capture_default_str();
    app->add_option("--cfl", cfl, "dt / dz, at most 1")->capture_default_str();
    app->add_option("--material-time", material_time_fraction,
                    "material sampled at t + f dt within each step")
        ->capture_default_str();
  }

  rimex_solver_options to_c() const {
    rimex_solver_options o;
    rimex_solver_options_default(&o);
    o.closure.tau = tau;
    o.closure.max_iterations = max_iterations;
    o.points_per_half = points_per_half;
    o.threads = threads;
    o.cfl_factor = cfl;
    o.material_time_fraction = material_time_fraction;
    return o;
  }

  void describe(Header& h) const {
    h.emplace_back("tau", short_num(tau));
    h.emplace_back("max_iterations", std::to_string(max_iterations));
    h.emplace_back("quadrature_points_per_half", std::to_string(points_per_half));
    h.emplace_back("cfl", short_num(cfl));
    h.emplace_back("material_time_fraction", short_num(material_time_fraction));
  }
};

// ---- converge --------------------------------------------------------------

struct ConvergeOptions {
  double K = 2.0;
  std::vector<int> nx{40, 80, 160};
  int order = 3;
  std::string output;
  CommonOptions common;
};

int run_converge(const ConvergeOptions& o) {
  const rimex_solver_options opts = o.common.to_c();
  std::vector<rimex_convergence_row> rows(o.nx.size());
  check(rimex_convergence_study(o.K, o.nx.data(), o.nx.size(), o.order, &opts, rows.data()),
        "convergence study");

  std::ostringstream csv;
  Header h{{"command", "converge"},
           {"K", short_num(o.K)},
           {"nx", join(o.nx)},
           {"order", std::to_string(o.order)}};
  o.common.describe(h);
  h.emplace_back("domain", "(-pi, pi), periodic");
  h.emplace_back("t_final", "pi/5");
  write_header(csv, h);
  csv << "nx,E1,nu1,Einf,nuinf\n";
  for (const auto& r : rows)
    csv << r.nx << "," << num(r.E1) << "," << num(r.nu1) << "," << num(r.Einf) << ","
        << num(r.nuinf) << "\n";
  if (o.output.empty()) {
    std::cout << csv.str();
  } else {
    open_output(o.output) << csv.str();
  }
  return 0;
}

// ---- planesource -----------------------------------------------------------

struct PlaneSourceOptions {
  int order = 1;
  int nx = 600;
  std::string collision = "lb";
  double lb_scale = 0.5;
  std::vector<double> snapshots;
  std::string prefix = "planesource";
  CommonOptions common;
};

void write_fields(const std::string& path, rimex_solver* s, const Header& base) {
  rimex_solver_info info;
  check(rimex_solver_get_info(s, &info), "solver info");
  const std::size_t n = static_cast<std::size_t>(info.nx);
  const std::size_t m = static_cast<std::size_t>(info.order + 1);
  std::vector<double> x(n), means(n * m), d(n);
  check(rimex_solver_cell_centers(s, x.data(), x.size()), "cell centres");
  check(rimex_solver_means(s, means.data(), means.size()), "cell means");
  check(rimex_solver_relative_distances(s, d.data(), d.size()), "relative distances");

  std::ofstream f = open_output(path);
  Header h = base;
  h.emplace_back("t", short_num(info.t));
  h.emplace_back("step", std::to_string(info.step));
  write_header(f, h);
  f << "x";
  for (std::size_t k = 0; k < m; ++k) f << ",u" << k;
  f << ",d_rel\n";
  for (std::size_t j = 0; j < n; ++j) {
    f << num(x[j]);
    for (std::size_t k = 0; k < m; ++k) f << "," << num(means[j * m + k]);
    f << "," << num(d[j]) << "\n";
  }
}

void write_diagnostics(const std::string& path, rimex_solver* s, const Header& base) {
  std::size_t count = 0;
  check(rimex_solver_diagnostics_count(s, &count), "diagnostics");
  std::vector<rimex_diagnostics> diag(count);
  check(rimex_solver_diagnostics(s, diag.data(), diag.size()), "diagnostics");
  std::ofstream f = open_output(path);
  write_header(f, base);
  f << "step,t,total_mass,min_margin,min_d_rel,closure_iters_max\n";
  for (const auto& d : diag)
    f << d.step << "," << num(d.t) << "," << num(d.total_mass) << "," << num(d.min_margin) << ","
      << num(d.min_d_rel) << "," << d.closure_iterations_max << "\n";
}

int run_planesource(const PlaneSourceOptions& o) {
  rimex_collision kind;
  if (o.collision == "lb")
    kind = RIMEX_COLLISION_LAPLACE_BELTRAMI;
  else if (o.collision == "bgk")
    kind = RIMEX_COLLISION_BGK;
  else
    throw Failure{"--collision must be lb or bgk"};

  const rimex_solver_options opts = o.common.to_c();
  rimex_solver* raw = nullptr;
  check(rimex_solver_create_plane_source(o.order, o.nx, kind, o.lb_scale, &opts, &raw),
        "plane source setup");
  std::unique_ptr<rimex_solver, void (*)(rimex_solver*)> solver(raw, rimex_solver_destroy);

  Header h{{"command", "planesource"},
           {"order", std::to_string(o.order)},
           {"nx", std::to_string(o.nx)},
           {"collision", o.collision},
           {"lb_scale", short_num(o.lb_scale)},
           {"snapshots", join(o.snapshots)}};
  o.common.describe(h);
  h.emplace_back("domain", "[-1.2, 1.2], vacuum Dirichlet boundaries");
  h.emplace_back("psi_vac", "5e-09");
  h.emplace_back("initial_data",
                 "psi_vac everywhere plus a unit-mass isotropic Dirac at x = 0 split between "
                 "the two centre cells (total u0 mass 2 + 2 psi_vac L)");
  h.emplace_back("d_rel", "normalized moments, cells with u0 > 100 psi_vac");

  rimex_status status = RIMEX_OK;
  for (double t : o.snapshots) {
    status = rimex_solver_advance_to(solver.get(), t);
    if (status != RIMEX_OK) break;
    write_fields(o.prefix + "_t" + short_num(t) + ".csv", solver.get(), h);
  }
  if (status == RIMEX_OK) status = rimex_solver_run(solver.get());
  const std::string failure = status == RIMEX_OK ? "" : rimex_last_error();

  // On failure the solver still holds the last valid state; write it out.
  write_fields(o.prefix + "_fields.csv", solver.get(), h);
  write_diagnostics(o.prefix + "_diagnostics.csv", solver.get(), h);
  if (status != RIMEX_OK) throw Failure{"plane source run: " + failure};
  return 0;
}

// ---- realizability-check ---------------------------------------------------

struct CheckOptions {
  std::string order = "3";
  int samples = 1000;
  std::uint64_t seed = 1;
  double band = 1e-6;
};

int run_check(const CheckOptions& o) {
  int order = 0;
  if (o.order != "mixed2") {
    try {
      order = std::stoi(o.order);
    } catch (const std::exception&) {
      throw Failure{"--order must be 1, 2, 3 or mixed2"};
    }
    if (order < 1 || order > 3) throw Failure{"--order must be 1, 2, 3 or mixed2"};
  }
  rimex_agreement r;
  check(rimex_realizability_agreement(order, o.samples, o.seed, o.band, &r), "agreement check");
  Header h{{"command", "realizability-check"},
           {"order", o.order},
           {"samples", std::to_string(o.samples)},
           {"seed", std::to_string(o.seed)},
           {"band", short_num(o.band)}};
  write_header(std::cout, h);
  std::cout << "samples,realizable,in_band,indeterminate,agreed,disagreed\n"
            << r.samples << "," << r.realizable << "," << r.in_band << "," << r.indeterminate
            << "," << r.agreed << "," << r.disagreed << "\n";
  return r.disagreed == 0 && r.indeterminate == 0 ? 0 : 1;
}

// ---- reduced-demo ----------------------------------------------------------

struct DemoOptions {
  std::vector<double> dt{1e-3, 1e-2, 1e-1};
};

bool realizable(const double* u, int order, double* margin) {
  rimex_verdict v;
  check(rimex_check_realizable(u, order, 1e-12, &v), "realizability");
  *margin = v.margin;
  return v.realizable != 0;
}

int run_demo(const DemoOptions& o) {
  const double u[3] = {1.0, 1.0, 1.0};
  bool explicit_fails = true, implicit_ok = true;
  for (double dt : o.dt) {
    double e[3], im[3], me, mi;
    check(rimex_reduced_explicit_step(u, 2, dt, RIMEX_COLLISION_LAPLACE_BELTRAMI, 1.0, e),
          "explicit step");
    check(rimex_reduced_implicit_step(u, 2, dt, RIMEX_COLLISION_LAPLACE_BELTRAMI, 1.0, im),
          "implicit step");
    const bool er = realizable(e, 2, &me);
    const bool ir = realizable(im, 2, &mi);
    explicit_fails = explicit_fails && !er;
    implicit_ok = implicit_ok && ir;
    std::printf("dt=%s explicit (%s, %s, %s) margin %s %s; implicit (%s, %s, %s) margin %s %s\n",
                short_num(dt).c_str(), short_num(e[0]).c_str(), short_num(e[1]).c_str(),
                short_num(e[2]).c_str(), short_num(me).c_str(),
                er ? "realizable" : "NOT realizable", short_num(im[0]).c_str(),
                short_num(im[1]).c_str(), short_num(im[2]).c_str(), short_num(mi).c_str(),
                ir ? "realizable" : "NOT realizable");
  }
  std::printf("explicit step from (1,1,1): %s; implicit step: %s\n",
              explicit_fails ? "NOT realizable" : "realizable",
              implicit_ok ? "realizable" : "NOT realizable");

  // Implicit relaxation from points on the boundary of the normalized M2 set.
  const int points = 20;
  const double dt = 0.1;
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    double v[3];
    if (i < points - 4) {
      const double x = -1.0 + 2.0 * i / (points - 5);
      v[0] = 1.0, v[1] = x, v[2] = x * x;
    } else {
      v[0] = 1.0, v[1] = -0.75 + 0.5 * (i - points + 4), v[2] = 1.0;
    }
    for (int step = 0; step < 400; ++step) {
      double next[3];
      check(rimex_reduced_implicit_step(v, 2, dt, RIMEX_COLLISION_LAPLACE_BELTRAMI, 1.0, next),
            "implicit step");
      std::copy(next, next + 3, v);
    }
    worst = std::max(worst, std::hypot(v[1] / v[0], v[2] / v[0] - 1.0 / 3.0));
  }
  std::printf("implicit relaxation from %d boundary points, dt=%s, 400 steps: "
              "max distance to (0, 1/3) = %s\n",
              points, short_num(dt).c_str(), short_num(worst).c_str());
  return explicit_fails && implicit_ok ? 0 : 1;
}

void add_config_option(CLI::App* sub, std::string& path) {
  sub->add_option("--config", path, "flat key=value file with option overrides")
      ->check(CLI::ExistingFile);
}

// Values from the file fill options that were not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  if (!sub->parsed() || path.empty()) return;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "config") throw CLI::ConversionError("config files cannot nest");
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw CLI::ExtrasError("unknown key '" + item.name + "' in " + path, CLI::ExitCodes::ExtrasError);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Realizability-preserving IMEX solver for minimum-entropy moment models"};
  app.require_subcommand(1);

  ConvergeOptions conv;
  auto* c = app.add_subcommand("converge", "manufactured-solution convergence table");
  std::string c_config;
  add_config_option(c, c_config);
  c->add_option("--K", conv.K, "steepness of the manufactured solution (> 1)")
      ->capture_default_str();
  c->add_option("--nx", conv.nx, "comma-separated resolutions")
      ->delimiter(',')
      ->capture_default_str();
  c->add_option("--order", conv.order, "moment order N (1..3)")->capture_default_str();
  c->add_option("--output,-o", conv.output, "CSV file (default: stdout)");
  conv.common.add(c);

  PlaneSourceOptions ps;
  auto* p = app.add_subcommand("planesource", "plane-source benchmark");
  std::string p_config;
  add_config_option(p, p_config);
  p->add_option("--order", ps.order, "moment order N (1..3)")->capture_default_str();
  p->add_option("--nx", ps.nx, "number of cells (even)")->capture_default_str();
  p->add_option("--collision", ps.collision, "lb or bgk")
      ->check(CLI::IsMember({"lb", "bgk"}))
      ->capture_default_str();
  p->add_option("--lb-scale", ps.lb_scale, "Laplace-Beltrami operator scale")
      ->capture_default_str();
  p->add_option("--snapshots", ps.snapshots, "comma-separated output times")->delimiter(',');
  p->add_option("--prefix", ps.prefix, "output file prefix")->capture_default_str();
  ps.common.add(p);

  CheckOptions chk;
  auto* r = app.add_subcommand("realizability-check", "predicate vs LP oracle agreement");
  std::string r_config;
  add_config_option(r, r_config);
  r->add_option("--order", chk.order, "1, 2, 3 or mixed2")->capture_default_str();
  r->add_option("--samples", chk.samples, "random vectors")->capture_default_str();
  r->add_option("--seed", chk.seed, "base seed")->capture_default_str();
  r->add_option("--band", chk.band, "relative margin band excluded from comparison")
      ->capture_default_str();

  DemoOptions demo;
  auto* d = app.add_subcommand("reduced-demo", "explicit vs implicit collision step");
  d->add_option("--dt", demo.dt, "comma-separated step sizes")->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    apply_config(c, c_config);
    apply_config(p, p_config);
    apply_config(r, r_config);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c->parsed()) return run_converge(conv);
    if (p->parsed()) return run_planesource(ps);
    if (r->parsed()) return run_check(chk);
    if (d->parsed()) return run_demo(demo);
  } catch (const Failure& f) {
    std::cerr << "rimex: " << f.message << "\n";
    return 2;
  }
  return 1;
}
