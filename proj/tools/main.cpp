// clockback command-line front end. Links only the C interface.

#include <clockback/clockback.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using cbcli::RunConfig;

namespace {

enum Exit { kOk = 0, kFailed = 1, kBadConfig = 2, kIo = 3 };

// A failing library call, carrying the exit code it maps to.
struct CallError {
  int exit_code;
  std::string message;
};

void check(cb_status s, const char* what) {
  if (s == CB_OK) return;
  int code = kFailed;
  if (s == CB_ERR_INVALID_ARGUMENT || s == CB_ERR_DOMAIN) code = kBadConfig;
  if (s == CB_ERR_IO) code = kIo;
  throw CallError{code, std::string(what) + ": " + cb_status_name(s) + ": " + cb_last_error()};
}

cb_clock_spec clock_of(const RunConfig& c) {
  return {c.real("clock.mass"), c.real("clock.mean_momentum"), c.real("clock.position_spread")};
}

cb_barrier barrier_of(const RunConfig& c) {
  return {c.real("barrier.lambda"), c.real("barrier.width"), c.real("barrier.pointer_coordinate"),
          c.real("barrier.eigenvalue"), c.real("clock.mass")};
}

cb_pointer_method method_of(const RunConfig& c) {
  return c.flag("run.oracle") ? CB_QUADRATURE : CB_CLOSED_FORM;
}

fs::path out_dir(const RunConfig& c) {
  const fs::path dir = c.text("run.out");
  cbcli::ensure_dir(dir);
  return dir;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// One normalized pointer curve; returns its summary.
json pointer_curve(const RunConfig& c, double alpha, double Delta, const fs::path& file) {
  cb_pointer* p = nullptr;
  check(cb_pointer_create(alpha, Delta, c.count("pointer.points"), method_of(c), &p), "pointer");
  const std::size_t n = cb_pointer_size(p);
  std::vector<double> P(n), re(n), im(n);
  double norm = 0, mean = 0, sd = 0, skew = 0;
  const cb_status s1 = cb_pointer_data(p, P.data(), re.data(), im.data());
  const cb_status s2 = cb_pointer_moments(p, &norm, &mean, &sd, &skew);
  cb_pointer_destroy(p);
  check(s1, "pointer data");
  check(s2, "pointer moments");

  const double scale = 1.0 / std::sqrt(norm);
  cbcli::CsvWriter csv({"P", "re_chi", "im_chi", "abs2"});
  for (std::size_t i = 0; i < n; ++i) {
    const double a = re[i] * scale;
    const double b = im[i] * scale;
    csv.row({P[i], a, b, a * a + b * b});
  }
  cbcli::write_file(file, csv.str());
  json j;
  j["alpha"] = alpha;
  j["Delta"] = Delta;
  j["file"] = file.filename().string();
  j["points"] = n;
  j["raw_norm"] = norm;
  j["mean"] = mean;
  j["std"] = sd;
  j["skewness"] = skew;
  return j;
}

int cmd_figure(const RunConfig& c, const std::string& name) {
  const double Delta = c.real(name + ".resolution");
  const auto alphas = c.reals(name + ".alphas");
  if (alphas.empty()) throw cbcli::ConfigError(name + ".alphas must not be empty");
  const fs::path dir = out_dir(c);
  json summary;
  summary["figure"] = name;
  summary["method"] = c.flag("run.oracle") ? "quadrature" : "closed_form";
  summary["curves"] = json::array();
  for (double a : alphas) {
    const fs::path file = dir / (name + "_alpha_" + cbcli::short_real(a) + ".csv");
    summary["curves"].push_back(pointer_curve(c, a, Delta, file));
  }
  cbcli::write_file(dir / (name + "_summary.json"), summary.dump(2) + "\n");
  print(summary);
  return kOk;
}

int cmd_transmission_sweep(const RunConfig& c) {
  const double k_min = c.real("sweep.k_min");
  const double k_max = c.real("sweep.k_max");
  const std::size_t nk = c.count("sweep.k_points");
  if (!(k_min > 0.0) || k_max < k_min || nk == 0)
    throw cbcli::ConfigError("sweep needs 0 < k_min <= k_max and k_points >= 1");
  const auto widths = c.reals("sweep.widths");
  const auto qs = c.reals("sweep.pointer_coordinates");
  const cb_barrier base = barrier_of(c);

  struct Point {
    double k;
    cb_barrier b;
  };
  std::vector<Point> points;
  for (double w : widths) {
    for (double q : qs) {
      for (std::size_t i = 0; i < nk; ++i) {
        const double k =
            nk == 1 ? k_min : k_min + (k_max - k_min) * static_cast<double>(i) / (nk - 1.0);
        cb_barrier b = base;
        b.width = w;
        b.pointer_coordinate = q;
        points.push_back({k, b});
      }
    }
  }

  std::vector<cb_amplitudes> amps(points.size());
  std::vector<cb_status> status(points.size(), CB_OK);
  std::vector<std::string> messages(points.size());
  const std::size_t workers = std::clamp<std::size_t>(cb_max_threads(), 1, points.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += workers) {
          status[i] = cb_barrier_amplitudes(points[i].k, &points[i].b, &amps[i]);
          if (status[i] != CB_OK) messages[i] = cb_last_error();
        }
      });
    }
  }

  cbcli::CsvWriter csv(
      {"k", "V", "X0", "re_T", "im_T", "abs2_T", "abs2_R", "unitarity_defect"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (status[i] != CB_OK) {
      const int code = status[i] == CB_ERR_INVALID_ARGUMENT || status[i] == CB_ERR_DOMAIN
                           ? kBadConfig
                           : kFailed;
      throw CallError{code, "transmission at k = " + cbcli::short_real(points[i].k) + ": " +
                                messages[i]};
    }
    const cb_barrier& b = points[i].b;
    const double strength = b.lambda * b.pointer_coordinate * b.eigenvalue;
    const double V = b.width > 0.0 ? strength / b.width : strength;
    const auto& a = amps[i];
    csv.row({a.k, V, b.width, a.re_T, a.im_T, a.abs2_T, a.abs2_R, a.unitarity_defect});
  }
  const fs::path file = out_dir(c) / "transmission_sweep.csv";
  cbcli::write_file(file, csv.str());
  json j;
  j["file"] = file.filename().string();
  j["rows"] = points.size();
  print(j);
  return kOk;
}

int cmd_regime_classify(const RunConfig& c) {
  cb_scenario s{};
  s.clock = clock_of(c);
  s.barrier = barrier_of(c);
  s.resolution = c.real("pointer.resolution");
  s.mean_J = c.real("scenario.mean_j");
  s.delta_J = c.real("scenario.delta_j");
  s.omega = c.real("scenario.omega");
  s.ground_energy = c.real("scenario.ground_energy");
  const double k = c.real("scenario.momentum") > 0.0 ? c.real("scenario.momentum")
                                                      : s.clock.mean_momentum;
  cb_regime_report r{};
  check(cb_regime_classify(&s, k, &r), "regime-classify");
  json j;
  j["regime"] = cb_regime_name(r.regime);
  j["figures_of_merit"] = {{"qX0", r.q_width},
                           {"alpha_over_Delta", r.alpha_over_delta},
                           {"EC_deltaT", r.energy_time},
                           {"omega_deltaT", r.omega_time}};
  j["bound_satisfied"] = r.bound_satisfied != 0;
  j["deltaT"] = r.duration;
  print(j);
  return kOk;
}

int cmd_clock_quality(const RunConfig& c) {
  const cb_clock_spec clock = clock_of(c);
  cb_clock_quality q{};
  check(cb_clock_quality_eval(&clock, &q), "clock-quality");
  json j;
  j["mass"] = clock.mass;
  j["mean_momentum"] = clock.mean_momentum;
  j["position_spread"] = clock.position_spread;
  j["momentum_spread"] = q.momentum_spread;
  j["dtau0"] = q.dtau0;
  j["usable_time"] = q.usable_time;
  j["quality_ratio"] = q.quality_ratio;
  j["energy_ratio"] = q.energy_ratio;
  j["commutator_deviation"] = q.commutator_deviation;
  j["good_clock"] = q.good_clock != 0;
  print(j);
  return kOk;
}

json matrix_json(const std::vector<double>& re, const std::vector<double>& im, std::size_t n) {
  json jr = json::array();
  json ji = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json rr = json::array();
    json ii = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      rr.push_back(re[i * n + k] + 0.0);
      ii.push_back(im[i * n + k] + 0.0);
    }
    jr.push_back(rr);
    ji.push_back(ii);
  }
  return {{"re", jr}, {"im", ji}};
}

int cmd_purity(const RunConfig& c) {
  const auto eig = c.reals("system.eigenvalues");
  const auto are = c.reals("system.amplitudes_re");
  auto aim = c.reals("system.amplitudes_im");
  if (aim.empty()) aim.assign(are.size(), 0.0);
  if (eig.size() != are.size() || eig.size() != aim.size())
    throw cbcli::ConfigError("system eigenvalues and amplitudes differ in length");
  const cb_momentum_state m{c.real("momentum.mean_k"), c.real("momentum.sigma_k"),
                            c.real("momentum.offset")};
  const double P0 = c.real("system.p0");
  cb_postselection* s = nullptr;
  check(cb_post_select(eig.data(), are.data(), aim.data(), eig.size(), P0, &m,
                       c.real("clock.mass"), c.real("run.tol"), &s),
        "purity");
  const std::size_t n = cb_postselection_dimension(s);
  std::vector<double> be(n), bre(n), bim(n), gre(n * n), gim(n * n), rre(n * n), rim(n * n);
  cb_postselection_branch(s, be.data(), bre.data(), bim.data());
  cb_postselection_gram(s, gre.data(), gim.data());
  cb_postselection_rho(s, rre.data(), rim.data());
  const double purity = cb_postselection_purity(s);
  const double prob = cb_postselection_branch_probability(s);
  cb_postselection_destroy(s);

  json j;
  j["eigenvalues"] = be;
  for (auto& v : bim) v += 0.0;
  j["amplitudes"] = {{"re", bre}, {"im", bim}};
  j["P0"] = P0;
  j["gram"] = matrix_json(gre, gim, n);
  j["rho"] = matrix_json(rre, rim, n);
  j["purity"] = purity;
  j["branch_probability"] = prob;
  print(j);
  return kOk;
}

int cmd_validate(const RunConfig& c) {
  cb_validation* v = nullptr;
  check(cb_validate(c.flag("validate.include_propagator") ? 1 : 0,
                    c.count("validate.unitarity_samples"), c.count("validate.seed"), &v),
        "validate");
  json checks = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < cb_validation_count(v); ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    double measured = 0, threshold = 0;
    cb_validation_check(v, i, &name, &passed, &measured, &threshold, &detail);
    json e = {{"name", name},
              {"passed", passed != 0},
              {"measured", measured},
              {"threshold", threshold},
              {"detail", detail}};
    if (!passed) failures.push_back(e);
    checks.push_back(std::move(e));
  }
  cb_validation_destroy(v);
  json j;
  j["passed"] = failures.empty();
  j["checks"] = checks;
  if (!failures.empty()) j["failures"] = failures;
  print(j);
  return failures.empty() ? kOk : kFailed;
}

int cmd_propagate(const RunConfig& c) {
  const cb_clock_spec clock = clock_of(c);
  const cb_barrier barrier = barrier_of(c);
  cb_propagate_options o{};
  o.x0 = c.real("propagate.x0");
  o.total_time = c.real("propagate.total_time");
  o.dt = c.real("propagate.dt");
  o.grid_points = c.count("propagate.grid_points");
  o.half_width = c.real("propagate.half_width");
  o.leak_tolerance = c.real("propagate.leak_tolerance");
  const auto snaps = c.reals("propagate.snapshots");
  const fs::path dir = out_dir(c);

  cb_propagation* p = nullptr;
  check(cb_propagate(&clock, &barrier, &o, snaps.data(), snaps.size(), &p), "propagate");
  json j;
  const double t = cb_propagation_transmitted(p);
  j["transmitted"] = std::isnan(t) ? json(nullptr) : json(t);
  j["norm_defect"] = cb_propagation_norm_defect(p);
  j["energy_drift"] = cb_propagation_energy_drift(p);
  if (barrier.width > 0.0) {
    const double sigma_k = 0.5 / clock.position_spread;
    double oracle = 0.0;
    if (cb_averaged_transmission(clock.mean_momentum, sigma_k, &barrier, &oracle) == CB_OK)
      j["stationary_transmission"] = oracle;
  }
  j["snapshots"] = json::array();
  const std::size_t n = cb_propagation_grid_points(p);
  std::vector<double> x(n), re(n), im(n);
  try {
    for (std::size_t i = 0; i < cb_propagation_snapshot_count(p); ++i) {
      check(cb_propagation_snapshot(p, i, x.data(), re.data(), im.data()), "snapshot");
      cbcli::CsvWriter csv({"x", "re_psi", "im_psi", "abs2"});
      for (std::size_t k = 0; k < n; ++k) csv.row({x[k], re[k], im[k], re[k] * re[k] + im[k] * im[k]});
      const double time = cb_propagation_snapshot_time(p, i);
      const fs::path file = dir / ("snapshot_t_" + cbcli::short_real(time) + ".csv");
      cbcli::write_file(file, csv.str());
      j["snapshots"].push_back({{"t", time}, {"file", file.filename().string()}});
    }
  } catch (...) {
    cb_propagation_destroy(p);
    throw;
  }
  cb_propagation_destroy(p);
  cbcli::write_file(dir / "propagate_summary.json", j.dump(2) + "\n");
  print(j);
  return kOk;
}

void apply_threads_env() {
  const char* env = std::getenv("CLOCKBACK_THREADS");
  if (!env || !*env) return;
  try {
    const double v = cbcli::parse_real(env);
    if (v < 1.0 || v != std::floor(v)) throw cbcli::ConfigError("");
    cb_set_max_threads(static_cast<unsigned>(v));
  } catch (const cbcli::ConfigError&) {
    throw cbcli::ConfigError(std::string("CLOCKBACK_THREADS must be a positive integer, got '") +
                             env + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clockback: clock back-reaction on quantum measurements"};
  app.allow_extras();
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  double tol = 0.0;
  bool oracle = false;
  std::vector<double> snapshots;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out, "output directory");
  app.add_option("--tol", tol, "quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--oracle", oracle, "use quadrature instead of the closed form");
  app.add_option("--snapshots", snapshots, "propagate: snapshot times")->delimiter(',');
  app.footer("Any config key can be overridden as --section.key=value.");

  const std::vector<std::string> commands = {"figure3",      "figure4",         "transmission-sweep",
                                             "regime-classify", "clock-quality", "purity",
                                             "validate",     "propagate"};
  for (const auto& name : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }

  try {
    apply_threads_env();
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& arg : app.remaining()) {
      const auto eq = arg.find('=');
      if (arg.rfind("--", 0) != 0 || eq == std::string::npos)
        throw cbcli::ConfigError("unexpected argument '" + arg + "' (overrides are --section.key=value)");
      cfg.set(arg.substr(2, eq - 2), arg.substr(eq + 1));
    }
    if (!out.empty()) cfg.set("run.out", out);
    if (tol > 0.0) cfg.set("run.tol", cbcli::format_real(tol));
    if (oracle) cfg.set("run.oracle", "true");
    if (!snapshots.empty()) {
      std::string list;
      for (double t : snapshots) list += (list.empty() ? "" : ",") + cbcli::format_real(t);
      cfg.set("propagate.snapshots", list);
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "figure3") return cmd_figure(cfg, "figure3");
    if (cmd == "figure4") return cmd_figure(cfg, "figure4");
    if (cmd == "transmission-sweep") return cmd_transmission_sweep(cfg);
    if (cmd == "regime-classify") return cmd_regime_classify(cfg);
    if (cmd == "clock-quality") return cmd_clock_quality(cfg);
    if (cmd == "purity") return cmd_purity(cfg);
    if (cmd == "validate") return cmd_validate(cfg);
    if (cmd == "propagate") return cmd_propagate(cfg);
    return kBadConfig;
  } catch (const cbcli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const cbcli::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const CallError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
