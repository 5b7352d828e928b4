// qtherm command-line front end: figure-data regeneration, parameter sweeps,
// single-point evaluation and the oracle-equivalence selftest. Links only the
// C API of libqtherm.

#include "qtherm.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// formatting

std::string fmt(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  if (std::string(buf) == "-0") return "0";
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << fmt(row[c]);
    out << "\n";
  }
}

void write_metadata(const std::string& csv_path, const json& meta) {
  std::ofstream out(csv_path + ".meta.json", std::ios::binary);
  out << meta.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// scene plumbing

struct SceneDeleter {
  void operator()(qtherm_scene* s) const { qtherm_scene_free(s); }
};
using ScenePtr = std::unique_ptr<qtherm_scene, SceneDeleter>;

[[noreturn]] void fail_numerical(const std::string& where,
                                 const std::string& what) {
  std::cerr << "qtherm: numerical failure at " << where << ": " << what << "\n";
  std::exit(kExitNumerical);
}

void check(qtherm_status status, const std::string& where) {
  if (status != QTHERM_OK) fail_numerical(where, qtherm_last_error());
}

struct PointParams {
  double t1 = 1.0, t2 = 1.0, omega = 1.0, eta = 0.5;
  std::optional<double> s, d, varpi;
  double nu = 1.0;
  int k_max = 10;
  int which = 1;
  double tail_tol = 1e-10;
  qtherm_mu_convention mu_conv = QTHERM_MU_RESOURCE;
  qtherm_beta_exponent beta_exp = QTHERM_BETA_NEGATIVE;
  qtherm_f21_series f21 = QTHERM_F21_STANDARD;

  ScenePtr make_scene() const {
    qtherm_scene* raw = nullptr;
    qtherm_status st = qtherm_scene_new(t1, t2, omega, eta, &raw);
    if (st != QTHERM_OK) throw std::runtime_error(qtherm_last_error());
    ScenePtr scene(raw);
    st = d ? qtherm_scene_set_separation(scene.get(), *d, varpi.value_or(1.0))
           : qtherm_scene_set_overlap(scene.get(), s.value_or(0.0));
    if (st != QTHERM_OK) throw std::runtime_error(qtherm_last_error());
    return scene;
  }
};

// Geometry may be given as s, as (d, varpi), or both; both must agree.
void resolve_geometry(const PointParams& p) {
  if (p.d && p.s) {
    double s_from_d = 0.0;
    if (qtherm_gaussian_overlap(*p.d, p.varpi.value_or(1.0), &s_from_d) !=
        QTHERM_OK)
      throw CLI::ValidationError("geometry", qtherm_last_error());
    if (std::fabs(s_from_d - *p.s) > 1e-9)
      throw CLI::ValidationError(
          "geometry", "both s and (d, varpi) were given but disagree: s = " +
                          fmt(*p.s) + " vs overlap(d, varpi) = " + fmt(s_from_d));
  }
  if (p.varpi && !p.d)
    throw CLI::ValidationError("geometry", "varpi given without d");
}

// Optional sweep-description slots that a config file may fill in when the
// corresponding flags were not given.
struct SweepSlots {
  std::string* quantity = nullptr;
  std::string* axis = nullptr;
  double* from = nullptr;
  double* to = nullptr;
  int* steps = nullptr;
  std::string* output = nullptr;
};

// flat key = value parameter file; explicit command-line flags win
void apply_config(const std::string& path, PointParams& p,
                  const std::map<std::string, bool>& given,
                  const SweepSlots& slots = {}) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  std::string line;
  int lineno = 0;
  auto supplied = [&](const char* name) {
    auto it = given.find(name);
    return it != given.end() && it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw CLI::ValidationError("--config", "line " + std::to_string(lineno) +
                                                   ": expected key = value");
      continue;
    }
    auto trim = [](std::string text) {
      auto begin = text.find_first_not_of(" \t\r");
      auto end = text.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string()
                                        : text.substr(begin, end - begin + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "quantity" || key == "axis" || key == "output") {
      std::string* slot = key == "quantity" ? slots.quantity
                          : key == "axis"   ? slots.axis
                                            : slots.output;
      if (!slot)
        throw CLI::ValidationError("--config", key + " is only valid for sweep");
      if (!supplied(key.c_str())) *slot = value;
      continue;
    }
    double number = 0.0;
    try {
      number = std::stod(value);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--config", "bad value for key " + key);
    }
    if (key == "t1") { if (!supplied("t1")) p.t1 = number; }
    else if (key == "t2") { if (!supplied("t2")) p.t2 = number; }
    else if (key == "omega") { if (!supplied("omega")) p.omega = number; }
    else if (key == "eta") { if (!supplied("eta")) p.eta = number; }
    else if (key == "s") { if (!supplied("s")) p.s = number; }
    else if (key == "d") { if (!supplied("d")) p.d = number; }
    else if (key == "varpi") { if (!supplied("varpi")) p.varpi = number; }
    else if (key == "from") { if (slots.from && !supplied("from")) *slots.from = number;
                              else if (!slots.from) throw CLI::ValidationError("--config", "from is only valid for sweep"); }
    else if (key == "to") { if (slots.to && !supplied("to")) *slots.to = number;
                            else if (!slots.to) throw CLI::ValidationError("--config", "to is only valid for sweep"); }
    else if (key == "steps") { if (slots.steps && !supplied("steps")) *slots.steps = static_cast<int>(number);
                               else if (!slots.steps) throw CLI::ValidationError("--config", "steps is only valid for sweep"); }
    else throw CLI::ValidationError("--config", "unknown key " + key);
  }
}

json conventions_json(const PointParams& p) {
  return json{{"mu_convention", p.mu_conv == QTHERM_MU_RESOURCE ? "resource" : "paper"},
              {"beta_exponent", p.beta_exp == QTHERM_BETA_NEGATIVE ? "negative" : "paper"},
              {"f21_series", p.f21 == QTHERM_F21_STANDARD ? "standard" : "paper"}};
}

json params_json(const PointParams& p) {
  json out{{"t1", p.t1}, {"t2", p.t2}, {"omega", p.omega}, {"eta", p.eta}};
  if (p.s) out["s"] = *p.s;
  if (p.d) out["d"] = *p.d;
  if (p.varpi) out["varpi"] = *p.varpi;
  return out;
}

// ---------------------------------------------------------------------------
// sweep machinery

struct SweepAxis {
  std::string name;
  double from;
  double to;
  int steps;

  double at(int i) const {
    return steps == 1 ? from : from + (to - from) * i / double(steps - 1);
  }
};

PointParams with_axis(const PointParams& base, const std::string& axis,
                      double value) {
  PointParams p = base;
  if (axis == "s") { p.s = value; p.d.reset(); p.varpi.reset(); }
  else if (axis == "d") { p.d = value; p.s.reset(); }
  else if (axis == "t1") p.t1 = value;
  else if (axis == "t2") p.t2 = value;
  else if (axis == "eta") p.eta = value;
  else if (axis == "omega") p.omega = value;
  else throw CLI::ValidationError("--axis", "unknown axis " + axis);
  return p;
}

using PointFn = std::function<std::vector<double>(const PointParams&)>;

// Points are independent pure evaluations: farm them out to a small pool and
// write rows in axis order regardless of completion order.
Table run_parallel_sweep(const PointParams& base, const SweepAxis& axis,
                         const std::vector<std::string>& value_columns,
                         const PointFn& fn) {
  Table table;
  table.columns.push_back(axis.name);
  table.columns.insert(table.columns.end(), value_columns.begin(),
                       value_columns.end());
  table.rows.resize(axis.steps);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_point, error_what;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < axis.steps; i = next++) {
      if (failed) return;
      double x = axis.at(i);
      try {
        std::vector<double> values = fn(with_axis(base, axis.name, x));
        table.rows[i].push_back(x);
        table.rows[i].insert(table.rows[i].end(), values.begin(), values.end());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          error_point = axis.name + " = " + fmt(x);
          error_what = e.what();
        }
        return;
      }
    }
  };
  unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) fail_numerical(error_point, error_what);
  return table;
}

struct QfiMatrixValues {
  double h11, h12, h22;
};

QfiMatrixValues qfi_matrix_of(const qtherm_scene* scene) {
  QfiMatrixValues h{};
  if (qtherm_qfi_matrix(scene, &h.h11, &h.h12, &h.h22, nullptr) != QTHERM_OK)
    throw std::runtime_error(qtherm_last_error());
  return h;
}

struct Quantity {
  std::vector<std::string> columns;
  PointFn fn;
};

Quantity make_quantity(const std::string& name) {
  if (name == "qfi-equal")
    return {{"qfi[1/T^2]", "qfi_low_t[1/T^2]", "qfi_high_t[1/T^2]"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              double qfi = 0, lo = 0, hi = 0;
              if (qtherm_qfi_equal(scene.get(), &qfi, &lo, &hi) != QTHERM_OK)
                throw std::runtime_error(qtherm_last_error());
              return std::vector<double>{qfi, lo, hi};
            }};
  if (name == "qfi-matrix")
    return {{"h11[1/T^2]", "h12[1/T^2]", "h22[1/T^2]", "det[1/T^4]"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              auto h = qfi_matrix_of(scene.get());
              return std::vector<double>{h.h11, h.h12, h.h22,
                                         h.h11 * h.h22 - h.h12 * h.h12};
            }};
  if (name == "mu")
    return {{"mu", "inv_mu", "sim_bound[T^2]", "ind_bound[T^2]"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              double mu = 0, sim = 0, ind = 0;
              if (qtherm_ratio_mu(scene.get(), p.mu_conv, &mu) != QTHERM_OK ||
                  qtherm_simultaneous_bound(scene.get(), p.nu, &sim) != QTHERM_OK ||
                  qtherm_individual_bound(scene.get(), p.nu, &ind) != QTHERM_OK)
                throw std::runtime_error(qtherm_last_error());
              return std::vector<double>{mu, std::isinf(mu) ? 0.0 : 1.0 / mu,
                                         sim, ind};
            }};
  if (name == "prior-gain")
    return {{"f_prior[1/T^2]", "two_h11[1/T^2]", "gain"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              double f = 0, two = 0, gain = 0;
              if (qtherm_prior_gain(scene.get(), &f, &two, &gain) != QTHERM_OK)
                throw std::runtime_error(qtherm_last_error());
              return std::vector<double>{f, two, gain};
            }};
  if (name == "hg-sensitivity")
    return {{"m[1/T^2]", "m_full[1/T^2]", "m_full_over_h11"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              double m = 0, mfull = 0;
              if (qtherm_hg_sensitivity(scene.get(), p.which, p.k_max, &m) != QTHERM_OK ||
                  qtherm_hg_sensitivity_full(scene.get(), p.which, &mfull) != QTHERM_OK)
                throw std::runtime_error(qtherm_last_error());
              auto h = qfi_matrix_of(scene.get());
              double hii = p.which == 1 ? h.h11 : h.h22;
              return std::vector<double>{m, mfull, mfull / hii};
            }};
  if (name == "counting-fi")
    return {{"f11[1/T^2]", "f12[1/T^2]", "f22[1/T^2]", "det[1/T^4]",
             "inv_sim_bound[1/T^2]"},
            [](const PointParams& p) {
              auto scene = p.make_scene();
              double f11 = 0, f12 = 0, f22 = 0;
              if (qtherm_counting_fi_matrix(scene.get(), p.tail_tol, &f11, &f12,
                                            &f22) != QTHERM_OK)
                throw std::runtime_error(qtherm_last_error());
              double det = f11 * f22 - f12 * f12;
              double inv = det <= 0.0 ? 0.0 : det / (p.nu * (f11 + f22));
              return std::vector<double>{f11, f12, f22, det, inv};
            }};
  throw CLI::ValidationError("--quantity", "unknown quantity " + name);
}

// ---------------------------------------------------------------------------
// figures

int run_figure(const std::string& name, std::string output, int steps,
               PointParams base, bool t_given, bool eta_given) {
  if (output.empty()) output = name + ".csv";
  Table table;
  json meta{{"command", "figure " + name},
            {"output", output},
            {"conventions", conventions_json(base)}};
  std::vector<std::string> artifact_defaults;

  auto sweep_s = [&](double s_max, const std::vector<std::string>& cols,
                     const PointFn& fn) {
    SweepAxis axis{"s", 0.0, s_max, steps};
    table = run_parallel_sweep(base, axis, cols, fn);
    meta["axis"] = {{"name", "s"}, {"from", 0.0}, {"to", s_max}, {"steps", steps}};
  };

  if (name == "fig2" || name == "fig3") {
    if (!t_given) base.t1 = 1.0;
    base.t2 = base.t1;
    base.omega = 1.0;
    if (!eta_given) base.eta = 0.5;
    artifact_defaults = {"t1 (caption gives no temperature)", "s grid"};
    if (name == "fig2") {
      sweep_s(1.0, {"qfi[1/T^2]"}, [](const PointParams& p) {
        auto scene = p.make_scene();
        double qfi = 0;
        if (qtherm_qfi_equal(scene.get(), &qfi, nullptr, nullptr) != QTHERM_OK)
          throw std::runtime_error(qtherm_last_error());
        return std::vector<double>{qfi};
      });
    } else {
      sweep_s(1.0, {"f_prior[1/T^2]", "two_h11[1/T^2]", "gain"},
              [](const PointParams& p) {
                auto scene = p.make_scene();
                double f = 0, two = 0, gain = 0;
                if (qtherm_prior_gain(scene.get(), &f, &two, &gain) != QTHERM_OK)
                  throw std::runtime_error(qtherm_last_error());
                return std::vector<double>{f, two, gain};
              });
    }
  } else if (name == "fig4") {
    base.omega = 10.0;
    base.eta = 0.5;
    base.s = 0.5;
    double lo = 2.0, hi = 20.0;
    artifact_defaults = {"temperature grid range [2, 20]"};
    table.columns = {"t1", "t2", "mu"};
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) {
        PointParams p = base;
        p.t1 = lo + (hi - lo) * i / double(steps - 1);
        p.t2 = lo + (hi - lo) * j / double(steps - 1);
        auto scene = p.make_scene();
        double mu = 0;
        if (qtherm_ratio_mu(scene.get(), p.mu_conv, &mu) != QTHERM_OK)
          fail_numerical("t1 = " + fmt(p.t1) + ", t2 = " + fmt(p.t2),
                         qtherm_last_error());
        table.rows.push_back({p.t1, p.t2, mu});
      }
    meta["axis"] = {{"name", "t1 x t2"}, {"from", lo}, {"to", hi}, {"steps", steps}};
  } else if (name == "fig5" || name == "fig6") {
    base.omega = 10.0;
    base.t1 = 8.0;
    base.t2 = 10.0;
    if (name == "fig5") {
      const std::vector<double> etas{0.1, 0.5, 0.9};
      artifact_defaults = {"eta set {0.1, 0.5, 0.9} (caption lists none)",
                           "s capped at 0.999 (mu diverges at s = 1)",
                           "both mu conventions emitted; the figure's choice "
                           "is not determinable from the text"};
      meta["eta_set"] = etas;
      // one column per eta and mu convention
      std::vector<std::string> cols;
      for (double eta : etas) cols.push_back("inv_mu_eta" + fmt(eta));
      for (double eta : etas) cols.push_back("inv_mu_paper_eta" + fmt(eta));
      sweep_s(0.999, cols, [etas](const PointParams& p) {
        std::vector<double> out;
        for (qtherm_mu_convention conv : {QTHERM_MU_RESOURCE, QTHERM_MU_PAPER})
          for (double eta : etas) {
            PointParams q = p;
            q.eta = eta;
            auto scene = q.make_scene();
            double mu = 0;
            if (qtherm_ratio_mu(scene.get(), conv, &mu) != QTHERM_OK)
              throw std::runtime_error(qtherm_last_error());
            out.push_back(std::isinf(mu) ? 0.0 : 1.0 / mu);
          }
        return out;
      });
    } else {
      if (!eta_given) base.eta = 0.5;
      artifact_defaults = {"eta (fig6 inherits fig5's unstated set)"};
      sweep_s(1.0, {"ind_bound[T^2]"}, [](const PointParams& p) {
        auto scene = p.make_scene();
        double ind = 0;
        if (qtherm_individual_bound(scene.get(), p.nu, &ind) != QTHERM_OK)
          throw std::runtime_error(qtherm_last_error());
        return std::vector<double>{ind};
      });
    }
  } else if (name == "fig7") {
    base.omega = 1.0;
    if (!t_given) base.t1 = 1.0;
    base.t2 = base.t1;
    const std::vector<double> etas{0.1, 0.5, 1.0};
    artifact_defaults = {"t2 = t1 (caption does not state gamma)",
                         "eta set {0.1, 0.5, 1.0}", "full HG basis"};
    meta["eta_set"] = etas;
    std::vector<std::string> cols;
    for (double eta : etas) cols.push_back("m_over_h11_eta" + fmt(eta));
    sweep_s(1.0, cols, [etas](const PointParams& p) {
      std::vector<double> out;
      for (double eta : etas) {
        PointParams q = p;
        q.eta = eta;
        auto scene = q.make_scene();
        double m = 0;
        if (qtherm_hg_sensitivity_full(scene.get(), 1, &m) != QTHERM_OK)
          throw std::runtime_error(qtherm_last_error());
        auto h = qfi_matrix_of(scene.get());
        out.push_back(m / h.h11);
      }
      return out;
    });
  } else if (name == "fig8") {
    base.omega = 1.0;
    if (!eta_given) base.eta = 0.5;
    const std::vector<std::pair<double, double>> pairs{
        {0.8, 1.2}, {1.0, 1.5}, {0.5, 2.0}};
    artifact_defaults = {"temperature pairs (caption lists none)"};
    meta["temperature_pairs"] = json::array();
    std::vector<std::string> cols;
    for (auto& [a, b] : pairs) {
      cols.push_back("inv_sim_t1_" + fmt(a) + "_t2_" + fmt(b));
      meta["temperature_pairs"].push_back({a, b});
    }
    sweep_s(1.0, cols, [pairs](const PointParams& p) {
      std::vector<double> out;
      for (auto& [a, b] : pairs) {
        PointParams q = p;
        q.t1 = a;
        q.t2 = b;
        auto scene = q.make_scene();
        double f11 = 0, f12 = 0, f22 = 0;
        if (qtherm_counting_fi_matrix(scene.get(), q.tail_tol, &f11, &f12,
                                      &f22) != QTHERM_OK)
          throw std::runtime_error(qtherm_last_error());
        double det = f11 * f22 - f12 * f12;
        out.push_back(det <= 0.0 ? 0.0 : det / (f11 + f22));
      }
      return out;
    });
  } else {
    throw CLI::ValidationError("figure", "unknown figure " + name +
                                             " (expected fig2..fig8)");
  }

  write_csv(output, table);
  meta["parameters"] = params_json(base);
  meta["artifact_defaults"] = artifact_defaults;
  meta["columns"] = table.columns;
  write_metadata(output, meta);
  std::cout << output << ": " << table.rows.size() << " rows\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const PointParams& p) {
  auto scene = p.make_scene();
  json out;
  double chi1 = 0, chi2 = 0, gamma = 0, n = 0;
  check(qtherm_derived_params(scene.get(), &chi1, &chi2, &gamma, &n), "eval");
  out["derived"] = {{"chi1", chi1}, {"chi2", chi2}, {"gamma", gamma},
                    {"n_total", n}};
  double s = 0;
  check(qtherm_overlap(scene.get(), &s), "eval");
  out["geometry"] = {{"s", s}};
  if (p.d) out["geometry"]["d"] = *p.d;
  if (p.varpi) out["geometry"]["varpi"] = *p.varpi;
  double np = 0, nm = 0;
  check(qtherm_mode_occupations(scene.get(), &np, &nm), "eval");
  out["image_state"] = {{"n_plus", np}, {"n_minus", nm}};
  double qfi = 0, lo = 0, hi = 0;
  check(qtherm_qfi_equal(scene.get(), &qfi, &lo, &hi), "eval");
  out["equal_temp"] = {{"qfi", qfi}, {"qfi_low_t", lo}, {"qfi_high_t", hi}};
  auto h = qfi_matrix_of(scene.get());
  out["qfi_matrix"] = {{"h11", h.h11}, {"h12", h.h12}, {"h22", h.h22},
                       {"det", h.h11 * h.h22 - h.h12 * h.h12}};
  if (s < 1.0) {
    double w = 0;
    check(qtherm_weak_commutation(scene.get(), &w), "eval");
    out["weak_commutation"] = w;
  }
  double sim = 0, ind = 0, mu = 0;
  check(qtherm_simultaneous_bound(scene.get(), p.nu, &sim), "eval");
  check(qtherm_individual_bound(scene.get(), p.nu, &ind), "eval");
  check(qtherm_ratio_mu(scene.get(), p.mu_conv, &mu), "eval");
  out["bounds"] = {{"nu", p.nu},
                   {"simultaneous", std::isinf(sim) ? json("inf") : json(sim)},
                   {"individual", ind},
                   {"mu", std::isinf(mu) ? json("inf") : json(mu)}};
  if (std::isinf(sim))
    out["bounds"]["note"] = "maximum diffraction: no simultaneous information";
  double f = 0, two = 0, gain = 0;
  check(qtherm_prior_gain(scene.get(), &f, &two, &gain), "eval");
  out["prior_gain"] = {{"f_prior", f}, {"two_h11", two}, {"gain", gain}};
  double m = 0, mfull = 0;
  check(qtherm_hg_sensitivity(scene.get(), p.which, p.k_max, &m), "eval");
  check(qtherm_hg_sensitivity_full(scene.get(), p.which, &mfull), "eval");
  out["hg_sensitivity"] = {{"which", p.which}, {"k_max", p.k_max}, {"m", m},
                           {"m_full", mfull}};
  double f11 = 0, f12 = 0, f22 = 0;
  check(qtherm_counting_fi_matrix(scene.get(), p.tail_tol, &f11, &f12, &f22),
        "eval");
  out["counting_fi"] = {{"f11", f11}, {"f12", f12}, {"f22", f22},
                        {"tail_tol", p.tail_tol}};
  out["conventions"] = conventions_json(p);
  out["parameters"] = params_json(p);
  std::cout << out.dump(2) << "\n";
  return 0;
}

void add_point_options(CLI::App* cmd, PointParams& p, std::string& config_path) {
  cmd->add_option("--t1", p.t1, "temperature of source 1");
  cmd->add_option("--t2", p.t2, "temperature of source 2");
  cmd->add_option("--omega", p.omega, "optical angular frequency");
  cmd->add_option("--eta", p.eta, "attenuation factor in (0, 1]");
  cmd->add_option_function<double>("--s", [&p](double v) { p.s = v; },
                                   "overlap s in [0, 1]");
  cmd->add_option_function<double>("--d", [&p](double v) { p.d = v; },
                                   "source separation");
  cmd->add_option_function<double>("--varpi", [&p](double v) { p.varpi = v; },
                                   "Gaussian PSF width (with --d)");
  cmd->add_option("--nu", p.nu, "number of measurement repetitions");
  cmd->add_option("--k", p.k_max, "highest HG mode index");
  cmd->add_option("--which", p.which, "temperature index for sensitivities");
  cmd->add_option("--tail-tol", p.tail_tol, "photon-counting truncation tolerance");
  cmd->add_option("--config", config_path, "flat key = value parameter file");
  cmd->add_option("--mu-convention", p.mu_conv, "mu normalization")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, qtherm_mu_convention>{
              {"resource", QTHERM_MU_RESOURCE}, {"paper", QTHERM_MU_PAPER}},
          CLI::ignore_case));
  cmd->add_option("--beta-exponent", p.beta_exp, "HG coefficient exponent sign")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, qtherm_beta_exponent>{
              {"negative", QTHERM_BETA_NEGATIVE}, {"paper", QTHERM_BETA_PAPER}},
          CLI::ignore_case));
  cmd->add_option("--f21-series", p.f21, "hypergeometric series variant")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, qtherm_f21_series>{
              {"standard", QTHERM_F21_STANDARD}, {"paper", QTHERM_F21_PAPER}},
          CLI::ignore_case));
}

std::map<std::string, bool> given_map(const CLI::App* cmd) {
  std::map<std::string, bool> out;
  for (const char* name : {"t1", "t2", "omega", "eta", "s", "d", "varpi"})
    out[name] = cmd->count(std::string("--") + name) > 0;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precision limits for two-source thermometry under diffraction"};
  app.require_subcommand(1);

  auto* figure = app.add_subcommand("figure", "regenerate data for one figure");
  std::string figure_name;
  figure->add_option("name", figure_name, "fig2..fig8")->required();
  std::string figure_out;
  figure->add_option("-o,--output", figure_out, "output CSV path");
  int figure_steps = 0;
  figure->add_option("--steps", figure_steps, "points along the sweep axis");
  PointParams figure_params;
  auto* fig_t = figure->add_option("--t", figure_params.t1,
                                   "temperature for fig2/fig3/fig7");
  auto* fig_eta = figure->add_option("--eta", figure_params.eta,
                                     "attenuation for fig2/fig3/fig6/fig8");

  auto* sweep = app.add_subcommand("sweep", "tabulate a quantity along one axis");
  std::string quantity, axis_name = "s", sweep_out = "sweep.csv", sweep_config;
  double axis_from = std::nan(""), axis_to = std::nan("");
  int axis_steps = 51;
  sweep->add_option("--quantity", quantity,
                    "qfi-equal | qfi-matrix | mu | prior-gain | hg-sensitivity "
                    "| counting-fi");
  sweep->add_option("--axis", axis_name, "swept parameter (s, d, t1, t2, eta, omega)");
  sweep->add_option("--from", axis_from, "axis start");
  sweep->add_option("--to", axis_to, "axis end");
  sweep->add_option("--steps", axis_steps, "number of points (>= 2)");
  sweep->add_option("-o,--output", sweep_out, "output CSV path");
  PointParams sweep_params;
  add_point_options(sweep, sweep_params, sweep_config);

  auto* eval = app.add_subcommand("eval",
                                  "evaluate everything at one point, JSON to stdout");
  PointParams eval_params;
  std::string eval_config;
  add_point_options(eval, eval_params, eval_config);

  auto* selftest = app.add_subcommand("selftest", "run the oracle-equivalence suite");
  bool quiet = false;
  selftest->add_flag("-q,--quiet", quiet, "only print failures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (figure->parsed()) {
      if (figure_steps <= 0) figure_steps = (figure_name == "fig4") ? 41 : 101;
      if (figure_steps < 2)
        throw CLI::ValidationError("--steps", "need at least 2");
      return run_figure(figure_name, figure_out, figure_steps, figure_params,
                        fig_t->count() > 0, fig_eta->count() > 0);
    }
    if (sweep->parsed()) {
      if (!sweep_config.empty()) {
        auto given = given_map(sweep);
        for (const char* name : {"quantity", "axis", "from", "to", "steps", "output"})
          given[name] = sweep->count(std::string("--") + name) > 0;
        given["output"] = given["output"] || sweep->count("-o") > 0;
        SweepSlots slots{&quantity, &axis_name, &axis_from, &axis_to,
                         &axis_steps, &sweep_out};
        apply_config(sweep_config, sweep_params, given, slots);
      }
      if (quantity.empty())
        throw CLI::ValidationError("--quantity", "required (flag or config)");
      if (std::isnan(axis_from) || std::isnan(axis_to))
        throw CLI::ValidationError("--from/--to", "axis range required (flag or config)");
      resolve_geometry(sweep_params);
      if (axis_steps < 2)
        throw CLI::ValidationError("--steps", "need at least 2");
      Quantity q = make_quantity(quantity);
      SweepAxis axis{axis_name, axis_from, axis_to, axis_steps};
      Table table = run_parallel_sweep(sweep_params, axis, q.columns, q.fn);
      write_csv(sweep_out, table);
      json meta{{"command", "sweep"},
                {"quantity", quantity},
                {"output", sweep_out},
                {"axis", {{"name", axis_name}, {"from", axis_from},
                          {"to", axis_to}, {"steps", axis_steps}}},
                {"fixed", {{"nu", sweep_params.nu}, {"k_max", sweep_params.k_max},
                           {"which", sweep_params.which},
                           {"tail_tol", sweep_params.tail_tol}}},
                {"conventions", conventions_json(sweep_params)},
                {"parameters", params_json(sweep_params)},
                {"columns", table.columns}};
      write_metadata(sweep_out, meta);
      std::cout << sweep_out << ": " << table.rows.size() << " rows\n";
      return 0;
    }
    if (eval->parsed()) {
      if (!eval_config.empty())
        apply_config(eval_config, eval_params, given_map(eval));
      resolve_geometry(eval_params);
      return run_eval(eval_params);
    }
    if (selftest->parsed()) {
      int failures = 0;
      if (qtherm_selftest(quiet ? 0 : 1, &failures) != QTHERM_OK)
        fail_numerical("selftest", qtherm_last_error());
      if (failures == 0) {
        std::cout << "selftest: all checks passed\n";
        return 0;
      }
      std::cerr << "selftest: " << failures << " check(s) failed\n";
      return kExitNumerical;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "qtherm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qtherm: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
