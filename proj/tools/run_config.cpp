#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pasi/measure.hpp"
#include "pasi/susy_core.hpp"
#include "pasi/thermal.hpp"

namespace pasi::cli {

const char* const kVersion = "1.0.0";

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& v, const std::string& field, std::size_t line) {
  double d = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(d))
    throw ConfigError(line, field, "expected a finite real, got '" + v + "'");
  return d;
}

std::size_t parse_count(const std::string& v, const std::string& field, std::size_t line) {
  std::size_t n = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), n);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(line, field, "expected a non-negative integer, got '" + v + "'");
  return n;
}

std::string real_text(double d) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
  return s;
}

struct Field {
  const char* name;
  std::function<void(RunConfig&, const std::string&, std::size_t)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PASI_REAL(key)                                                                                   \
  Field {                                                                                                \
    #key, [](RunConfig& c, const std::string& v, std::size_t ln) { c.key = parse_real(v, #key, ln); }, \
        [](const RunConfig& c) { return real_text(c.key); }                                              \
  }
#define PASI_COUNT(key)                                                                                   \
  Field {                                                                                                 \
    #key, [](RunConfig& c, const std::string& v, std::size_t ln) { c.key = parse_count(v, #key, ln); }, \
        [](const RunConfig& c) { return std::to_string(c.key); }                                          \
  }
#define PASI_TEXT(key)                                                                   \
  Field {                                                                                \
    #key, [](RunConfig& c, const std::string& v, std::size_t) { c.key = v; },            \
        [](const RunConfig& c) { return c.key; }                                         \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      PASI_REAL(l),
      PASI_REAL(l_prime),
      PASI_REAL(a),
      PASI_TEXT(choice),
      PASI_REAL(alpha),
      PASI_REAL(kappa),
      Field{"m_list",
            [](RunConfig& c, const std::string& v, std::size_t ln) {
              c.m_list.clear();
              for (const auto& s : split_list(v)) c.m_list.push_back(parse_count(s, "m_list", ln));
            },
            [](const RunConfig& c) { return join(c.m_list, [](std::size_t m) { return std::to_string(m); }); }},
      PASI_REAL(x_min),
      PASI_REAL(x_max),
      PASI_COUNT(x_points),
      PASI_REAL(z_re),
      PASI_REAL(z_im),
      PASI_COUNT(n_min),
      PASI_COUNT(n_max),
      Field{"beta_list",
            [](RunConfig& c, const std::string& v, std::size_t ln) {
              c.beta_list.clear();
              for (const auto& s : split_list(v)) c.beta_list.push_back(parse_real(s, "beta_list", ln));
            },
            [](const RunConfig& c) { return join(c.beta_list, real_text); }},
      PASI_COUNT(truncation),
      PASI_REAL(tol),
      PASI_TEXT(format),
      PASI_TEXT(out),
  };
  return f;
}

#undef PASI_REAL
#undef PASI_COUNT
#undef PASI_TEXT

std::vector<double> x_grid(const RunConfig& cfg) {
  std::vector<double> xs;
  if (cfg.x_points == 1) return {cfg.x_max};
  for (std::size_t j = 0; j < cfg.x_points; ++j)
    xs.push_back(cfg.x_min + (cfg.x_max - cfg.x_min) * static_cast<double>(j) / static_cast<double>(cfg.x_points - 1));
  return xs;
}

double pick_tol(const RunConfig& cfg, double fallback) { return cfg.tol > 0.0 ? cfg.tol : fallback; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Table new_table(std::string command, std::vector<std::string> columns) {
  Table t;
  t.command = std::move(command);
  t.columns = std::move(columns);
  return t;
}

nlohmann::ordered_json meta_json(const Table& t, const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["command"] = t.command;
  m["version"] = kVersion;
  m["ok"] = t.ok;
  m["skipped"] = t.skipped;
  m["notes"] = t.notes;
  m["config"] = config_json(cfg);
  return m;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& field, const std::string& msg)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) + "field '" + field +
                         "': " + msg),
      line_(line),
      field_(field) {}

cs::ZChoice RunConfig::z_choice() const {
  return choice == "gamma" ? cs::ZChoice::gamma_weighted(kappa, alpha) : cs::ZChoice::phase_only(alpha);
}

void RunConfig::validate() const {
  if (!(l >= 1.5)) throw ConfigError(0, "l", "must be >= 1.5");
  if (!(l_prime >= 1.5)) throw ConfigError(0, "l_prime", "must be >= 1.5");
  if (!(a > 0.0)) throw ConfigError(0, "a", "must be > 0");
  if (choice != "phase" && choice != "gamma") throw ConfigError(0, "choice", "must be 'phase' or 'gamma'");
  if (choice == "gamma" && std::abs(kappa - 1.0 / a) > 1e-12 * std::max(1.0, kappa))
    throw ConfigError(0, "kappa", "gamma choice needs kappa = 1 / a");
  if (!(x_min > 0.0)) throw ConfigError(0, "x_min", "must be > 0");
  if (!(x_max >= x_min)) throw ConfigError(0, "x_max", "must be >= x_min");
  if (choice == "gamma" && z_re * z_re + z_im * z_im >= 1.0) throw ConfigError(0, "z_re", "gamma choice needs |z| < 1");
  for (double b : beta_list)
    if (!(b > 0.0)) throw ConfigError(0, "beta_list", "entries must be > 0");
  if (!(tol >= 0.0)) throw ConfigError(0, "tol", "must be >= 0");
  if (format != "csv" && format != "json") throw ConfigError(0, "format", "must be 'csv' or 'json'");
}

std::string emit_config(const RunConfig& cfg) {
  std::string s;
  for (const auto& f : fields()) s += std::string(f.name) + " = " + f.get(cfg) + "\n";
  return s;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, const Field*> by_name;
  for (const auto& f : fields()) by_name[f.name] = &f;
  std::stringstream ss(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, trim(body), "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError(line, key, "unknown key");
    it->second->set(cfg, value, line);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["l"] = cfg.l;
  j["l_prime"] = cfg.l_prime;
  j["a"] = cfg.a;
  j["choice"] = cfg.choice;
  j["alpha"] = cfg.alpha;
  j["kappa"] = cfg.kappa;
  j["m_list"] = cfg.m_list;
  j["x_min"] = cfg.x_min;
  j["x_max"] = cfg.x_max;
  j["x_points"] = cfg.x_points;
  j["z_re"] = cfg.z_re;
  j["z_im"] = cfg.z_im;
  j["n_min"] = cfg.n_min;
  j["n_max"] = cfg.n_max;
  j["beta_list"] = cfg.beta_list;
  j["truncation"] = cfg.truncation;
  j["tol"] = cfg.tol;
  j["format"] = cfg.format;
  j["out"] = cfg.out;
  return j;
}

Table cmd_spectrum(const RunConfig& cfg) {
  Table t = new_table("spectrum", {"n", "E_partial", "E_closed", "abs_diff"});
  const PTParams p = cfg.params();
  const double tol = pick_tol(cfg, 1e-12);
  if (cfg.n_min > cfg.n_max) return t;
  const auto e = susy::spectrum(parameter_chain(p), cfg.n_max).energies;
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    const double closed = energy(p, n);
    const double diff = std::abs(e[n] - closed);
    t.rows.push_back({static_cast<double>(n), e[n], closed, diff});
    if (diff > tol * std::max(1.0, std::abs(closed))) t.ok = false;
  }
  return t;
}

Table cmd_coeffs(const RunConfig& cfg) {
  Table t = new_table("coeffs", {"m", "n", "mod2_raw", "mod2_closed", "phase_raw", "phase_closed", "rel_err"});
  const PTParams p = cfg.params();
  const auto c = cfg.z_choice();
  const double tol = pick_tol(cfg, 1e-10);
  for (std::size_t m : cfg.m_list) {
    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
      const auto raw = cs::coefficient_raw(c, p, m, n);
      const auto closed = cs::coefficient_closed(c, p, m, n);
      const double err = std::max(std::abs(raw.mod2() / closed.mod2() - 1.0),
                                  std::abs(raw.phase - closed.phase) / std::max(1.0, std::abs(closed.phase)));
      t.rows.push_back({static_cast<double>(m), static_cast<double>(n), raw.mod2(), closed.mod2(), raw.phase,
                        closed.phase, err});
      if (!(err <= tol)) t.ok = false;
    }
  }
  return t;
}

Table cmd_state(const RunConfig& cfg) {
  Table t = new_table("state", {"m", "k", "abs2", "phase"});
  const PTParams p = cfg.params();
  const auto c = cfg.z_choice();
  const double tol = pick_tol(cfg, 1e-10);
  for (std::size_t m : cfg.m_list) {
    const auto s = cs::state_coefficients(c, p, {cfg.z_re, cfg.z_im}, m, cfg.truncation);
    double total = 0.0;
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
      const double w = std::norm(s.coeffs[k]);
      total += w;
      t.rows.push_back({static_cast<double>(m), static_cast<double>(k), w, std::arg(s.coeffs[k])});
    }
    t.notes.push_back("m=" + std::to_string(m) + " sum=" + format_number(total));
    if (!(std::abs(total - 1.0) <= tol)) t.ok = false;
  }
  return t;
}

namespace {

Table weight_table(const RunConfig& cfg, const cs::ZChoice& c, const char* name) {
  Table t = new_table(name, {"m", "x", "omega", "moment_density"});
  const PTParams p = cfg.params();
  for (std::size_t m : cfg.m_list) {
    const measure::WeightSpec spec{c, p, m, specfun::SeriesControl::contour()};
    for (double x : x_grid(cfg)) {
      try {
        const double w = measure::moment_density(spec, x);
        const double omega = measure::weight_function(spec, x);
        if (!std::isfinite(omega) || omega < -1e-10) t.ok = false;
        t.rows.push_back({static_cast<double>(m), x, omega, w});
      } catch (const std::exception& e) {
        ++t.skipped;
        t.notes.push_back("m=" + std::to_string(m) + " x=" + format_number(x) + " skipped: " + e.what());
      }
    }
  }
  if (t.skipped) t.ok = false;
  return t;
}

}  // namespace

Table cmd_weight(const RunConfig& cfg) { return weight_table(cfg, cfg.z_choice(), "weight"); }

Table cmd_figure1(const RunConfig& cfg) {
  Table t = weight_table(cfg, cs::ZChoice::phase_only(cfg.alpha), "figure1");
  // Ratio of each curve to the m = 0 curve at the last grid point.
  const double x_tail = x_grid(cfg).empty() ? 0.0 : x_grid(cfg).back();
  double base = 0.0;
  for (const auto& r : t.rows)
    if (r[0] == 0.0 && r[1] == x_tail) base = r[2];
  if (base > 0.0)
    for (const auto& r : t.rows)
      if (r[0] != 0.0 && r[1] == x_tail)
        t.notes.push_back("tail ratio m=" + format_number(r[0]) + ": " + format_number(r[2] / base));
  return t;
}

Table cmd_moments(const RunConfig& cfg) {
  Table t = new_table("moments", {"m", "n", "integral", "target", "rel_err"});
  const PTParams p = cfg.params();
  const auto c = cfg.z_choice();
  const double tol = pick_tol(cfg, c.kind == cs::ZKind::gamma_weighted ? 1e-6 : 1e-4);
  for (std::size_t m : cfg.m_list) {
    const measure::WeightSpec spec{c, p, m, specfun::SeriesControl::contour()};
    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
      const auto r = measure::moment_check(spec, n);
      t.rows.push_back({static_cast<double>(m), static_cast<double>(n), r.integral, r.target, r.rel_err});
      if (!(r.rel_err <= tol)) t.ok = false;
    }
  }
  return t;
}

Table cmd_thermal(const RunConfig& cfg) {
  Table t = new_table("thermal",
          {"m", "beta", "Z", "mean_N", "mean_N2", "g2", "Q", "q_identity_err", "dev_mean_N", "dev_mean_N2", "dev_g2",
           "dev_Q", "dev_sub_mean_N", "dev_sub_mean_N2", "dev_sub_g2", "dev_sub_Q", "truncation_delta"});
  const PTParams p = cfg.params();
  const auto c = cfg.z_choice();
  const double tol = pick_tol(cfg, 1e-12);
  for (std::size_t m : cfg.m_list) {
    for (double beta : cfg.beta_list) {
      const thermal::ThermalConfig tc{beta, m, cfg.truncation};
      const auto r = thermal::thermal_report(p, c, tc);
      const auto x = thermal::closed_form_crosscheck(p, c, tc);
      const double ident = std::abs(r.mandel_q - (r.variance() / r.mean_N - 1.0)) / std::max(1.0, std::abs(r.mandel_q));
      std::vector<double> row{static_cast<double>(m), beta, r.partition, r.mean_N, r.mean_N2, r.g2, r.mandel_q, ident};
      for (const auto& e : x.entries) row.push_back(e.deviation);
      for (const auto& e : x.entries) row.push_back(e.deviation_sub);
      row.push_back(x.truncation_delta);
      t.rows.push_back(row);
      if (!(ident <= tol) || r.variance() < -1e-12 * r.mean_N2 || !(x.truncation_delta <= 1e-10)) t.ok = false;
    }
  }
  return t;
}

Table run_command(const std::string& name, const RunConfig& cfg) {
  static const std::map<std::string, Table (*)(const RunConfig&)> table = {
      {"spectrum", cmd_spectrum}, {"coeffs", cmd_coeffs},   {"state", cmd_state},     {"weight", cmd_weight},
      {"figure1", cmd_figure1},   {"moments", cmd_moments}, {"thermal", cmd_thermal},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown command '" + name + "'");
  return it->second(cfg);
}

std::string render_csv(const Table& t, const RunConfig& cfg) {
  std::string s = "# " + meta_json(t, cfg).dump() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_number(r[i]);
    s += "\n";
  }
  return s;
}

std::string render_json(const Table& t, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["meta"] = meta_json(t, cfg);
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    auto row = nlohmann::ordered_json::array();
    for (double v : r) {
      if (std::isfinite(v))
        row.push_back(std::stod(format_number(v)));
      else
        row.push_back(nullptr);
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

std::string render(const Table& t, const RunConfig& cfg) {
  return cfg.format == "json" ? render_json(t, cfg) : render_csv(t, cfg);
}

}  // namespace pasi::cli
