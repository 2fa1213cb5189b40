#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pasi/coherent_states.hpp"
#include "pasi/poschl_teller.hpp"

namespace pasi::cli {

// Flat key = value configuration; '#' starts a comment, lists are comma separated.
struct RunConfig {
  double l = 2.0;
  double l_prime = 2.0;
  double a = 1.0;
  std::string choice = "phase";  // phase | gamma
  double alpha = 0.0;
  double kappa = 1.0;
  std::vector<std::size_t> m_list{0, 1, 2, 3, 4};
  double x_min = 0.1;
  double x_max = 10.0;
  std::size_t x_points = 100;
  double z_re = 0.5;
  double z_im = 0.0;
  std::size_t n_min = 0;
  std::size_t n_max = 6;  // n_min > n_max is an empty range
  std::vector<double> beta_list{0.5, 1.0, 2.0, 4.0, 8.0};
  std::size_t truncation = 0;
  double tol = 0.0;  // 0 keeps each command's default tolerance
  std::string format = "csv";
  std::string out;

  PTParams params() const { return PTParams{l, l_prime, a}; }
  cs::ZChoice z_choice() const;
  // Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& field, const std::string& msg);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

std::string emit_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json config_json(const RunConfig& cfg);

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool ok = true;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
};

Table cmd_spectrum(const RunConfig& cfg);
Table cmd_coeffs(const RunConfig& cfg);
Table cmd_state(const RunConfig& cfg);
Table cmd_weight(const RunConfig& cfg);
Table cmd_figure1(const RunConfig& cfg);
Table cmd_moments(const RunConfig& cfg);
Table cmd_thermal(const RunConfig& cfg);

// Runs a command by name; throws std::invalid_argument for unknown names.
Table run_command(const std::string& name, const RunConfig& cfg);

// CSV: one "# {json}" metadata line, a header and rows at 12 significant digits.
std::string render_csv(const Table& t, const RunConfig& cfg);
std::string render_json(const Table& t, const RunConfig& cfg);
std::string render(const Table& t, const RunConfig& cfg);

extern const char* const kVersion;

}  // namespace pasi::cli
