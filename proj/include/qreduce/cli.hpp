#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qreduce/layersim.hpp"
#include "qreduce/potential.hpp"

namespace qreduce::cli {

enum class Format { text, csv, json };

std::string to_string(Format f);

enum ExitCode : int { exit_success = 0, exit_usage = 2, exit_numeric = 3 };

/// Everything a run needs. Knobs that do not apply to the chosen subcommand
/// keep their defaults and are ignored.
struct RunConfig {
  std::string subcommand;  // vq, brackets, spectrum, recipes, layersim
  std::string target;      // positional after the subcommand

  // geometry catalog
  std::string shape;  // empty: subcommand default
  double radius = 1.0;
  double semi_a = 1.5;
  double semi_b = 1.0;
  double coef = 1.0;
  double big_r = 3.0;
  double small_r = 1.0;
  double t = 0.3;
  double u = 0.7;
  double v = 0.4;
  double theta = 1.0471975511965976;  // pi / 3

  PhysicsParams physics;

  // vq
  std::string method = "closed";  // closed, profile, both

  // brackets
  std::string system = "sphere";
  int n = 3;

  // spectrum
  int n_grid = 256;
  int modes = 8;
  bool with_vq = false;

  // recipes
  std::string geometry = "sphere";
  int lmax = 4;

  // layersim
  std::vector<double> eps{0.1, 0.05, 0.025};
  int mmax = 3;
  std::optional<int> ntrans;  // 128 for the decoupled solvers, 32 for curve2d
  std::string confinement = "dirichlet";
  bool extrapolate = true;
  int ntang = 128;
  int bands = 4;
  int angular_grid = 0;

  Format format = Format::text;
  std::string output;  // empty: stdout
  std::string config;  // key = value file merged under the command line
  bool timing = false;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Usage text listing every subcommand and flag.
std::string help_text();

/// Long flags accepted by parse_args, across all subcommands.
std::vector<std::string> accepted_flags();

/// Thrown by parse_args for --help; carries the text to print.
struct HelpRequested {
  std::string text;
};

/// Parses argv without the program name. Throws UsageError naming the
/// offending flag, or HelpRequested.
RunConfig parse_args(const std::vector<std::string>& args);

/// Checks every knob against its documented range; UsageError names the flag.
void validate(const RunConfig& cfg);

using Cell = std::variant<std::string, double>;

struct ResultRecord {
  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, double>> results;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> messages;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  double duration_seconds = 0.0;

  /// Stores values rounded to 12 significant digits, so serialization is exact.
  void add_result(std::string name, double value);
  void add_row(std::vector<Cell> row);

  std::optional<double> result(const std::string& name) const;
};

/// NaN compares equal to NaN so records with undefined entries round-trip.
bool operator==(const ResultRecord& a, const ResultRecord& b);

/// Duration is included only when `with_timing` is set, which keeps repeated
/// runs byte-identical by default.
nlohmann::ordered_json to_json(const ResultRecord& r, bool with_timing = false);
ResultRecord record_from_json(const nlohmann::ordered_json& j);

std::string format_number(double value, int digits);

std::string render_json(const ResultRecord& r, bool with_timing = false);
std::string render_csv(const ResultRecord& r);
std::string render_text(const ResultRecord& r);

/// Dispatches to the owning module. Module errors propagate.
ResultRecord run(const RunConfig& cfg);

/// Full command-line driver: parse, run, write, map errors to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qreduce::cli
