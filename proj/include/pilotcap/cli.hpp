#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pilotcap::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kBadArgs = 2, kNumerical = 3 };

/// One output cell. Numbers are preformatted so CSV and JSON carry the same
/// literal; lists print ';'-separated in CSV and as arrays in JSON.
struct Cell {
  enum class Kind { Number, String, Bool, List };
  Kind kind = Kind::Number;
  std::string text;
  std::vector<std::string> items;

  static Cell num(double v);
  static Cell db(double v);
  static Cell integer(long v);
  static Cell str(std::string s);
  static Cell boolean(bool b);
  static Cell list(const std::vector<double>& v);
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool failed = false;  // a numerical check or certification failed
  std::vector<std::string> notes;
};

/// Parsed flags shared by every subcommand.
struct Options {
  std::string command;
  std::vector<int> m;
  std::string snr_log;
  std::vector<double> snr;
  double kappa = 0.0;  // 0: no per-pilot cap
  double delta = -1.0; // < 0: optimize over delta
  double nu = 1.0;
  std::string out;
  bool json = false;
  std::uint64_t seed = 42;
  int threads = 0;
  double tol_kt = 1e-4;
  std::string config;
  double snr_step = 0.01;
  std::string plan = "linear";
  double a_star = 0.0;
  double exponent = 0.5;
  std::string suite = "all";
  double n = 1e5;
};

std::string format_number(double v);  // %.9g, "inf"/"-inf"/"nan" for non-finite
std::string format_db(double v);      // %.4f

/// Expands "lo:hi:step" in base-10 exponents; inclusive of hi within 1e-9 steps.
std::vector<double> parse_snr_log(const std::string& spec);

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);

Table run_command(const Options& opt);

/// Full command-line entry point. Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace pilotcap::cli
