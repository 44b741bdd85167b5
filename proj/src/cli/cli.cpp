#include "pilotcap/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pilotcap/errors.hpp"

namespace pilotcap::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_db(double v) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Cell Cell::num(double v) { return {Kind::Number, format_number(v), {}}; }
Cell Cell::db(double v) { return {Kind::Number, format_db(v), {}}; }
Cell Cell::integer(long v) { return {Kind::Number, std::to_string(v), {}}; }
Cell Cell::str(std::string s) { return {Kind::String, std::move(s), {}}; }
Cell Cell::boolean(bool b) { return {Kind::Bool, b ? "true" : "false", {}}; }

Cell Cell::list(const std::vector<double>& v) {
  Cell c{Kind::List, "", {}};
  for (std::size_t i = 0; i < v.size(); ++i) {
    c.items.push_back(format_number(v[i]));
    c.text += (i ? ";" : "") + c.items.back();
  }
  return c;
}

std::vector<double> parse_snr_log(const std::string& spec) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof()) {
    throw ConfigError("--snr-log expects lo:hi:step, got '" + spec + "'");
  }
  if (!(step > 0.0) || hi < lo) throw ConfigError("--snr-log needs step > 0 and lo <= hi");
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw ConfigError("--snr-log grid too large");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(std::pow(10.0, lo + i * step));
  return out;
}

namespace {

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\n") != std::string::npos; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_number(const std::string& lit) {
  // Non-finite values have no JSON number form.
  if (lit == "inf" || lit == "-inf" || lit == "nan") return json_string(lit);
  return lit;
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& txt = row[i].text;
      os << (i ? "," : "") << (needs_quotes(txt) ? json_string(txt) : txt);
    }
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t) {
  os << "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << "  {";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const auto& c = t.rows[r][i];
      os << (i ? ", " : "") << json_string(t.columns[i]) << ": ";
      switch (c.kind) {
        case Cell::Kind::Number:
          os << json_number(c.text);
          break;
        case Cell::Kind::Bool:
          os << c.text;
          break;
        case Cell::Kind::String:
          os << json_string(c.text);
          break;
        case Cell::Kind::List:
          os << '[';
          for (std::size_t k = 0; k < c.items.size(); ++k) os << (k ? ", " : "") << json_number(c.items[k]);
          os << ']';
          break;
      }
    }
    os << '}' << (r + 1 < t.rows.size() ? "," : "") << '\n';
  }
  os << "]\n";
}

namespace {

// Appends config-file entries whose flag is absent from the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  auto present = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    for (auto& ch : key) {
      if (ch == '_') ch = '-';
    }
    if (key == "config" || key == "command") continue;
    const std::string flag = "--" + key;
    if (present(flag)) continue;
    const auto& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (std::size_t k = 0; k < v.size(); ++k) {
        joined += (k ? "," : "") + (v[k].is_string() ? v[k].get<std::string>() : v[k].dump());
      }
      args.push_back(flag);
      args.push_back(joined);
    } else {
      args.push_back(flag);
      args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  return args;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--m", o.m, "block lengths (comma list)")->delimiter(',');
  sub->add_option("--snr-log", o.snr_log, "SNR grid as base-10 exponents lo:hi:step");
  sub->add_option("--snr", o.snr, "explicit SNR values (comma list)")->delimiter(',');
  sub->add_option("--kappa", o.kappa, "per-pilot power cap in units of P");
  sub->add_option("--delta", o.delta, "pilot power fraction");
  sub->add_option("--nu", o.nu, "OOK peak parameter");
  sub->add_option("--out", o.out, "output file (stdout if absent)");
  sub->add_flag("--json", o.json, "emit JSON instead of CSV");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sub->add_option("--tol-kt", o.tol_kt, "Kuhn-Tucker tolerance in nats")->check(CLI::NonNegativeNumber);
  sub->add_option("--config", o.config, "JSON file with default flag values");
  sub->add_option("--snr-step", o.snr_step, "SNR resolution for min-bit-energy");
  sub->add_option("--plan", o.plan, "flash duty rule: linear, category1, category2, constant");
  sub->add_option("--a-star", o.a_star, "flash: SNR of the non-flash minimum (0 = computed)");
  sub->add_option("--exponent", o.exponent, "flash: exponent or constant duty");
  sub->add_option("--suite", o.suite, "oracle suite: density, training, worstcase, mutual-info, all");
  sub->add_option("--n", o.n, "Monte Carlo sample count");
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const Options& o, const std::vector<std::string>& args, const Table& t) {
  nlohmann::ordered_json j;
  j["command"] = o.command;
  j["arguments"] = args;
  j["parameters"] = {{"m", o.m},           {"snr_log", o.snr_log}, {"snr", o.snr},
                     {"kappa", o.kappa},   {"delta", o.delta},     {"nu", o.nu},
                     {"json", o.json},     {"threads", o.threads}, {"tol_kt", o.tol_kt},
                     {"snr_step", o.snr_step}, {"plan", o.plan},   {"a_star", o.a_star},
                     {"exponent", o.exponent}, {"suite", o.suite}, {"n", o.n}};
  j["version"] = kVersion;
  j["seeds"] = {o.seed};
  j["timestamp"] = timestamp_utc();
  j["outputs"] = {o.out};
  j["status"] = t.failed ? "partial" : "complete";
  j["notes"] = t.notes;
  std::ofstream mf(o.out + ".manifest.json");
  mf << j.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  }
  CLI::App app{"Capacity and energy-efficiency calculations for pilot-assisted Rayleigh block fading"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  for (const char* name : {"worstcase-curve", "min-bit-energy", "peak-pilot", "flash", "peakcap-optimize",
                           "interleaved", "ook", "noncoherent", "oracle-validate"}) {
    add_common(app.add_subcommand(name), o);
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  }
  o.command = app.get_subcommands().front()->get_name();

  Table table;
  try {
    table = run_command(o);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (estimate " << e.estimate() << ", error bound "
        << e.error_bound() << ")\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }

  if (o.out.empty()) {
    o.json ? write_json(out, table) : write_csv(out, table);
  } else {
    std::ofstream f(o.out);
    if (!f) {
      err << "error: cannot write '" << o.out << "'\n";
      return kBadArgs;
    }
    o.json ? write_json(f, table) : write_csv(f, table);
    write_manifest(o, raw_args, table);
  }
  for (const auto& n : table.notes) err << n << '\n';
  return table.failed ? kNumerical : kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pilotcap::cli
