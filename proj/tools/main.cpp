// Command-line front end: merges a JSON config file with flag overrides,
// validates the result, and streams rows as CSV or JSON.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaselim/probe.hpp"
#include "phaselim/runconfig.hpp"

namespace {

void emit_cli_error(const std::string& message) {
  const nlohmann::json record = {
      {"error", {{"type", "config"}, {"message", message}}}};
  std::cerr << record.dump() << "\n";
}

// Accepts either a comma list ("0.25,0.5,0.75") or an inclusive linspace
// ("0.05:0.95:19" -> 19 points from 0.05 to 0.95).
std::vector<double> parse_list(const std::string& text) {
  const auto to_double = [&](const std::string& tok) {
    std::size_t idx = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &idx);
    } catch (const std::exception&) {
      throw phaselim::ConfigError("cannot parse number '" + tok + "'");
    }
    if (idx != tok.size())
      throw phaselim::ConfigError("cannot parse number '" + tok + "'");
    return x;
  };

  std::vector<std::string> tokens;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    tokens.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }

  if (sep == ':') {
    if (tokens.size() != 3)
      throw phaselim::ConfigError("range syntax is lo:hi:count, got '" + text + "'");
    const double lo = to_double(tokens[0]);
    const double hi = to_double(tokens[1]);
    const double count_d = to_double(tokens[2]);
    const long long count = static_cast<long long>(count_d);
    if (count < 1 || static_cast<double>(count) != count_d)
      throw phaselim::ConfigError("range count must be a positive integer");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
      values.push_back(lo);
    } else {
      const double step = (hi - lo) / static_cast<double>(count - 1);
      for (long long i = 0; i < count; ++i)
        values.push_back(lo + step * static_cast<double>(i));
    }
    return values;
  }

  std::vector<double> values;
  for (const std::string& tok : tokens) values.push_back(to_double(tok));
  if (values.empty()) throw phaselim::ConfigError("empty list '" + text + "'");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "phaselim: phase-estimation precision limits of a lossless two-port "
      "interferometer with one vacuum input"};
  app.require_subcommand(0, 1);

  std::string config_path, probe_str, out_path, output_fmt, inner_cmd;
  std::string t_spec, r_spec, phi_spec;
  double nbar = std::nan("");
  long long m = -1, reps = -1, seed = -1;

  app.add_option("--config", config_path, "JSON config file to start from");
  app.add_option("--out", out_path,
                 "write rows to this file (relative paths resolve under "
                 "PHASELIM_OUT_DIR); default is stdout");
  app.add_option("--output", output_fmt, "row format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "base seed for Monte Carlo campaigns");
  app.add_option("--probe", probe_str,
                 "probe spec: fock:n=2, coherent:alpha=1.5, squeezed:r=0.88, "
                 "squeezed:nbar=1, thermal:nbar=0.5");
  app.add_option("--nbar", nbar,
                 "shorthand for a squeezed-vacuum probe with this mean photon "
                 "number");
  app.add_option("--T", t_spec, "transmittance values: comma list or lo:hi:count");
  app.add_option("--r", r_spec, "squeeze values: comma list or lo:hi:count");
  app.add_option("--phi", phi_spec, "phase values: comma list or lo:hi:count");
  app.add_option("--m", m, "shots per repetition");
  app.add_option("--reps", reps, "repetitions per campaign point");
  app.add_option("--command", inner_cmd, "inner command for sweep");

  const std::vector<std::string> names = {"qfi",          "qfim",
                                          "crb",          "phase-averaged",
                                          "gaussian-cfi", "campaign",
                                          "sweep",        "validate"};
  const std::vector<std::string> descs = {
      "quantum Fisher information of the single-arm, difference, and sum "
      "generators",
      "2x2 quantum Fisher information matrix over (difference, sum) phases",
      "tight vs single-parameter Cramer-Rao bounds on the difference phase",
      "phase-averaged single-arm quantum Fisher information",
      "classical Fisher information of on/off double-vacuum detection "
      "(squeezed-vacuum probe)",
      "Monte Carlo maximum-likelihood campaign against the Cramer-Rao bound",
      "re-run an inner command over the configured grids",
      "check a config file and print violations"};
  for (std::size_t i = 0; i < names.size(); ++i)
    app.add_subcommand(names[i], descs[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_cli_error(e.what());
    return 2;
  }

  std::string cmd;
  for (const CLI::App* sub : app.get_subcommands()) cmd = sub->get_name();

  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) {
      emit_cli_error("cannot read config file '" + config_path + "'");
      return 2;
    }
    try {
      cfg = nlohmann::json::parse(file);
    } catch (const std::exception& e) {
      emit_cli_error(std::string("config file is not valid JSON: ") + e.what());
      return 2;
    }
    if (!cfg.is_object()) {
      emit_cli_error("config file must hold a JSON object");
      return 2;
    }
  }

  if (cmd == "validate") {
    if (config_path.empty()) {
      emit_cli_error("validate requires --config");
      return 2;
    }
    const std::vector<phaselim::cli::Violation> violations =
        phaselim::cli::validate_config(cfg);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& violation : violations)
      arr.push_back({{"pointer", violation.pointer}, {"message", violation.message}});
    std::cout << arr.dump(2) << "\n";
    return violations.empty() ? 0 : 2;
  }

  try {
    if (!cmd.empty()) cfg["command"] = cmd;
    if (!inner_cmd.empty()) cfg["inner_command"] = inner_cmd;
    if (!probe_str.empty()) {
      cfg["probe"] = phaselim::probe::parse_probe(probe_str);
    } else if (!std::isnan(nbar)) {
      if (!(nbar >= 0.0))
        throw phaselim::ConfigError("--nbar must be non-negative");
      cfg["probe"] =
          phaselim::probe::ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(nbar)));
    }
    if (!t_spec.empty()) cfg["grid"]["T"] = parse_list(t_spec);
    if (!r_spec.empty()) cfg["grid"]["r"] = parse_list(r_spec);
    if (!phi_spec.empty()) cfg["grid"]["phi"] = parse_list(phi_spec);
    if (!output_fmt.empty()) cfg["output"] = output_fmt;
    if (seed >= 0) cfg["seed"] = static_cast<std::uint64_t>(seed);
    if (m >= 0) cfg["m"] = m;
    if (reps >= 0) cfg["reps"] = reps;
    if (!out_path.empty()) cfg["out_path"] = out_path;
  } catch (const std::exception& e) {
    emit_cli_error(e.what());
    return 2;
  }

  if (!cfg.contains("command")) {
    emit_cli_error("no command given: pass a subcommand or a config file with "
                   "a \"command\" field");
    return 2;
  }

  const std::vector<phaselim::cli::Violation> violations =
      phaselim::cli::validate_config(cfg);
  if (!violations.empty()) {
    std::string lines;
    for (const auto& violation : violations) {
      if (!lines.empty()) lines += "; ";
      lines += violation.pointer + ": " + violation.message;
    }
    emit_cli_error(lines);
    return 2;
  }

  phaselim::cli::RunConfig config;
  try {
    config = phaselim::cli::config_from_json(cfg);
  } catch (const std::exception& e) {
    emit_cli_error(e.what());
    return 2;
  }
  return phaselim::cli::run(config, std::cout, std::cerr);
}
