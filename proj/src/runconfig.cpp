#include "phaselim/runconfig.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "phaselim/estimation.hpp"
#include "phaselim/fisher.hpp"
#include "phaselim/gaussian.hpp"
#include "phaselim/numfmt.hpp"

namespace phaselim::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::set<std::string>& command_set() {
  static const std::set<std::string> cmds = {"qfi",          "qfim",     "crb",
                                             "phase-averaged", "gaussian-cfi", "campaign",
                                             "sweep"};
  return cmds;
}

bool needs_probe(const std::string& cmd) {
  return cmd == "qfi" || cmd == "qfim" || cmd == "crb" || cmd == "phase-averaged";
}

bool needs_r_phi(const std::string& cmd) {
  return cmd == "gaussian-cfi" || cmd == "campaign";
}

double inverse_or_inf(double x) { return x > 0.0 ? 1.0 / x : kInf; }

void check_grid_array(const nlohmann::json& grid, const std::string& name, bool required,
                      bool bounded01, std::vector<Violation>& v) {
  const std::string pointer = "/grid/" + name;
  if (!grid.contains(name)) {
    if (required) v.push_back({pointer, "required non-empty array of numbers"});
    return;
  }
  const auto& arr = grid.at(name);
  if (!arr.is_array()) {
    v.push_back({pointer, "must be an array of numbers"});
    return;
  }
  if (required && arr.empty()) v.push_back({pointer, "must not be empty"});
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string el = pointer + "/" + std::to_string(i);
    if (!arr[i].is_number()) {
      v.push_back({el, "must be a number"});
      continue;
    }
    const double x = arr[i].get<double>();
    if (!std::isfinite(x))
      v.push_back({el, "must be finite"});
    else if (bounded01 && (x < 0.0 || x > 1.0))
      v.push_back({el, "must lie in [0, 1]"});
  }
}

void append_probe_rows(const RunConfig& config, const std::string& cmd,
                       std::vector<Row>& rows) {
  const probe::ProbeSpec& spec = *config.probe;
  const std::string probe_label = probe::to_string(spec);
  const probe::PhotonStats stats = probe::photon_stats(spec);
  const double snl = inverse_or_inf(stats.nbar);

  for (const double t : config.grid_t) {
    const auto push = [&](std::string recipe, double value, double bound, bool beats,
                          std::string flags) {
      Row row;
      row.recipe = std::move(recipe);
      row.probe = probe_label;
      row.transmittance = t;
      row.value = value;
      row.bound = bound;
      row.snl = snl;
      row.beats_snl = beats;
      row.flags = std::move(flags);
      rows.push_back(std::move(row));
    };
    if (cmd == "qfi") {
      const double g1 = fisher::qfi_g1_general_t(spec, t);
      const fisher::Qfim q = fisher::qfim_two_arm(spec, t);
      push("qfi-g1", g1, inverse_or_inf(g1), inverse_or_inf(g1) < snl - 1e-12, "");
      push("qfi-gd", q.f_dd, inverse_or_inf(q.f_dd),
           inverse_or_inf(q.f_dd) < snl - 1e-12, "");
      push("qfi-gs", q.f_ss, inverse_or_inf(q.f_ss),
           inverse_or_inf(q.f_ss) < snl - 1e-12, "");
    } else if (cmd == "qfim") {
      const fisher::Qfim q = fisher::qfim_two_arm(spec, t);
      const fisher::CrbReport crb = fisher::crb_phi_d(q, stats.nbar, t);
      push("qfim-entry", q.f_dd, crb.bound_phi_d, crb.beats_snl, "entry=dd");
      push("qfim-entry", q.f_ss, crb.bound_phi_d, crb.beats_snl, "entry=ss");
      push("qfim-entry", q.f_sd, crb.bound_phi_d, crb.beats_snl, "entry=sd");
    } else if (cmd == "crb") {
      const fisher::Qfim q = fisher::qfim_two_arm(spec, t);
      const fisher::CrbReport crb = fisher::crb_phi_d(q, stats.nbar, t);
      push("crb-two-arm", crb.loose_bound_phi_d, crb.bound_phi_d, crb.beats_snl,
           crb.degenerate ? "degenerate" : "");
    } else {
      const double f = fisher::qfi_phase_averaged(spec, t);
      push("qfi-phase-averaged", f, inverse_or_inf(f), inverse_or_inf(f) < snl - 1e-12,
           "");
    }
  }
}

void append_gaussian_rows(const RunConfig& config, std::vector<Row>& rows) {
  for (const double t : config.grid_t) {
    for (const double r : config.grid_r) {
      const double nbar_tot = 2.0 * std::pow(std::sinh(r), 2);
      const double snl = inverse_or_inf(nbar_tot);
      for (const double phi : config.grid_phi) {
        const gaussian::CfiPoint point = gaussian::cfi_two_outcome_detail(r, t, phi);
        Row row;
        row.recipe = point.limit_path ? "cfi-on-off-limit" : "cfi-on-off";
        row.probe = probe::to_string(probe::ProbeSpec::squeezed_vacuum(r));
        row.transmittance = t;
        row.r = r;
        row.phi = phi;
        row.value = point.value;
        row.bound = inverse_or_inf(point.value);
        row.snl = snl;
        row.beats_snl = *row.bound < snl - 1e-12;
        row.flags = point.limit_path ? "limit-path" : "";
        rows.push_back(std::move(row));
      }
    }
  }
}

void append_campaign_rows(const RunConfig& config, std::vector<Row>& rows) {
  for (const double t : config.grid_t) {
    for (const double r : config.grid_r) {
      const double nbar_tot = 2.0 * std::pow(std::sinh(r), 2);
      for (const double phi : config.grid_phi) {
        mc::Trial trial;
        trial.m = config.m;
        trial.reps = static_cast<int>(config.reps);
        trial.seed = config.seed;
        trial.true_phi = phi;
        trial.r = r;
        trial.transmittance = t;
        const mc::EstimateReport report = mc::run_campaign(trial);

        Row row;
        row.recipe = "campaign-mle";
        row.probe = probe::to_string(probe::ProbeSpec::squeezed_vacuum(r));
        row.transmittance = t;
        row.r = r;
        row.phi = phi;
        row.value = report.ratio;
        row.bound = report.crb;
        row.snl = inverse_or_inf(static_cast<double>(config.m) * nbar_tot);
        row.beats_snl = report.crb < *row.snl - 1e-12;
        row.flags = "var=" + detail::format_double(report.phi_hat_var) +
                    ";mean=" + detail::format_double(report.phi_hat_mean) +
                    ";stderr-var=" + detail::format_double(report.stderr_of_var);
        if (report.boundary_hits > 0)
          row.flags += ";boundary-hits=" + std::to_string(report.boundary_hits);
        rows.push_back(std::move(row));
      }
    }
  }
}

void emit_error(std::ostream& err, const std::string& type, const std::string& message) {
  const nlohmann::json record = {{"error", {{"type", type}, {"message", message}}}};
  err << record.dump() << "\n";
}

}  // namespace

std::vector<Violation> validate_config(const nlohmann::json& j) {
  std::vector<Violation> v;
  if (!j.is_object()) {
    v.push_back({"", "config must be a JSON object"});
    return v;
  }

  static const std::set<std::string> known = {"command", "inner_command", "probe",
                                              "grid",    "output",        "seed",
                                              "out_path", "m",            "reps"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) v.push_back({"/" + item.key(), "unknown field"});

  std::string effective;
  if (!j.contains("command") || !j.at("command").is_string()) {
    v.push_back({"/command", "required string"});
  } else {
    const std::string cmd = j.at("command").get<std::string>();
    if (!command_set().count(cmd)) {
      v.push_back({"/command", "unknown command '" + cmd + "'"});
    } else if (cmd == "sweep") {
      if (!j.contains("inner_command") || !j.at("inner_command").is_string() ||
          !command_set().count(j.at("inner_command").get<std::string>()) ||
          j.at("inner_command").get<std::string>() == "sweep") {
        v.push_back({"/inner_command",
                     "sweep requires an inner command (any command except sweep)"});
      } else {
        effective = j.at("inner_command").get<std::string>();
      }
    } else {
      effective = cmd;
      if (j.contains("inner_command"))
        v.push_back({"/inner_command", "only valid for the sweep command"});
    }
  }

  if (!effective.empty() && needs_probe(effective)) {
    if (!j.contains("probe")) {
      v.push_back({"/probe", "required for command '" + effective + "'"});
    } else {
      try {
        probe::ProbeSpec spec = j.at("probe").get<probe::ProbeSpec>();
        (void)spec;
      } catch (const std::exception& e) {
        v.push_back({"/probe", e.what()});
      }
    }
  }

  if (j.contains("grid") && !j.at("grid").is_object()) {
    v.push_back({"/grid", "must be an object with T/r/phi arrays"});
  } else {
    const nlohmann::json grid = j.value("grid", nlohmann::json::object());
    for (const auto& item : grid.items())
      if (item.key() != "T" && item.key() != "r" && item.key() != "phi")
        v.push_back({"/grid/" + item.key(), "unknown field"});
    const bool any = !effective.empty();
    check_grid_array(grid, "T", any, true, v);
    check_grid_array(grid, "r", any && needs_r_phi(effective), false, v);
    check_grid_array(grid, "phi", any && needs_r_phi(effective), false, v);
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_string() ||
        (o.get<std::string>() != "csv" && o.get<std::string>() != "json"))
      v.push_back({"/output", "must be \"csv\" or \"json\""});
  }
  if (j.contains("seed") && !j.at("seed").is_number_unsigned())
    v.push_back({"/seed", "must be a non-negative integer"});
  if (j.contains("out_path") && !j.at("out_path").is_string())
    v.push_back({"/out_path", "must be a string"});

  long long m = 10000, reps = 200;
  if (j.contains("m")) {
    if (!j.at("m").is_number_integer() || j.at("m").get<long long>() < 1)
      v.push_back({"/m", "must be an integer >= 1"});
    else
      m = j.at("m").get<long long>();
  }
  if (j.contains("reps")) {
    const long long min_reps = (effective == "campaign") ? 2 : 1;
    if (!j.at("reps").is_number_integer() || j.at("reps").get<long long>() < min_reps)
      v.push_back({"/reps", "must be an integer >= " + std::to_string(min_reps)});
    else
      reps = j.at("reps").get<long long>();
  }
  if (effective == "campaign" && static_cast<double>(m) * static_cast<double>(reps) > 1e9)
    v.push_back({"/m", "campaign budget m * reps exceeds 1e9"});

  return v;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.inner_command = j.value("inner_command", std::string());
    if (j.contains("probe")) c.probe = j.at("probe").get<probe::ProbeSpec>();
    const nlohmann::json grid = j.value("grid", nlohmann::json::object());
    if (grid.contains("T")) c.grid_t = grid.at("T").get<std::vector<double>>();
    if (grid.contains("r")) c.grid_r = grid.at("r").get<std::vector<double>>();
    if (grid.contains("phi")) c.grid_phi = grid.at("phi").get<std::vector<double>>();
    c.output = j.value("output", std::string("csv"));
    c.seed = j.value("seed", std::uint64_t{1});
    c.out_path = j.value("out_path", std::string());
    c.m = j.value("m", 10000LL);
    c.reps = j.value("reps", 200LL);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::vector<Row> run_rows(const RunConfig& config) {
  if (config.command == "sweep") {
    if (config.inner_command.empty() || config.inner_command == "sweep")
      throw ConfigError("sweep requires an inner command");
    RunConfig inner = config;
    inner.command = config.inner_command;
    inner.inner_command.clear();
    return run_rows(inner);
  }
  if (!command_set().count(config.command))
    throw ConfigError("unknown command '" + config.command + "'");
  if (config.grid_t.empty()) throw ConfigError("grid.T must not be empty");
  if (needs_r_phi(config.command) && (config.grid_r.empty() || config.grid_phi.empty()))
    throw ConfigError("command '" + config.command + "' needs grid.r and grid.phi");
  if (needs_probe(config.command) && !config.probe)
    throw ConfigError("command '" + config.command + "' needs a probe");

  std::vector<Row> rows;
  if (needs_probe(config.command)) {
    append_probe_rows(config, config.command, rows);
  } else if (config.command == "gaussian-cfi") {
    append_gaussian_rows(config, rows);
  } else {
    append_campaign_rows(config, rows);
  }
  return rows;
}

std::string format_csv(const std::vector<Row>& rows) {
  const auto num = [](const std::optional<double>& x) {
    return x ? detail::format_double(*x) : std::string();
  };
  std::string text = "recipe,probe,T,r,phi,value,bound,snl,beats_snl,flags\n";
  for (const Row& row : rows) {
    text += row.recipe;
    text += ',';
    text += row.probe;
    text += ',';
    text += num(row.transmittance);
    text += ',';
    text += num(row.r);
    text += ',';
    text += num(row.phi);
    text += ',';
    text += detail::format_double(row.value);
    text += ',';
    text += num(row.bound);
    text += ',';
    text += num(row.snl);
    text += ',';
    text += row.beats_snl ? (*row.beats_snl ? "true" : "false") : "";
    text += ',';
    text += row.flags;
    text += '\n';
  }
  return text;
}

std::string format_json(const std::vector<Row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Row& row : rows) {
    nlohmann::json item;
    item["recipe"] = row.recipe;
    item["probe"] = row.probe;
    item["T"] = row.transmittance ? nlohmann::json(*row.transmittance) : nullptr;
    item["r"] = row.r ? nlohmann::json(*row.r) : nullptr;
    item["phi"] = row.phi ? nlohmann::json(*row.phi) : nullptr;
    item["value"] = row.value;
    item["bound"] = row.bound ? nlohmann::json(*row.bound) : nullptr;
    item["snl"] = row.snl ? nlohmann::json(*row.snl) : nullptr;
    item["beats_snl"] = row.beats_snl ? nlohmann::json(*row.beats_snl) : nullptr;
    item["flags"] = row.flags;
    arr.push_back(std::move(item));
  }
  return arr.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<Row> rows = run_rows(config);
    const std::string text =
        config.output == "json" ? format_json(rows) : format_csv(rows);
    if (config.out_path.empty()) {
      out << text;
      out.flush();
    } else {
      std::filesystem::path path = config.out_path;
      if (path.is_relative()) {
        if (const char* dir = std::getenv("PHASELIM_OUT_DIR"))
          path = std::filesystem::path(dir) / path;
      }
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("cannot open output file '" + path.string() + "'");
      file << text;
      file.close();
      if (!file) throw ConfigError("failed writing output file '" + path.string() + "'");
      out << "wrote " << rows.size() << " rows to " << path.string() << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return 2;
  } catch (const CutoffOverflow& e) {
    emit_error(err, "cutoff-overflow", e.what());
    return 3;
  } catch (const DegenerateProbability& e) {
    emit_error(err, "degenerate-probability", e.what());
    return 3;
  } catch (const NoRoot& e) {
    emit_error(err, "no-root", e.what());
    return 3;
  } catch (const DimensionMismatch& e) {
    emit_error(err, "dimension-mismatch", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "invalid-argument", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return 3;
  }
}

}  // namespace phaselim::cli
