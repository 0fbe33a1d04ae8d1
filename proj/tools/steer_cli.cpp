// steer_cli.cpp: command-line front end: evaluate, sweep, threshold, validate-state
//
// Exit codes: 0 ok, 1 state rejected by validate-state, 2 invalid
// configuration or input, 3 numerical failure, 4 no sign change.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "steer/steer.hpp"

namespace {

using steer::io::json;

constexpr int kExitRejected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoSignChange = 4;

struct RunConfig {
  std::string family = "isotropic";
  std::size_t d = 2;
  double p = 0.0;
  double p_start = 0.0;
  double p_end = 1.0;
  std::size_t steps = 101;
  std::string criterion = "srur";
  std::string mode = "linear-g";
  std::string pairing = "transpose";
  std::string state_path;
  std::string observables_path;
  double tol = 1e-9;
  std::string out;
  std::string diff_out;
  bool audit = false;
  std::size_t jobs = 1;
};

struct ConfigError : steer::InvalidArgument {
  using steer::InvalidArgument::InvalidArgument;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// Writes through a sibling temp file so a failure never leaves a partial file.
void write_file_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    out << contents;
    if (!out) throw ConfigError("cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

void check_isotropic_config(const RunConfig& c, steer::Mode mode) {
  require(c.family == "isotropic", "--family must be 'isotropic' for a p-parameterized run");
  require(c.d == 2 || c.d == 3, "isotropic runs use the built-in observable sets, so --d must be 2 or 3");
  require(c.pairing == "transpose", std::string(steer::to_string(mode)) + " on the isotropic family only supports --pairing transpose");
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_evaluate(const RunConfig& c) {
  const auto criterion = steer::parse_criterion(c.criterion);
  const auto mode = steer::parse_mode(c.mode);

  if (c.family == "isotropic") {
    check_isotropic_config(c, mode);
    require(c.p >= 0.0 && c.p <= 1.0, "--p must lie in [0, 1]");
    const auto family = steer::family_for_dimension(c.d);
    const auto [b1, b2] = steer::family_observables(family);
    const auto setup = steer::PairingRule::transpose_rule().resolve(b1, b2);
    const auto rho = steer::isotropic({c.d, c.p});

    const steer::CriterionReport report =
        mode == steer::Mode::ClosedForm
            ? steer::closed_form_report(family, c.p, criterion)
            : steer::evaluate(criterion, rho, setup, mode, steer::isotropic_descriptor(c.d, c.p));
    if (!c.audit) {
      print_json(steer::io::report_to_json(report));
      return 0;
    }
    json audit = {{"oracle", steer::io::oracle_audit(rho, setup)},
                  {"closed_form_diff", steer::io::diff_to_json(steer::closed_form_diff(family, {c.p}))}};
    if (mode == steer::Mode::ClosedForm) {
      audit["engine_moments"] = steer::io::moments_to_json(steer::full_moments(rho, setup), true);
    }
    print_json({{"report", steer::io::report_to_json(report, true)}, {"audit", std::move(audit)}});
    return 0;
  }

  require(c.family == "file", "--family must be 'isotropic' or 'file'");
  require(mode != steer::Mode::ClosedForm, "paper-closed-form mode requires --family isotropic");
  require(!c.state_path.empty() && !c.observables_path.empty(), "--family file needs --state and --observables");
  const auto rho = steer::io::state_from_json(steer::io::read_json_file(c.state_path));
  require(rho.bipartite(), "state file must give \"dims\" for a two-party state");

  const json obs = steer::io::read_json_file(c.observables_path);
  require(obs.is_object() && obs.contains("b1") && obs.contains("b2"), "observables file needs \"b1\" and \"b2\"");
  const auto b1 = steer::io::observable_from_json(obs["b1"]);
  const auto b2 = steer::io::observable_from_json(obs["b2"]);
  steer::PairingRule rule = steer::PairingRule::transpose_rule();
  if (c.pairing == "file") {
    require(obs.contains("a1") && obs.contains("a2"), "--pairing file needs \"a1\" and \"a2\" in the observables file");
    auto optional_obs = [&](const char* key) -> std::optional<steer::Observable> {
      if (!obs.contains(key)) return std::nullopt;
      return steer::io::observable_from_json(obs[key]);
    };
    rule = steer::PairingRule::explicit_rule(steer::io::observable_from_json(obs["a1"]),
                                             steer::io::observable_from_json(obs["a2"]), optional_obs("a3"),
                                             optional_obs("a4"));
  } else {
    require(c.pairing == "transpose", "--pairing must be 'transpose' or 'file'");
  }
  const auto setup = rule.resolve(b1, b2);
  const auto report = steer::evaluate(criterion, rho, setup, mode, "file:" + c.state_path);
  if (!c.audit) {
    print_json(steer::io::report_to_json(report));
    return 0;
  }
  print_json({{"report", steer::io::report_to_json(report, true)},
              {"audit", {{"oracle", steer::io::oracle_audit(rho, setup)}}}});
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const auto criterion = steer::parse_criterion(c.criterion);
  const auto mode = steer::parse_mode(c.mode);
  check_isotropic_config(c, mode);
  require(!c.out.empty(), "sweep writes CSV and needs --out");
  require(c.jobs >= 1, "--jobs must be at least 1");
  const auto evaluator = steer::make_isotropic_evaluator(c.d, criterion, mode);
  const auto result = steer::sweep(evaluator, c.p_start, c.p_end, c.steps, c.jobs);
  std::string diff;
  if (!c.diff_out.empty()) {
    diff = steer::diff_csv(steer::closed_form_diff(steer::family_for_dimension(c.d),
                                                   steer::uniform_grid(c.p_start, c.p_end, c.steps)));
  }
  write_file_atomically(c.out, steer::sweep_csv(result));
  if (!c.diff_out.empty()) write_file_atomically(c.diff_out, diff);
  return 0;
}

int cmd_threshold(const RunConfig& c) {
  const auto criterion = steer::parse_criterion(c.criterion);
  const auto mode = steer::parse_mode(c.mode);
  check_isotropic_config(c, mode);
  const auto t = steer::find_threshold(steer::make_isotropic_evaluator(c.d, criterion, mode), c.tol);
  json j = steer::io::threshold_to_json(t);
  j["d"] = c.d;
  j["criterion"] = c.criterion;
  j["mode"] = c.mode;
  print_json(j);
  return 0;
}

int cmd_validate_state(const RunConfig& c) {
  require(!c.state_path.empty(), "validate-state needs --state");
  const auto [m, dims] = steer::io::raw_state_from_json(steer::io::read_json_file(c.state_path));
  const auto diag = steer::diagnose_state(m, dims);
  json j = {{"valid", !diag.has_value()}, {"dim", m.dim()}};
  if (diag) {
    j["defect"] = steer::to_string(diag->defect);
    j["residual"] = diag->residual;
  }
  print_json(j);
  return diag ? kExitRejected : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inferred-variance EPR-steering criterion engine"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", c.family, "isotropic | file");
    sub->add_option("--d", c.d, "local dimension of the isotropic family (2 or 3)");
    sub->add_option("--criterion", c.criterion, "srur | hur");
    sub->add_option("--mode", c.mode, "linear-g | conditional-mean | paper-closed-form");
    sub->add_option("--pairing", c.pairing, "transpose | file");
  };

  auto* evaluate = app.add_subcommand("evaluate", "evaluate one criterion on one state");
  add_family(evaluate);
  evaluate->add_option("--p", c.p, "isotropic mixing weight");
  evaluate->add_option("--state", c.state_path, "state JSON (--family file)");
  evaluate->add_option("--observables", c.observables_path, "observables JSON (--family file)");
  evaluate->add_flag("--audit", c.audit, "include oracle tables and closed-form diff");

  auto* sweep = app.add_subcommand("sweep", "evaluate on a uniform p grid and write CSV");
  add_family(sweep);
  sweep->add_option("--p-start", c.p_start);
  sweep->add_option("--p-end", c.p_end);
  sweep->add_option("--steps", c.steps);
  sweep->add_option("--out", c.out, "CSV output path");
  sweep->add_option("--diff-out", c.diff_out, "closed-form diff CSV output path");
  sweep->add_option("--jobs", c.jobs, "worker threads");

  auto* threshold = app.add_subcommand("threshold", "bisect for the p where the margin changes sign");
  add_family(threshold);
  threshold->add_option("--tol", c.tol, "bracket width");

  auto* validate = app.add_subcommand("validate-state", "check a state JSON file");
  validate->add_option("--state", c.state_path, "state JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*evaluate) return cmd_evaluate(c);
    if (*sweep) return cmd_sweep(c);
    if (*threshold) return cmd_threshold(c);
    if (*validate) return cmd_validate_state(c);
  } catch (const steer::NoSignChangeError& e) {
    std::cerr << "error: no sign change: " << e.what() << "\n";
    return kExitNoSignChange;
  } catch (const steer::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const steer::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
