// qsdc command-line front end: protocol simulation, attack parameter
// sweeps, curve tables and the acceptance suite, with reproducible seeding.
//
// Exit codes: 0 clean run (including a protocol abort, which is the system
// working), 1 failed verification, 2 bad arguments, 3 I/O failure.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsdc/analysis.hpp"
#include "qsdc/io.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/verify.hpp"
#include "qsdc/version.hpp"

namespace {

constexpr std::uint64_t kFallbackSeed = 42;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QSDC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable QSDC_SEED\n";
    }
  }
  return kFallbackSeed;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    values.push_back(std::stod(item));
  }
  return values;
}

int write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file " << path << "\n";
    return 3;
  }
  out << content;
  if (!out) {
    std::cerr << "error: write failed for " << path << "\n";
    return 3;
  }
  return 0;
}

std::string meta_comment(const qsdc::io::Fields& meta) {
  std::string line = "# qsdc";
  for (const auto& [key, value] : meta) line += " " + key + "=" + value;
  line += "\n";
  return line;
}

nlohmann::json meta_json(const qsdc::io::Fields& meta) {
  return qsdc::io::fields_json(meta);
}

struct AttackSpec {
  bool present = false;
  double a = 1.0;
  double t = 1.0;
  std::string kind = "entangling";

  qsdc::AttackParams build() const {
    if (kind == "symmetric") {
      if (std::abs(a - t) > 1e-12) {
        throw CLI::ValidationError(
            "--attack", "symmetric attacks need equal intensities a == t");
      }
      return qsdc::AttackParams::basis_symmetric(1.0 - a);
    }
    return qsdc::AttackParams::from_intensities(a, t);
  }
};

struct SimulateOptions {
  std::string protocol = "fpp";
  int n_pairs = 1000;
  double control_prob = 0.1;
  AttackSpec attack;
  bool eve_first = true;
  bool eve_second = false;
  long trials = 0;  // > 0 switches to the single-check estimator
  std::uint64_t seed = 0;
  std::string message;
  int message_len = -1;
  int abort_threshold = 0;
  std::string out;
  std::string format = "csv";
};

qsdc::Protocol parse_protocol(const std::string& name) {
  return name == "dpp" ? qsdc::Protocol::Dpp : qsdc::Protocol::Fpp;
}

qsdc::BitString make_message(const SimulateOptions& opt) {
  if (!opt.message.empty()) {
    qsdc::BitString bits;
    bits.reserve(opt.message.size());
    for (char ch : opt.message) {
      if (ch != '0' && ch != '1') {
        throw CLI::ValidationError("--message", "expects a 0/1 string");
      }
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return bits;
  }
  int len = opt.message_len >= 0 ? opt.message_len : 2 * opt.n_pairs;
  if (len % 2 != 0) ++len;
  qsdc::BitString bits(static_cast<std::size_t>(len));
  qsdc::Rng rng(qsdc::mix_seed(opt.seed, 0xA5A5));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return bits;
}

int cmd_simulate(const SimulateOptions& opt) {
  const qsdc::Protocol protocol = parse_protocol(opt.protocol);

  qsdc::io::Fields meta = {
      {"version", std::string(qsdc::kVersion)},
      {"cmd", "simulate"},
      {"protocol", opt.protocol},
      {"seed", std::to_string(opt.seed)},
      {"n_pairs", std::to_string(opt.n_pairs)},
      {"control_prob", qsdc::io::format_number(opt.control_prob)},
      {"attack", opt.attack.present ? "on" : "off"},
      {"attack_a", qsdc::io::format_number(opt.attack.a)},
      {"attack_t", qsdc::io::format_number(opt.attack.t)},
      {"attack_kind", opt.attack.kind},
      {"eve_first", opt.eve_first ? "true" : "false"},
      {"eve_second", opt.eve_second ? "true" : "false"},
      {"abort_threshold", std::to_string(opt.abort_threshold)},
      {"trials", std::to_string(opt.trials)},
      {"message", opt.message.empty() ? "random" : opt.message},
  };

  qsdc::io::Fields data;
  if (opt.trials > 0) {
    if (!opt.attack.present) {
      throw CLI::ValidationError("--trials", "the estimator needs --attack");
    }
    const auto attack = opt.attack.build();
    const auto est =
        qsdc::estimate_detection_rate(protocol, attack, opt.trials, opt.seed);
    const double analytic =
        protocol == qsdc::Protocol::Fpp
            ? qsdc::analysis::detect_prob_fpp(attack.a(), attack.t())
            : qsdc::analysis::detect_prob_dpp(attack.b());
    data = qsdc::io::estimate_fields(est, analytic);
    if (protocol == qsdc::Protocol::Dpp) {
      // the |beta|^2 formula presumes equal disturbance in both bases, so
      // the per-basis rates are reported rather than assumed equal
      const auto rates = qsdc::estimate_dpp_detection_by_basis(
          attack, opt.trials, qsdc::mix_seed(opt.seed, 1));
      data.push_back({"z_basis_rate", qsdc::io::format_number(rates.z.rate)});
      data.push_back({"x_basis_rate", qsdc::io::format_number(rates.x.rate)});
    }
  } else {
    qsdc::ProtocolConfig cfg;
    cfg.n_pairs = opt.n_pairs;
    cfg.control_prob = opt.control_prob;
    if (opt.attack.present) cfg.attack = opt.attack.build();
    cfg.eve_on_first_transmission = opt.eve_first;
    cfg.eve_on_second_transmission = opt.eve_second;
    cfg.seed = opt.seed;
    cfg.abort_threshold = opt.abort_threshold;
    cfg.message_bits = make_message(opt);
    meta.push_back({"message_len", std::to_string(cfg.message_bits.size())});
    const auto report = qsdc::run_protocol(protocol, cfg);
    data = qsdc::io::report_fields(report);
  }

  std::string content;
  if (opt.format == "json") {
    nlohmann::json obj;
    obj["meta"] = meta_json(meta);
    obj["report"] = qsdc::io::fields_json(data);
    content = obj.dump(2) + "\n";
  } else {
    content = meta_comment(meta) + qsdc::io::fields_csv(data);
  }
  return write_output(opt.out, content);
}

struct SweepOptions {
  std::string protocol = "fpp";
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  long trials = 100000;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_sweep(const SweepOptions& opt) {
  const qsdc::Protocol protocol = parse_protocol(opt.protocol);

  struct Point {
    double a;
    double t;
  };
  std::vector<Point> points;
  if (protocol == qsdc::Protocol::Fpp) {
    for (double a : opt.grid) {
      for (double t : opt.grid) points.push_back({a, t});
    }
  } else {
    // grid values are |beta|^2 levels of the basis-symmetric attack
    for (double b : opt.grid) points.push_back({1.0 - b, 1.0 - b});
  }

  qsdc::analysis::CurveTable table;
  table.columns = protocol == qsdc::Protocol::Fpp
                      ? std::vector<std::string>{"a", "t", "empirical", "stderr",
                                                 "analytic"}
                      : std::vector<std::string>{"beta_sq", "empirical",
                                                 "stderr", "analytic"};
  table.rows.resize(points.size());

  // Grid points run in parallel on derived seeds; rows stay in grid order.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs =
      opt.jobs > 0 ? static_cast<std::size_t>(opt.jobs)
                   : std::min<std::size_t>(hw, points.size());
  std::vector<std::future<void>> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w]() {
      for (std::size_t i = w; i < points.size(); i += jobs) {
        const auto [a, t] = points[i];
        const auto attack =
            protocol == qsdc::Protocol::Fpp
                ? qsdc::AttackParams::from_intensities(a, t)
                : qsdc::AttackParams::basis_symmetric(1.0 - a);
        const auto est = qsdc::estimate_detection_rate(
            protocol, attack, opt.trials, qsdc::mix_seed(opt.seed, i));
        const double analytic =
            protocol == qsdc::Protocol::Fpp
                ? qsdc::analysis::detect_prob_fpp(a, t)
                : qsdc::analysis::detect_prob_dpp(1.0 - a);
        if (protocol == qsdc::Protocol::Fpp) {
          table.rows[i] = {a, t, est.rate, est.standard_error, analytic};
        } else {
          table.rows[i] = {1.0 - a, est.rate, est.standard_error, analytic};
        }
      }
    }));
  }
  for (auto& f : workers) f.get();

  const qsdc::io::Fields meta = {
      {"version", std::string(qsdc::kVersion)},
      {"cmd", "sweep"},
      {"protocol", opt.protocol},
      {"seed", std::to_string(opt.seed)},
      {"trials", std::to_string(opt.trials)},
      {"grid_points", std::to_string(points.size())},
  };
  std::string content;
  if (opt.format == "json") {
    nlohmann::json obj;
    obj["meta"] = meta_json(meta);
    obj["table"] = qsdc::io::table_json(table);
    content = obj.dump(2) + "\n";
  } else {
    content = meta_comment(meta) + qsdc::io::table_csv(table);
  }
  return write_output(opt.out, content);
}

struct CurvesOptions {
  std::string figure = "fig2";
  int points = 101;
  double control_prob = 0.5;
  std::string d_list = "0.2,0.4,0.5,0.6,0.8";
  double info_max = 10.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_curves(const CurvesOptions& opt) {
  qsdc::analysis::CurveTable table;
  qsdc::io::Fields meta = {
      {"version", std::string(qsdc::kVersion)},
      {"cmd", "curves"},
      {"figure", opt.figure},
      {"points", std::to_string(opt.points)},
      {"seed", std::to_string(opt.seed)},
  };
  if (opt.figure == "fig2") {
    table = qsdc::analysis::detection_info_table(opt.points);
  } else {
    const auto d_levels = parse_double_list(opt.d_list);
    table = qsdc::analysis::success_probability_table(
        opt.points, opt.info_max, opt.control_prob, d_levels);
    meta.push_back({"control_prob", qsdc::io::format_number(opt.control_prob)});
    meta.push_back({"d_list", opt.d_list});
    meta.push_back({"info_max", qsdc::io::format_number(opt.info_max)});
  }

  std::string content;
  if (opt.format == "json") {
    nlohmann::json obj;
    obj["meta"] = meta_json(meta);
    obj["table"] = qsdc::io::table_json(table);
    content = obj.dump(2) + "\n";
  } else {
    content = meta_comment(meta) + qsdc::io::table_csv(table);
  }
  return write_output(opt.out, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and analysis toolkit for two entanglement-based "
               "direct-communication protocols (dpp, fpp)"};
  app.require_subcommand(1);
  const std::uint64_t env_seed = default_seed();

  SimulateOptions sim;
  sim.seed = env_seed;
  auto* simulate = app.add_subcommand(
      "simulate", "Run one protocol instance (or the per-check estimator)");
  simulate->add_option("--protocol", sim.protocol, "dpp or fpp")
      ->check(CLI::IsMember({"dpp", "fpp"}));
  simulate->add_option("--n-pairs", sim.n_pairs, "message EPR pairs")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--control-prob", sim.control_prob,
                       "fraction c of channel uses spent on checks");
  std::string sim_attack;
  simulate->add_option("--attack", sim_attack,
                       "attack intensities 'a,t' (a=|alpha|^2, t=|n|^2)");
  simulate->add_option("--attack-kind", sim.attack.kind,
                       "entangling (default) or symmetric")
      ->check(CLI::IsMember({"entangling", "symmetric"}));
  simulate->add_flag("--eve-first,!--no-eve-first", sim.eve_first,
                     "attack the first transmission (default on)");
  simulate->add_flag("--eve-second", sim.eve_second,
                     "attack the second transmission");
  simulate->add_option("--trials", sim.trials,
                       "run the single-check Monte Carlo estimator instead");
  simulate->add_option("--seed", sim.seed, "random seed (QSDC_SEED overrides the default)");
  simulate->add_option("--message", sim.message, "explicit 0/1 message string");
  simulate->add_option("--message-len", sim.message_len,
                       "random message length (default: full capacity)");
  simulate->add_option("--abort-threshold", sim.abort_threshold,
                       "detections tolerated before aborting");
  simulate->add_option("--out", sim.out, "output path ('-' = stdout)");
  simulate->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  SweepOptions sweep;
  sweep.seed = env_seed;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Estimate detection rates over an attack-intensity grid");
  sweep_cmd->add_option("--protocol", sweep.protocol, "dpp or fpp")
      ->check(CLI::IsMember({"dpp", "fpp"}));
  std::string sweep_grid;
  sweep_cmd->add_option("--grid", sweep_grid,
                        "comma-separated intensity levels (fpp: a and t; "
                        "dpp: |beta|^2)");
  sweep_cmd->add_option("--trials", sweep.trials, "trials per grid point")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep.seed, "random seed");
  sweep_cmd->add_option("--jobs", sweep.jobs, "worker threads (default: auto)");
  sweep_cmd->add_option("--out", sweep.out, "output path ('-' = stdout)");
  sweep_cmd->add_option("--format", sweep.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CurvesOptions curves;
  curves.seed = env_seed;
  auto* curves_cmd =
      app.add_subcommand("curves", "Emit the bundled curve families as tables");
  curves_cmd->add_option("--figure", curves.figure, "fig2 or fig3")
      ->check(CLI::IsMember({"fig2", "fig3"}));
  curves_cmd->add_option("--points", curves.points, "grid resolution")
      ->check(CLI::Range(2, 1000000));
  curves_cmd->add_option("--control-prob", curves.control_prob,
                         "control-mode probability c (fig3)");
  curves_cmd->add_option("--d-list", curves.d_list,
                         "detection levels for fig3 columns");
  curves_cmd->add_option("--info-max", curves.info_max, "fig3 info-axis maximum");
  curves_cmd->add_option("--seed", curves.seed, "random seed (metadata only)");
  curves_cmd->add_option("--out", curves.out, "output path ('-' = stdout)");
  curves_cmd->add_option("--format", curves.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::uint64_t verify_seed = env_seed;
  long verify_trials = qsdc::verify::kDefaultTrials;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Run the full acceptance suite and print a pass/fail table");
  verify_cmd->add_option("--seed", verify_seed, "random seed");
  verify_cmd->add_option("--trials", verify_trials,
                         "Monte Carlo trials per comparison")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      if (!sim_attack.empty()) {
        const auto values = parse_double_list(sim_attack);
        if (values.size() != 2) {
          std::cerr << "error: --attack expects 'a,t'\n";
          return 2;
        }
        sim.attack.present = true;
        sim.attack.a = values[0];
        sim.attack.t = values[1];
      }
      return cmd_simulate(sim);
    }
    if (*sweep_cmd) {
      if (!sweep_grid.empty()) sweep.grid = parse_double_list(sweep_grid);
      return cmd_sweep(sweep);
    }
    if (*curves_cmd) {
      return cmd_curves(curves);
    }
    if (*verify_cmd) {
      const auto results =
          qsdc::verify::run_acceptance_checks(verify_seed, verify_trials);
      const int failures = qsdc::verify::print_results(std::cout, results);
      return failures == 0 ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
