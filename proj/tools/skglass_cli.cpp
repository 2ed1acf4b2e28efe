// skglass batch experiment driver.
//
// Subcommands run estimator / comparison jobs over the cartesian product of
// the n-list and beta-list and write a JSON report (full provenance) plus a
// fixed-schema CSV table. All randomness derives from --seed, so identical
// configs reproduce byte-identical CSV bodies for any --jobs value.
//
// Exit codes: 0 ok, 1 usage/validation error, 2 bound-violation verdict,
// 3 internal numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skglass/skglass.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skglass;

namespace {

struct CliOptions {
  std::string config_path;
  std::string env = "gaussian";
  std::string env_a = "rademacher";
  std::string env_b = "gaussian";
  std::vector<int> n_list;
  int p_order = 2;
  std::vector<double> beta_list;
  double field_h = 0.0;
  int replicas = 0;  // 0 -> per-command default
  std::uint64_t seed = 1;
  int grid_points = 21;
  double t0 = 1.0;
  std::string function_id = "all";
  bool scaled_beta = false;
  double c_ground_state = 16.0;
  double c_symmetric = 16.0;
  double c_fluctuation = 16.0;
  bool symmetric_rate = false;
  bool per_replica = false;
  bool extrapolate = false;
  int bootstrap = 0;
  int max_n_p2 = 24;
  int max_n_p3 = 14;
  std::string output_dir = ".";
  std::string format = "both";
  int jobs = 0;  // 0 -> hardware concurrency
  std::string tag;
};

struct CommandContext {
  std::string command;
  CliOptions opts;
  EstimatorOptions estimator;
  BoundSpec bounds;
};

int effective_jobs(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

// CLI flags override config-file values: apply the file only to options the
// user did not pass explicitly.
void apply_config_file(const CLI::App& cmd, CliOptions& o) {
  std::ifstream in(o.config_path);
  if (!in.good())
    throw validation_error("config file not found: " + o.config_path);
  json cfg = json::parse(in);

  const auto passed = [&](const std::string& flag) {
    return cmd.count(flag) > 0;
  };
  static const std::vector<std::string> known{
      "command",     "env",         "env_a",          "env_b",
      "n",           "p",           "beta",           "h",
      "replicas",    "seed",        "grid_points",    "t0",
      "function",    "scaled_beta", "c_ground_state",     "c_symmetric",
      "c_fluctuation",    "symmetric_rate", "per_replica", "extrapolate",
      "bootstrap",
      "max_n_p2",    "max_n_p3",    "output_dir",     "format",
      "jobs",        "tag"};
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw validation_error("config file: unknown field '" + key + "'");
  }

  if (cfg.contains("command") &&
      cfg.at("command").get<std::string>() != cmd.get_name())
    throw validation_error("config file names command '" +
                           cfg.at("command").get<std::string>() +
                           "' but subcommand '" + cmd.get_name() +
                           "' was invoked");

  const auto get_list_int = [](const json& v) {
    std::vector<int> out;
    if (v.is_array())
      for (const auto& e : v) out.push_back(e.get<int>());
    else
      out.push_back(v.get<int>());
    return out;
  };
  const auto get_list_double = [](const json& v) {
    std::vector<double> out;
    if (v.is_array())
      for (const auto& e : v) out.push_back(e.get<double>());
    else
      out.push_back(v.get<double>());
    return out;
  };
  const auto env_text = [](const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };

  if (cfg.contains("env") && !passed("--env")) o.env = env_text(cfg["env"]);
  if (cfg.contains("env_a") && !passed("--env-a"))
    o.env_a = env_text(cfg["env_a"]);
  if (cfg.contains("env_b") && !passed("--env-b"))
    o.env_b = env_text(cfg["env_b"]);
  if (cfg.contains("n") && !passed("--n")) o.n_list = get_list_int(cfg["n"]);
  if (cfg.contains("p") && !passed("--p")) o.p_order = cfg["p"].get<int>();
  if (cfg.contains("beta") && !passed("--beta"))
    o.beta_list = get_list_double(cfg["beta"]);
  if (cfg.contains("h") && !passed("--h")) o.field_h = cfg["h"].get<double>();
  if (cfg.contains("replicas") && !passed("--replicas"))
    o.replicas = cfg["replicas"].get<int>();
  if (cfg.contains("seed") && !passed("--seed"))
    o.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("grid_points") && !passed("--grid-points"))
    o.grid_points = cfg["grid_points"].get<int>();
  if (cfg.contains("t0") && !passed("--t0")) o.t0 = cfg["t0"].get<double>();
  if (cfg.contains("function") && !passed("--function"))
    o.function_id = cfg["function"].get<std::string>();
  if (cfg.contains("scaled_beta") && !passed("--scaled-beta"))
    o.scaled_beta = cfg["scaled_beta"].get<bool>();
  if (cfg.contains("c_ground_state") && !passed("--c-ground-state"))
    o.c_ground_state = cfg["c_ground_state"].get<double>();
  if (cfg.contains("c_symmetric") && !passed("--c-symmetric"))
    o.c_symmetric = cfg["c_symmetric"].get<double>();
  if (cfg.contains("c_fluctuation") && !passed("--c-fluctuation"))
    o.c_fluctuation = cfg["c_fluctuation"].get<double>();
  if (cfg.contains("symmetric_rate") && !passed("--symmetric-rate"))
    o.symmetric_rate = cfg["symmetric_rate"].get<bool>();
  if (cfg.contains("per_replica") && !passed("--per-replica"))
    o.per_replica = cfg["per_replica"].get<bool>();
  if (cfg.contains("extrapolate") && !passed("--extrapolate"))
    o.extrapolate = cfg["extrapolate"].get<bool>();
  if (cfg.contains("bootstrap") && !passed("--bootstrap"))
    o.bootstrap = cfg["bootstrap"].get<int>();
  if (cfg.contains("max_n_p2") && !passed("--max-n-p2"))
    o.max_n_p2 = cfg["max_n_p2"].get<int>();
  if (cfg.contains("max_n_p3") && !passed("--max-n-p3"))
    o.max_n_p3 = cfg["max_n_p3"].get<int>();
  if (cfg.contains("output_dir") && !passed("--output-dir"))
    o.output_dir = cfg["output_dir"].get<std::string>();
  if (cfg.contains("format") && !passed("--format"))
    o.format = cfg["format"].get<std::string>();
  if (cfg.contains("jobs") && !passed("--jobs"))
    o.jobs = cfg["jobs"].get<int>();
  if (cfg.contains("tag") && !passed("--tag"))
    o.tag = cfg["tag"].get<std::string>();
}

json config_echo(const CommandContext& ctx) {
  const CliOptions& o = ctx.opts;
  return json{{"command", ctx.command},
              {"env", o.env},
              {"env_a", o.env_a},
              {"env_b", o.env_b},
              {"n", o.n_list},
              {"p", o.p_order},
              {"beta", o.beta_list},
              {"h", o.field_h},
              {"replicas", o.replicas},
              {"seed", o.seed},
              {"grid_points", o.grid_points},
              {"t0", o.t0},
              {"function", o.function_id},
              {"scaled_beta", o.scaled_beta},
              {"c_ground_state", o.c_ground_state},
              {"c_symmetric", o.c_symmetric},
              {"c_fluctuation", o.c_fluctuation},
              {"symmetric_rate", o.symmetric_rate},
              {"per_replica", o.per_replica},
              {"extrapolate", o.extrapolate},
              {"bootstrap", o.bootstrap},
              {"max_n_p2", o.max_n_p2},
              {"max_n_p3", o.max_n_p3},
              {"output_dir", o.output_dir},
              {"format", o.format},
              {"jobs", o.jobs},
              {"tag", o.tag}};
}

void write_reports(const CommandContext& ctx, const CsvTable& table,
                   json results, const json& extras = json::object()) {
  const CliOptions& o = ctx.opts;
  fs::create_directories(o.output_dir);
  const fs::path base = fs::path(o.output_dir) / (o.tag + ctx.command);

  if (o.format == "csv" || o.format == "both") {
    std::ofstream csv(base.string() + ".csv", std::ios::binary);
    csv << table.to_string();
  }
  if (o.format == "json" || o.format == "both") {
    json report{{"schema_version", kCsvSchemaVersion},
                {"command", ctx.command},
                {"generated_at", iso_timestamp()},
                {"config", config_echo(ctx)},
                {"results", std::move(results)}};
    for (const auto& [key, value] : extras.items()) report[key] = value;
    std::ofstream out(base.string() + ".json", std::ios::binary);
    out << report.dump(1) << "\n";
  }
  std::cout << ctx.command << ": " << table.row_count() << " row(s) -> "
            << base.string() << ".{csv,json}\n";
}

void maybe_write_per_replica(const CommandContext& ctx, int cell,
                             const std::vector<ReplicaValue>& values) {
  if (!ctx.opts.per_replica || values.empty()) return;
  fs::create_directories(ctx.opts.output_dir);
  const fs::path path =
      fs::path(ctx.opts.output_dir) /
      (ctx.opts.tag + ctx.command + ".cell" + std::to_string(cell) +
       ".replicas.csv");
  std::ofstream out(path, std::ios::binary);
  out << per_replica_csv(values).to_string();
}

int run_free_energy(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  if (o.replicas == 0) o.replicas = 1000;
  const EnvironmentSpec env = parse_environment(o.env);
  CsvTable table({"env", "n", "p", "beta", "h", "replicas", "seed",
                  "alpha_hat", "stderr"});
  json results = json::array();
  std::vector<ExtrapolationPoint> series;
  int cell = 0;
  for (const int n : o.n_list) {
    for (const double beta : o.beta_list) {
      const ModelParams params{n, o.p_order, beta, o.field_h};
      const auto fe =
          estimate_free_energy(env, params, o.replicas, o.seed, ctx.estimator);
      table.row()
          .add(env.name())
          .add(n)
          .add(o.p_order)
          .add(beta)
          .add(o.field_h)
          .add(o.replicas)
          .add(o.seed)
          .add(fe.alpha_hat)
          .add(fe.stderr_value);
      json cell_json = fe;
      cell_json["cell"] = cell;
      results.push_back(std::move(cell_json));
      maybe_write_per_replica(ctx, cell, fe.per_replica);
      if (o.beta_list.size() == 1)
        series.push_back({n, fe.alpha_hat, fe.stderr_value});
      ++cell;
    }
  }
  json extras = json::object();
  if (o.extrapolate && series.size() >= 3) {
    extras["extrapolation"] = extrapolate_limit(series, DecayModel::inv_sqrt_n);
    extras["extrapolation"]["model"] = "inv_sqrt_n";
  }
  write_reports(ctx, table, std::move(results), extras);
  return 0;
}

int run_ground_state(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  if (o.replicas == 0) o.replicas = 1000;
  const EnvironmentSpec env = parse_environment(o.env);
  CsvTable table({"env", "n", "replicas", "seed", "density_hat", "stderr"});
  json results = json::array();
  std::vector<ExtrapolationPoint> series;
  int cell = 0;
  for (const int n : o.n_list) {
    const auto gs = estimate_ground_state_density(env, n, o.replicas, o.seed,
                                                  ctx.estimator);
    table.row()
        .add(env.name())
        .add(n)
        .add(o.replicas)
        .add(o.seed)
        .add(gs.density_hat)
        .add(gs.stderr_value);
    json cell_json = gs;
    cell_json["cell"] = cell;
    results.push_back(std::move(cell_json));
    maybe_write_per_replica(ctx, cell, gs.per_replica);
    series.push_back({n, gs.density_hat, gs.stderr_value});
    ++cell;
  }
  json extras = json::object();
  if (o.extrapolate && series.size() >= 3) {
    extras["extrapolation"] =
        extrapolate_limit(series, DecayModel::inv_n_sixth);
    extras["extrapolation"]["model"] = "inv_n_sixth";
  }
  write_reports(ctx, table, std::move(results), extras);
  return 0;
}

int run_compare(CommandContext& ctx, CompareQuantity quantity) {
  CliOptions& o = ctx.opts;
  if (o.replicas == 0)
    o.replicas = quantity == CompareQuantity::free_energy ? 2000 : 1000;
  const EnvironmentSpec env_a = parse_environment(o.env_a);
  const EnvironmentSpec env_b = parse_environment(o.env_b);
  ComparisonOptions copts;
  copts.estimator = ctx.estimator;
  copts.bounds = ctx.bounds;
  copts.use_symmetric_rate = o.symmetric_rate;

  const bool fe = quantity == CompareQuantity::free_energy;
  std::vector<std::string> columns{"env_a", "env_b", "n"};
  if (fe) {
    columns.push_back("p");
    columns.push_back("beta");
    columns.push_back("h");
  }
  for (const char* c : {"replicas", "seed", "gap", "stderr", "bound",
                        "bound_kind", "constant", "ratio", "verdict"})
    columns.push_back(c);
  CsvTable table(columns);

  json results = json::array();
  bool any_violated = false;
  for (const int n : o.n_list) {
    for (std::size_t bi = 0; bi < (fe ? o.beta_list.size() : 1); ++bi) {
      ComparisonReport report;
      if (fe) {
        const ModelParams params{n, o.p_order, o.beta_list[bi], o.field_h};
        report = compare_free_energy(env_a, env_b, params, o.replicas, o.seed,
                                     copts);
      } else {
        report =
            compare_ground_state(env_a, env_b, n, o.replicas, o.seed, copts);
      }
      auto row = table.row();
      row.add(report.env_a).add(report.env_b).add(n);
      if (fe) row.add(o.p_order).add(o.beta_list[bi]).add(o.field_h);
      row.add(o.replicas)
          .add(o.seed)
          .add(report.gap_hat)
          .add(report.combined_stderr)
          .add(report.theoretical_bound)
          .add(report.bound_kind)
          .add(report.constant_used)
          .add(report.theoretical_bound > 0.0
                   ? report.gap_hat / report.theoretical_bound
                   : 0.0)
          .add(to_string(report.verdict));
      any_violated |= report.verdict == Verdict::violated;
      results.push_back(report);
    }
  }
  write_reports(ctx, table, std::move(results));
  if (any_violated)
    std::cerr << ctx.command << ": bound violation verdict reported\n";
  return any_violated ? 2 : 0;
}

int run_interpolate(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  if (o.replicas == 0) o.replicas = 1000;
  const EnvironmentSpec env = parse_environment(o.env);
  const int n = o.n_list.front();
  const FieldModel model{n, o.p_order, o.field_h};
  const auto scan = scan_interpolation_path(env, model, o.t0, o.grid_points,
                                            o.replicas, o.seed, ctx.estimator);
  CsvTable table({"env", "n", "p", "h", "t0", "grid_points", "replicas",
                  "seed", "s", "alpha", "alpha_stderr", "deriv_fd",
                  "deriv_stderr"});
  for (const auto& s : scan.samples) {
    auto row = table.row();
    row.add(env.name())
        .add(n)
        .add(o.p_order)
        .add(o.field_h)
        .add(o.t0)
        .add(o.grid_points)
        .add(o.replicas)
        .add(o.seed)
        .add(s.s)
        .add(s.alpha)
        .add(s.alpha_stderr);
    if (s.interior)
      row.add(s.deriv_fd).add(s.deriv_stderr);
    else
      row.add("").add("");
  }
  json results = json::array();
  results.push_back(scan);
  write_reports(ctx, table, std::move(results));
  return 0;
}

int run_ibp_check(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  const EnvironmentSpec env = parse_environment(o.env);
  std::vector<TestFunction> functions;
  for (auto& f : ibp_test_catalog()) {
    if (o.function_id == "all" || o.function_id == f.id)
      functions.push_back(std::move(f));
  }
  if (functions.empty())
    throw validation_error("ibp-check: unknown function '" + o.function_id +
                           "' (sin, cos, cubic_rational, identity, gibbs_n2, "
                           "all)");
  CsvTable table({"env", "function", "method", "defect", "bound3", "bound4",
                  "verdict"});
  json results = json::array();
  bool any_violated = false;
  for (const auto& f : functions) {
    const IbpReport report = ibp_defect(env, f);
    const bool ok3 = report.defect <= report.bound3 + 1e-12;
    const bool ok4 = !report.bound4 || report.defect <= *report.bound4 + 1e-12;
    const bool violated = !(ok3 && ok4);
    any_violated |= violated;
    table.row()
        .add(report.env_id)
        .add(report.function_id)
        .add(report.method == IbpMethod::exact_discrete_sum
                 ? "exact_discrete_sum"
                 : "quadrature")
        .add(report.defect)
        .add(report.bound3)
        .add(report.bound4 ? format_float(*report.bound4) : std::string())
        .add(violated ? "violated" : "within_bound");
    results.push_back(report);
  }
  write_reports(ctx, table, std::move(results));
  return any_violated ? 2 : 0;
}

int run_fluctuations(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  if (o.replicas == 0) o.replicas = 1000;
  const EnvironmentSpec env = parse_environment(o.env);
  const double abs_third = analytic_moments(env).abs_third;
  CsvTable table({"env", "n", "p", "beta", "beta_scaled", "h", "replicas",
                  "seed", "d", "third_abs_central", "stderr", "fluctuation_bound",
                  "ratio"});
  json results = json::array();
  std::vector<double> log_d, log_m;
  for (const int n : o.n_list) {
    for (const double beta_in : o.beta_list) {
      const double scale =
          std::sqrt(std::pow(static_cast<double>(n), o.p_order - 1));
      const double beta = o.scaled_beta ? beta_in * scale : beta_in;
      const ModelParams params{n, o.p_order, beta, o.field_h};
      const auto est = estimate_fluctuation_moment(env, params, o.replicas,
                                                   o.seed, ctx.estimator);
      const double bscaled = std::abs(est.beta_scaled);
      const double envelope = ctx.bounds.c_fluctuation * abs_third * bscaled *
                              bscaled * bscaled *
                              std::pow(static_cast<double>(est.d), 1.5);
      table.row()
          .add(env.name())
          .add(n)
          .add(o.p_order)
          .add(beta)
          .add(est.beta_scaled)
          .add(o.field_h)
          .add(o.replicas)
          .add(o.seed)
          .add(est.d)
          .add(est.third_abs_central)
          .add(est.stderr_value)
          .add(envelope)
          .add(envelope > 0.0 ? est.third_abs_central / envelope : 0.0);
      if (est.third_abs_central > 0.0 && o.beta_list.size() == 1) {
        log_d.push_back(std::log(static_cast<double>(est.d)));
        log_m.push_back(std::log(est.third_abs_central));
      }
      results.push_back(est);
    }
  }
  json extras = json::object();
  if (log_d.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(log_d.size());
    for (std::size_t i = 0; i < log_d.size(); ++i) {
      sx += log_d[i];
      sy += log_m[i];
      sxx += log_d[i] * log_d[i];
      sxy += log_d[i] * log_m[i];
    }
    extras["loglog_slope"] = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  write_reports(ctx, table, std::move(results), extras);
  return 0;
}

int run_bounds_table(CommandContext& ctx) {
  CliOptions& o = ctx.opts;
  const EnvironmentSpec env = parse_environment(o.env);
  const bool symmetric = analytic_moments(env).symmetric_class;
  CsvTable table({"env", "n", "p", "beta", "fe_gap_bound", "fe_gap_bound_pspin",
                  "gs_gap_bound", "gs_gap_bound_symmetric",
                  "fe_gap_bound_symmetric"});
  json results = json::array();
  for (const int n : o.n_list) {
    for (const double beta : o.beta_list) {
      const double t1 = free_energy_gap_bound(env, n, beta);
      const double ps = pspin_gap_bound(env, n, o.p_order, beta);
      const double t2 = ground_state_gap_bound(env, n, ctx.bounds);
      json row_json{{"env", env.name()},    {"n", n},
                    {"p", o.p_order},       {"beta", beta},
                    {"fe_gap_bound", t1},   {"fe_gap_bound_pspin", ps},
                    {"gs_gap_bound", t2}};
      auto row = table.row();
      row.add(env.name()).add(n).add(o.p_order).add(beta).add(t1).add(ps).add(
          t2);
      if (symmetric) {
        const double t2s = ground_state_gap_bound_symmetric(env, n, ctx.bounds);
        const double ssk = symmetric_gap_bound_sk(env, n, beta, ctx.bounds);
        row.add(t2s).add(ssk);
        row_json["gs_gap_bound_symmetric"] = t2s;
        row_json["fe_gap_bound_symmetric"] = ssk;
      } else {
        row.add("").add("");
      }
      results.push_back(std::move(row_json));
    }
  }
  write_reports(ctx, table, std::move(results));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skglass: exact SK / p-spin thermodynamics under arbitrary "
               "normalized disorder, with universality-bound experiments"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");  // frees --h for the field

  CliOptions opts;
  const auto add_command = [&](const std::string& name,
                               const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--config", opts.config_path,
                    "JSON config file (flags override file values)");
    cmd->add_option("--env", opts.env, "environment name or inline JSON spec");
    cmd->add_option("--env-a", opts.env_a, "first environment");
    cmd->add_option("--env-b", opts.env_b, "second environment");
    cmd->add_option("--n", opts.n_list, "system sizes")->delimiter(',');
    cmd->add_option("--p", opts.p_order, "interaction order (>= 2)");
    cmd->add_option("--beta", opts.beta_list, "inverse temperatures")
        ->delimiter(',');
    cmd->add_option("--h", opts.field_h, "magnetic field");
    cmd->add_option("--replicas", opts.replicas, "disorder replicas");
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--grid-points", opts.grid_points,
                    "interpolation grid points");
    cmd->add_option("--t0", opts.t0, "interpolation path endpoint");
    cmd->add_option("--function", opts.function_id,
                    "IBP test function id or 'all'");
    cmd->add_flag("--scaled-beta", opts.scaled_beta,
                  "interpret --beta as the per-variable coefficient");
    cmd->add_option("--c-ground-state", opts.c_ground_state,
                    "ground-state universal constant");
    cmd->add_option("--c-symmetric", opts.c_symmetric,
                    "symmetric-class universal constant");
    cmd->add_option("--c-fluctuation", opts.c_fluctuation,
                    "fluctuation universal constant");
    cmd->add_flag("--symmetric-rate", opts.symmetric_rate,
                  "use the fourth-moment comparison rate");
    cmd->add_flag("--per-replica", opts.per_replica,
                  "write per-replica CSV files");
    cmd->add_option("--bootstrap", opts.bootstrap,
                    "bootstrap resamples for stderr (0 = sample variance)");
    cmd->add_flag("--extrapolate", opts.extrapolate,
                  "append a large-n extrapolation fit to the JSON report");
    cmd->add_option("--max-n-p2", opts.max_n_p2, "engine capacity for p = 2");
    cmd->add_option("--max-n-p3", opts.max_n_p3, "engine capacity for p = 3");
    cmd->add_option("--output-dir", opts.output_dir, "report directory");
    cmd->add_option("--format", opts.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--jobs", opts.jobs,
                    "worker threads (0 = all cores; results identical)");
    cmd->add_option("--tag", opts.tag, "output filename prefix");
    return cmd;
  };

  add_command("free-energy", "disorder-averaged free energy");
  add_command("ground-state", "ground-state density");
  add_command("compare-fe", "free-energy universality comparison");
  add_command("compare-gs", "ground-state universality comparison");
  add_command("interpolate", "two-environment interpolation path scan");
  add_command("ibp-check", "integration-by-parts defect vs bounds");
  add_command("fluctuations", "third absolute central moment of log Z");
  add_command("bounds-table", "theoretical bounds (no simulation)");

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (!opts.config_path.empty()) apply_config_file(*cmd, opts);
    if (opts.n_list.empty()) opts.n_list = {8};
    if (opts.beta_list.empty()) opts.beta_list = {1.0};

    CommandContext ctx;
    ctx.command = cmd->get_name();
    ctx.opts = opts;
    ctx.estimator.jobs = effective_jobs(opts.jobs);
    ctx.estimator.keep_per_replica = opts.per_replica;
    ctx.estimator.bootstrap_resamples = opts.bootstrap;
    ctx.estimator.limits.max_n_p2 = opts.max_n_p2;
    ctx.estimator.limits.max_n_p3 = opts.max_n_p3;
    ctx.bounds = BoundSpec{opts.c_ground_state, opts.c_symmetric, opts.c_fluctuation};

    if (ctx.command == "free-energy") return run_free_energy(ctx);
    if (ctx.command == "ground-state") return run_ground_state(ctx);
    if (ctx.command == "compare-fe")
      return run_compare(ctx, CompareQuantity::free_energy);
    if (ctx.command == "compare-gs")
      return run_compare(ctx, CompareQuantity::ground_state_density);
    if (ctx.command == "interpolate") return run_interpolate(ctx);
    if (ctx.command == "ibp-check") return run_ibp_check(ctx);
    if (ctx.command == "fluctuations") return run_fluctuations(ctx);
    if (ctx.command == "bounds-table") return run_bounds_table(ctx);
    std::cerr << "unknown command\n";
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config/JSON error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
