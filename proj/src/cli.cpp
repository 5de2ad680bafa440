#include "qce/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qce/cluster.hpp"
#include "qce/errors.hpp"
#include "qce/oracle.hpp"

namespace qce {

namespace {

using nlohmann::json;

json complex_json(Complex v) { return {{"re", v.real()}, {"im", v.imag()}}; }

json model_meta(const SpinModel& model) {
  return {{"vertices", model.num_vertices()},
          {"edges", model.num_edges()},
          {"d", model.local_dim()},
          {"max_degree", model.max_degree()},
          {"rescale_factor", model.rescale_factor()}};
}

json diagnostics_json(const ExpansionDiagnostics& diag, bool timings) {
  json out = {{"supports", diag.support_count},
              {"polymers", diag.polymer_count},
              {"cluster_terms", diag.cluster_terms}};
  if (timings) out["wall_seconds"] = diag.wall_seconds;
  return out;
}

json expansion_json(const ExpansionResult& res, const SpinModel& model,
                    bool user_order, bool timings) {
  const BetaSpec spec = validate_beta(model, res.beta);
  json out = {{"order", res.order},
              {"order_source", user_order ? "user" : "auto"},
              {"in_region", res.in_region},
              {"rigorous", res.rigorous},
              {"t_m", complex_json(res.t_m)},
              {"log_z", complex_json(res.log_z)},
              {"z_estimate", complex_json(std::exp(res.log_z))},
              {"apriori_error", res.apriori_error},
              {"diagnostics", diagnostics_json(res.diagnostics, timings)}};
  if (std::isfinite(spec.radius_bound))
    out["region_bound"] = spec.radius_bound;
  else
    out["region_bound"] = nullptr;
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SpinModel build_model(const RunConfig& config) {
  if (config.model_path && config.preset_name)
    throw domain_error("exactly one model source allowed: --model or --preset");
  if (config.model_path) return load_model_file(*config.model_path);
  if (!config.preset_name)
    throw domain_error("a model source is required: --model PATH or --preset NAME");

  // Graph spec "name:args" with args "n", "RxC", or "n,degree".
  const std::string& spec = config.graph_spec;
  if (spec.empty()) throw domain_error("--preset requires --graph (e.g. path:8)");
  const auto colon = spec.find(':');
  const std::string graph = spec.substr(0, colon);
  std::map<std::string, double> params = config.params;
  if (colon != std::string::npos) {
    const std::string args = spec.substr(colon + 1);
    try {
      if (graph == "grid") {
        const auto x = args.find('x');
        if (x == std::string::npos) throw domain_error("grid spec needs RxC");
        params["rows"] = std::stod(args.substr(0, x));
        params["cols"] = std::stod(args.substr(x + 1));
      } else if (graph == "random_regular") {
        const auto comma = args.find(',');
        params["n"] = std::stod(args.substr(0, comma));
        if (comma != std::string::npos) params["degree"] = std::stod(args.substr(comma + 1));
      } else {
        params["n"] = std::stod(args);
      }
    } catch (const std::logic_error&) {
      throw domain_error("invalid graph spec '" + spec + "'");
    }
  }
  return preset(*config.preset_name, graph, params, config.seed);
}

void write_output(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.output) {
    std::ofstream file(*config.output);
    if (!file) throw domain_error("cannot open output file '" + *config.output + "'");
    file << text;
    return;
  }
  out << text;
}

int run_command(const RunConfig& config, std::ostream& out) {
  if (config.epsilon <= 0.0) throw domain_error("epsilon must be > 0");
  if (config.threads < 1) throw domain_error("threads must be >= 1");
  if (config.format != "json" && config.format != "csv")
    throw domain_error("format must be json or csv");

  if (config.command == "presets") {
    if (config.format == "csv") {
      std::ostringstream csv;
      csv << "kind,name,params\n";
      const json catalog = json::parse(preset_catalog_json());
      for (const auto& p : catalog.at("presets")) {
        csv << "preset," << p.at("name").get<std::string>() << ",";
        const auto& ps = p.at("params");
        for (std::size_t i = 0; i < ps.size(); ++i)
          csv << (i ? " " : "") << ps.at(i).get<std::string>();
        csv << "\n";
      }
      for (const auto& g : catalog.at("graphs")) {
        csv << "graph," << g.at("name").get<std::string>() << ",";
        const auto& ps = g.at("params");
        for (std::size_t i = 0; i < ps.size(); ++i)
          csv << (i ? " " : "") << ps.at(i).get<std::string>();
        csv << "\n";
      }
      write_output(config, csv.str(), out);
    } else {
      write_output(config, preset_catalog_json() + "\n", out);
    }
    return 0;
  }

  const SpinModel model = build_model(config);

  if (config.command == "estimate") {
    if (config.format == "csv")
      throw domain_error("csv format is only available for the sweep command");
    const ExpansionResult res = estimate(model, config.beta, config.epsilon,
                                         config.force_region, config.threads, config.order);
    json doc = {{"command", "estimate"},
                {"model", model_meta(model)},
                {"beta", complex_json(config.beta)},
                {"epsilon", config.epsilon}};
    doc.update(expansion_json(res, model, config.order.has_value(), config.timings));
    write_output(config, doc.dump(2) + "\n", out);
    return 0;
  }

  if (config.command == "exact") {
    if (config.format == "csv")
      throw domain_error("csv format is only available for the sweep command");
    const ExactResult res = exact_partition(model, config.beta);
    json doc = {{"command", "exact"},
                {"model", model_meta(model)},
                {"beta", complex_json(config.beta)},
                {"dim", res.dim},
                {"z", complex_json(res.z)},
                {"log_z_principal", complex_json(res.log_z_principal)},
                {"eigenvalues", res.eigenvalues}};
    write_output(config, doc.dump(2) + "\n", out);
    return 0;
  }

  if (config.command == "compare") {
    if (config.format == "csv")
      throw domain_error("csv format is only available for the sweep command");
    const ComparisonReport report = compare(model, config.beta, config.epsilon,
                                            config.force_region, config.threads,
                                            config.order);
    json doc = {{"command", "compare"},
                {"model", model_meta(model)},
                {"beta", complex_json(config.beta)},
                {"epsilon", config.epsilon},
                {"estimate", expansion_json(report.estimated, model,
                                            config.order.has_value(), config.timings)},
                {"exact",
                 {{"dim", report.exact.dim},
                  {"z", complex_json(report.exact.z)},
                  {"log_z_principal", complex_json(report.exact.log_z_principal)}}},
                {"relative_error", report.relative_error},
                {"pass", report.pass}};
    write_output(config, doc.dump(2) + "\n", out);
    return report.pass ? 0 : 3;
  }

  if (config.command == "sweep") {
    if (config.steps < 1) throw domain_error("sweep needs steps >= 1");
    const BetaSpec spec = validate_beta(model, config.beta);
    if (!spec.in_region && !config.force_region)
      throw domain_error(
          "sweep endpoint outside the convergence region: |beta| = " +
          std::to_string(std::abs(config.beta)) + " > 1/(e^4*Delta) = " +
          std::to_string(spec.radius_bound) + "; pass --force-region to proceed");
    const int m = config.order ? *config.order
                               : choose_truncation_order(model.num_vertices(),
                                                         config.epsilon);
    const ExpansionPolynomial poly = expansion_polynomial(model, m, config.threads);

    bool exact_available = true;
    std::vector<double> eigenvalues;
    double dim_check = 1.0;
    for (int i = 0; i < model.num_vertices(); ++i) {
      dim_check *= model.local_dim();
      if (dim_check > static_cast<double>(kOracleDimCap)) {
        exact_available = false;
        break;
      }
    }
    if (exact_available)
      eigenvalues = hermitian_eigenvalues(build_hamiltonian(model));

    const double log_d_term =
        model.num_vertices() * std::log(static_cast<double>(model.local_dim()));
    const double apriori = model.num_vertices() * std::exp(-static_cast<double>(m));

    json records = json::array();
    std::ostringstream csv;
    csv << "beta_re,beta_im,m,t_m_re,t_m_im,apriori_error,exact_available,rel_error\n";
    for (int j = 1; j <= config.steps; ++j) {
      const Complex beta = config.beta *
                           (static_cast<double>(j) / static_cast<double>(config.steps));
      const Complex t = poly.evaluate(beta, m);
      double rel = std::numeric_limits<double>::quiet_NaN();
      if (exact_available) {
        const ExactResult exact = exact_partition_from_eigenvalues(eigenvalues, beta);
        rel = std::abs(std::exp(t + log_d_term - exact.log_z_principal) - 1.0);
      }
      records.push_back({{"beta_re", beta.real()},
                         {"beta_im", beta.imag()},
                         {"m", m},
                         {"t_m_re", t.real()},
                         {"t_m_im", t.imag()},
                         {"apriori_error", apriori},
                         {"exact_available", exact_available},
                         {"rel_error", rel}});
      csv << format_double(beta.real()) << "," << format_double(beta.imag()) << "," << m
          << "," << format_double(t.real()) << "," << format_double(t.imag()) << ","
          << format_double(apriori) << "," << (exact_available ? 1 : 0) << ","
          << format_double(rel) << "\n";
    }
    if (config.format == "csv") {
      write_output(config, csv.str(), out);
    } else {
      json doc = {{"command", "sweep"},
                  {"model", model_meta(model)},
                  {"epsilon", config.epsilon},
                  {"order", m},
                  {"records", records}};
      write_output(config, doc.dump(2) + "\n", out);
    }
    return 0;
  }

  throw domain_error("unknown command '" + config.command + "'");
}

}  // namespace

Complex parse_beta(const std::string& text) {
  try {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
    return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw domain_error("invalid beta '" + text + "' (expected RE or RE,IM)");
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return run_command(config, out);
  } catch (const domain_error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  } catch (const resource_error& ex) {
    err << "resource error: " << ex.what() << "\n";
    return 2;
  } catch (const numeric_error& ex) {
    err << "numeric error: " << ex.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"truncated cluster expansion for quantum spin partition functions"};
  app.require_subcommand(1);

  RunConfig config;
  std::string beta_text = "0";
  std::vector<std::string> raw_params;
  std::string model_path, preset_name, output_path;
  int order = -1;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path, "model JSON file");
    cmd->add_option("--preset", preset_name, "preset name (see `qce presets`)");
    cmd->add_option("--graph", config.graph_spec,
                    "graph spec: path:N | cycle:N | grid:RxC | random_regular:N,D");
    cmd->add_option("--param", raw_params, "preset parameter KEY=VALUE (repeatable)");
    cmd->add_option("--seed", config.seed, "random seed for presets");
  };
  auto add_common_flags = [&](CLI::App* cmd) {
    cmd->add_option("--beta", beta_text, "inverse temperature RE[,IM]");
    cmd->add_option("--epsilon", config.epsilon, "multiplicative tolerance");
    cmd->add_option("--order", order, "truncation order override");
    cmd->add_flag("--force-region", config.force_region,
                  "proceed outside the convergence region (bound non-rigorous)");
    cmd->add_option("--threads", config.threads, "worker threads");
    cmd->add_option("--format", config.format, "output format: json | csv");
    cmd->add_option("--output", output_path, "output file (default stdout)");
    cmd->add_flag("--timings", config.timings, "include wall-clock diagnostics");
  };

  CLI::App* cmd_estimate = app.add_subcommand("estimate", "truncated expansion estimate");
  CLI::App* cmd_exact = app.add_subcommand("exact", "exact diagonalization");
  CLI::App* cmd_compare = app.add_subcommand("compare", "estimate vs exact");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "estimate along a beta grid");
  CLI::App* cmd_presets = app.add_subcommand("presets", "list available presets");
  for (CLI::App* cmd : {cmd_estimate, cmd_exact, cmd_compare, cmd_sweep}) {
    add_model_flags(cmd);
    add_common_flags(cmd);
  }
  cmd_sweep->add_option("--steps", config.steps, "grid points between 0 and beta");
  cmd_presets->add_option("--format", config.format, "output format: json | csv");
  cmd_presets->add_option("--output", output_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) {
      // --help and friends print through CLI11's machinery.
      return app.exit(ex, out, err);
    }
    err << "error: " << ex.what() << "\n";
    return 1;
  }

  config.command = app.get_subcommands().front()->get_name();
  if (!model_path.empty()) config.model_path = model_path;
  if (!preset_name.empty()) config.preset_name = preset_name;
  if (!output_path.empty()) config.output = output_path;
  if (order >= 0) config.order = order;
  try {
    config.beta = parse_beta(beta_text);
    for (const auto& kv : raw_params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw domain_error("invalid --param '" + kv + "' (expected KEY=VALUE)");
      try {
        config.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw domain_error("invalid --param value in '" + kv + "'");
      }
    }
  } catch (const domain_error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return run(config, out, err);
}

}  // namespace qce
