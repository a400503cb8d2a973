#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "metaimpact/config.hpp"
#include "metaimpact/errors.hpp"
#include "metaimpact/pipeline.hpp"

namespace mi = metaimpact;

namespace {

std::string flag_name(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

void print_stages(const std::vector<mi::StageReport>& stages) {
  for (const auto& s : stages) {
    std::cerr << s.name << ": " << s.status;
    if (!s.message.empty()) std::cerr << " (" << s.message << ")";
    std::cerr << " " << s.seconds << "s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  mi::RunConfig config;
  mi::ParamTable table;
  config.bind(table);

  CLI::App app{"Hidden order detection and market impact analytics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key = value configuration file; flags override it");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  // Every configuration key is also a flag; values are applied after the file.
  std::map<std::string, std::string> flags;
  for (const auto& p : table.params()) {
    app.add_option(flag_name(p.key), flags[p.key], p.help + " [" + p.get() + "]");
  }

  const std::string stage_names[] = {"synth", "detect", "metrics", "impact", "profile", "pca", "score", "run"};
  const std::map<std::string, std::string> descriptions = {
      {"synth", "generate a synthetic market with ground truth into --output-dir"},
      {"detect", "sign trades and segment member series into hidden_orders.csv"},
      {"metrics", "compute f_mo and participation for hidden_orders.csv"},
      {"impact", "filter orders, measure impacts, curves and power-law fits"},
      {"profile", "impact-path profile, reversion, trading profile and timing"},
      {"pca", "allometric exponents with bootstrap confidence intervals"},
      {"score", "compare hidden_orders.csv with ground truth"},
      {"run", "detect, metrics, impact, profile, pca and score in one go"}};
  for (const auto& name : stage_names) app.add_subcommand(name, descriptions.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_file.empty()) table.apply(mi::read_key_values(config_file));
    if (const char* env = std::getenv("METAIMPACT_WORKERS")) table.set("workers", env);
    for (const auto& p : table.params()) {
      if (app.count(flag_name(p.key)) > 0) table.set(p.key, flags[p.key]);
    }
    if (print_config) {
      std::cout << table.serialize();
      return 0;
    }
    config.validate();

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "run") {
      print_stages(mi::run_pipeline(config));
      return 0;
    }
    mi::StageReport report;
    if (command == "synth") {
      report = mi::stage_synth(config);
    } else if (command == "pca") {
      report = mi::stage_pca(config);
    } else {
      mi::IngestReport ingest;
      const auto tape = mi::load_tape(config, &ingest);
      if (command == "detect") report = mi::stage_detect(config, tape, &ingest);
      if (command == "metrics") report = mi::stage_metrics(config, tape);
      if (command == "impact") report = mi::stage_impact(config, tape);
      if (command == "profile") report = mi::stage_profile(config, tape);
      if (command == "score") report = mi::stage_score(config, tape);
    }
    print_stages({report});
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mi::exit_code_for(e);
  }
}
