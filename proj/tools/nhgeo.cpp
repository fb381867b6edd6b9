#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <omp.h>
#include <string>

#include "nhgeo/errors.hpp"
#include "nhgeo/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kValidation = 3 };

std::string output_path(const std::string& prefix, const std::string& sub, const std::string& ext) {
  return prefix + "_" + sub + ext;
}

void emit(const std::string& prefix, const std::string& sub, const std::string& ext,
          const std::function<void(std::ostream&)>& body) {
  if (prefix.empty()) {
    body(std::cout);
    return;
  }
  const std::string path = output_path(prefix, sub, ext);
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw nhgeo::ConfigError("cannot write output file '" + path + "'");
  body(out);
  std::cerr << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum geometry of non-Hermitian Bloch bands: batch experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_prefix;
  int threads = 0;

  const std::map<std::string, std::string> subcommands = {
      {"spectrum", "complex band energies over the momentum grid"},
      {"geometry", "quantum geometric tensor and connection difference per band"},
      {"spread", "geometry-induced wave-packet spread over a k_c x sigma sweep"},
      {"response", "numeric and closed-form velocity response trace C(t)"},
      {"integrated", "regularized frequency integral of the response over a k_c sweep"},
      {"validate", "run every invariant check and write a JSON report"}};
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_prefix, "output path prefix (default: stdout, or 'output' from the config)");
    sub->add_option("--threads", threads, "OpenMP threads (default: runtime setting)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  if (threads > 0) omp_set_num_threads(threads);

  try {
    const nhgeo::ExperimentConfig cfg = nhgeo::load_config(config_path);
    const std::string prefix = out_prefix.empty() ? cfg.output : out_prefix;
    if (sub == "validate") {
      const nhgeo::ValidationReport rep = nhgeo::run_validate(cfg);
      emit(prefix, sub, ".json", [&](std::ostream& os) {
        nlohmann::json j = rep.to_json();
        j["config"] = cfg.source;
        os << j.dump(2) << '\n';
      });
      for (const auto& item : rep.items)
        if (!item.pass) std::cerr << "FAIL " << item.name << (item.note.empty() ? "" : ": " + item.note) << '\n';
      return rep.all_pass() ? kOk : kValidation;
    }
    nhgeo::CsvTable table;
    if (sub == "spectrum")
      table = nhgeo::run_spectrum(cfg);
    else if (sub == "geometry")
      table = nhgeo::run_geometry_scan(cfg);
    else if (sub == "spread")
      table = nhgeo::run_spread(cfg);
    else if (sub == "response")
      table = nhgeo::run_response_trace(cfg);
    else
      table = nhgeo::run_integrated(cfg);
    emit(prefix, sub, ".csv", [&](std::ostream& os) { table.write(os); });
    return kOk;
  } catch (const nhgeo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const nhgeo::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
