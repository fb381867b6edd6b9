#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhgeo/model.hpp"
#include "nhgeo/response.hpp"

namespace nhgeo {

struct PacketConfig {
  std::size_t band = 0;
  double k_c = 0.0;  // radians after unit conversion
  double sigma = 8.0;  // capped at L/8 when not given
  std::optional<double> x_c;  // defaults to L/2
};

struct SweepConfig {
  std::string variable = "k_c";
  std::vector<double> values;  // radians after unit conversion
  std::vector<double> sigmas;
};

struct ExperimentConfig {
  PTChainModel model;
  PacketConfig packet;
  BroadeningParams broadening;
  SweepConfig sweep;
  std::string output;
  std::optional<std::uint64_t> gauge_twist_seed;
  nlohmann::json source;  // config as read, echoed into every output

  double x_center() const { return packet.x_c.value_or(0.5 * static_cast<double>(model.sites)); }
};

/// Parses and validates a configuration; throws ConfigError on unknown keys or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string config_echo;

  void write(std::ostream& os) const;
};

CsvTable run_spectrum(const ExperimentConfig& cfg);
CsvTable run_geometry_scan(const ExperimentConfig& cfg);
CsvTable run_spread(const ExperimentConfig& cfg);
CsvTable run_response_trace(const ExperimentConfig& cfg);
CsvTable run_integrated(const ExperimentConfig& cfg);

struct ValidationItem {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

ValidationReport run_validate(const ExperimentConfig& cfg);

/// Formats a value with 17 significant digits in scientific notation.
std::string format_number(double v);

}  // namespace nhgeo
