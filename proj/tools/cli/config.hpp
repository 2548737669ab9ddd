#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace qshift::cli {

/// Bad arguments or inputs detected before any work starts (exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a JSON object as CLI11 configuration. Top-level scalar and array
/// values feed the selected subcommand when it has an option of that name;
/// an object keyed by the subcommand name is a section whose keys must all
/// be known options of that subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

/// Every option value of a subcommand after parsing (command line, config
/// file or default), excluding run-local options such as the output
/// directory and thread count. `hash` is a hex digest of `values`.
struct EffectiveConfig {
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::string hash;
};

EffectiveConfig effective_config(const CLI::App& sub);

/// provenance.json written next to every command's outputs.
struct Provenance {
  Provenance(std::string cmd, EffectiveConfig cfg)
      : command(std::move(cmd)), config(std::move(cfg)) {}

  std::string command;
  EffectiveConfig config;
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::vector<std::string> outputs;  // relative to the output directory
  std::vector<std::string> warnings;

  void write(const std::filesystem::path& out_dir) const;
};

}  // namespace qshift::cli
