#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <iterator>
#include <map>

#include "qshift/seeding.hpp"
#include "qshift/textio.hpp"
#include "qshift/version.hpp"

namespace qshift::cli {

namespace {

using nlohmann::ordered_json;

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw CLI::ConfigError("config key '" + key + "' must be a string, number, bool or list");
}

CLI::ConfigItem make_item(const std::string& section, const std::string& key,
                          const nlohmann::json& v) {
  CLI::ConfigItem item;
  item.parents = {section};
  item.name = key;
  if (v.is_array()) {
    for (const auto& e : v) item.inputs.push_back(scalar_text(e, key));
  } else {
    item.inputs.push_back(scalar_text(v, key));
  }
  return item;
}

// Numbers are stored as numbers so "1e-4" and "0.0001" hash alike.
ordered_json typed(const std::string& s) {
  if (auto i = textio::parse_int(s)) return *i;
  if (auto d = textio::parse_double(s)) return *d;
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Vector defaults render as "[a,b]"; store them as arrays like parsed values.
ordered_json typed_default(const CLI::Option& opt) {
  std::string d = opt.get_default_str();
  if (opt.get_expected_max() <= 1) return typed(d);
  ordered_json arr = ordered_json::array();
  if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
  for (auto part : textio::split(d, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    if (!part.empty()) arr.push_back(typed(std::string(part)));
  }
  return arr;
}

bool run_local(const std::string& name) {
  return name == "out" || name == "threads" || name == "help" || name == "config";
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool,
                                  std::string) const {
  ordered_json j = ordered_json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const auto& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      if (opt->results().size() == 1) {
        j[name] = typed(opt->results().front());
      } else {
        ordered_json arr = ordered_json::array();
        for (const auto& r : opt->results()) arr.push_back(typed(r));
        j[name] = arr;
      }
    } else if (default_also && !opt->get_default_str().empty()) {
      j[name] = typed(opt->get_default_str());
    }
  }
  return j.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  std::string text(std::istreambuf_iterator<char>(input), {});
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw CLI::ConfigError("config file must hold a JSON object");

  std::vector<CLI::ConfigItem> items;
  for (const CLI::App* sub : root_->get_subcommands()) {
    const std::string& section = sub->get_name();
    for (const auto& [key, value] : root.items()) {
      if (value.is_object() || value.is_null()) continue;
      if (sub->get_option_no_throw("--" + key) == nullptr) continue;
      items.push_back(make_item(section, key, value));
    }
    auto it = root.find(section);
    if (it == root.end()) continue;
    if (!it->is_object()) throw CLI::ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : it->items()) {
      if (value.is_null()) continue;
      if (value.is_object())
        throw CLI::ConfigError("config key '" + section + "." + key + "' cannot be an object");
      items.push_back(make_item(section, key, value));
    }
  }
  return items;
}

EffectiveConfig effective_config(const CLI::App& sub) {
  std::map<std::string, ordered_json> sorted;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (run_local(name)) continue;
    ordered_json value;
    if (opt->get_expected_min() == 0) {
      value = opt->count() > 0 ? opt->as<bool>() : false;
    } else if (opt->count() > 0) {
      if (opt->get_expected_max() <= 1 && opt->results().size() == 1) {
        value = typed(opt->results().front());
      } else {
        value = ordered_json::array();
        for (const auto& r : opt->results()) value.push_back(typed(r));
      }
    } else if (!opt->get_default_str().empty()) {
      value = typed_default(*opt);
    }
    sorted.emplace(name, std::move(value));
  }
  EffectiveConfig cfg;
  for (auto& [k, v] : sorted) cfg.values[k] = std::move(v);
  ordered_json keyed = {{"command", sub.get_name()}, {"config", cfg.values}};
  cfg.hash = hex64(fnv1a64(keyed.dump()));
  return cfg;
}

void Provenance::write(const std::filesystem::path& out_dir) const {
  ordered_json j;
  j["tool"] = "qshift";
  j["version"] = std::string(qshift::version());
  j["command"] = command;
  j["config_hash"] = config.hash;
  j["config"] = config.values;
  j["seeds"] = seeds;
  if (!details.empty()) j["details"] = details;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  textio::write_file(out_dir / "provenance.json", j.dump(2) + "\n");
}

}  // namespace qshift::cli
