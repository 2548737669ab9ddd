#include "qshift/error.hpp"
#include "qshift/shiftgen.hpp"
#include "qshift/textio.hpp"

namespace qshift {

using ojson = nlohmann::ordered_json;

std::string manifest_to_json(const ShiftManifest& manifest) {
  ojson j;
  j["shift"] = manifest.shift;
  j["seed"] = manifest.seed;
  j["params"] = manifest.params;
  j["clusters"] = ojson::array();
  for (const auto& c : manifest.clusters) {
    ojson cj;
    cj["name"] = c.name;
    cj["train"] = c.train;
    cj["test"] = c.test;
    j["clusters"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

ShiftManifest manifest_from_json(std::string_view text) {
  ShiftManifest m;
  try {
    const auto j = ojson::parse(text);
    m.shift = j.at("shift").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("params")) m.params = j.at("params");
    for (const auto& cj : j.at("clusters")) {
      Cluster c;
      c.name = cj.at("name").get<std::string>();
      c.train = cj.at("train").get<std::vector<std::string>>();
      c.test = cj.at("test").get<std::vector<std::string>>();
      m.clusters.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, e.what());
  }
  validate_manifest(m);
  return m;
}

void save_manifest(const ShiftManifest& manifest, const std::filesystem::path& path) {
  textio::write_file(path, manifest_to_json(manifest));
}

ShiftManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(textio::read_file(path));
}

std::vector<std::filesystem::path> write_cluster_id_files(const ShiftManifest& manifest,
                                                          const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto write_list = [&](const std::string& name, const std::vector<std::string>& ids) {
    std::string body;
    for (const auto& id : ids) {
      body += id;
      body += '\n';
    }
    auto path = dir / name;
    textio::write_file(path, body);
    written.push_back(path);
  };
  for (const auto& c : manifest.clusters) {
    write_list(c.name + ".train.ids", c.train);
    write_list(c.name + ".test.ids", c.test);
  }
  return written;
}

}  // namespace qshift
