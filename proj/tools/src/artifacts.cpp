#include "anonplan/cli/artifacts.hpp"

#include <fstream>
#include <json.hpp>

#include "anonplan/error.hpp"
#include "anonplan/version.hpp"

namespace anonplan::cli {

using Json = nlohmann::ordered_json;

namespace {

Json config_json(const RunConfig& c) {
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  return Json{{"tool", "anonplan"}, {"version", kVersion}, {"command", c.command}, {"params", params}};
}

}  // namespace

std::string RunConfig::to_json() const { return config_json(*this).dump(); }

std::string RunConfig::comment() const { return "config: " + to_json(); }

void write_weights(std::ostream& os, const WeightsFile& w, const RunConfig& config) {
  Json weights = Json::array();
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    weights.push_back(Json{{"basis", i}, {"label", i < w.labels.size() ? w.labels[i] : ""}, {"value", w.weights[i]}});
  Json doc{{"format", "anonplan-weights/1"},
           {"config", config_json(config)},
           {"method", w.method},
           {"status", w.status},
           {"objective", w.objective},
           {"constraints", w.constraints},
           {"auxiliaries", w.auxiliaries},
           {"weights", weights},
           {"timing", Json{{"ve_seconds", w.ve_seconds}, {"lp_seconds", w.lp_seconds}}}};
  os << doc.dump(2) << '\n';
}

WeightsFile read_weights(std::istream& is) {
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const Json::exception& e) {
    throw Error(std::string("weights file: ") + e.what());
  }
  if (doc.value("format", "") != "anonplan-weights/1") throw Error("weights file: expected format anonplan-weights/1");
  WeightsFile w;
  try {
    w.method = doc.at("method").get<std::string>();
    w.status = doc.at("status").get<std::string>();
    w.objective = doc.at("objective").get<double>();
    w.constraints = doc.at("constraints").get<std::size_t>();
    w.auxiliaries = doc.at("auxiliaries").get<std::size_t>();
    for (const auto& e : doc.at("weights")) {
      if (e.at("basis").get<std::size_t>() != w.weights.size()) throw Error("weights file: basis ids out of order");
      w.labels.push_back(e.value("label", ""));
      w.weights.push_back(e.at("value").get<double>());
    }
    if (doc.contains("timing")) {
      w.ve_seconds = doc["timing"].value("ve_seconds", 0.0);
      w.lp_seconds = doc["timing"].value("lp_seconds", 0.0);
    }
  } catch (const Json::exception& e) {
    throw Error(std::string("weights file: ") + e.what());
  }
  return w;
}

WeightsFile load_weights(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return read_weights(is);
}

}  // namespace anonplan::cli
