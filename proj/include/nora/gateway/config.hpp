#pragma once

// Platform configuration: a single JSON document. Relative paths resolve
// against the directory that holds the config file.

#include <filesystem>
#include <fstream>

#include "nora/empathy/service.hpp"
#include "nora/profile.hpp"

namespace nora::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

enum class HashCost { Min, Interactive, Moderate };

inline HashCost parse_hash_cost(std::string_view s) {
  if (s == "min") return HashCost::Min;
  if (s == "interactive") return HashCost::Interactive;
  if (s == "moderate") return HashCost::Moderate;
  fail(ErrorKind::InvalidInput, "unknown hash_cost: " + std::string(s));
}

struct PlatformConfig {
  unsigned short port = 8080;
  fs::path data_dir = "data";
  std::string hotline = "1833 111";
  std::vector<std::string> topics = {"movies", "cooking", "music"};
  empathy::EmpathyConfig empathy;
  double stress_threshold = 0.5;
  Program program;
  fs::path rules_dir = "rules";
  fs::path lexicon_dir = "lexicons";
  fs::path template_dir = "templates";
  std::int64_t token_ttl_seconds = 86400;
  HashCost hash_cost = HashCost::Interactive;
  std::string pseudonym_secret = "nora";
};

inline PlatformConfig parse_config(const json& j, const fs::path& base) {
  PlatformConfig c;
  auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : (base / p).lexically_normal(); };
  try {
    c.port = j.value("port", c.port);
    c.data_dir = resolve(j.value("data_dir", c.data_dir.string()));
    c.hotline = j.value("hotline", c.hotline);
    c.topics = j.value("topics", c.topics);
    if (j.contains("emotion")) {
      const auto& e = j.at("emotion");
      c.empathy.class_set = e.value("class_set", c.empathy.class_set);
      if (e.contains("fusion_weights")) {
        const auto& w = e.at("fusion_weights");
        c.empathy.weights = empathy::FusionWeights(w.at("text").get<double>(), w.at("audio").get<double>());
      }
    }
    c.stress_threshold = j.value("stress_threshold", c.stress_threshold);
    if (j.contains("program")) {
      c.program.name = j["program"].value("name", c.program.name);
      c.program.length_days = j["program"].value("length_days", c.program.length_days);
    }
    const auto paths = j.value("paths", json::object());
    c.rules_dir = resolve(paths.value("rules", c.rules_dir.string()));
    c.lexicon_dir = resolve(paths.value("lexicons", c.lexicon_dir.string()));
    c.template_dir = resolve(paths.value("templates", c.template_dir.string()));
    const auto auth = j.value("auth", json::object());
    c.token_ttl_seconds = auth.value("token_ttl_seconds", c.token_ttl_seconds);
    c.hash_cost = parse_hash_cost(auth.value("hash_cost", std::string("interactive")));
    c.pseudonym_secret = j.value("pseudonym_secret", c.pseudonym_secret);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("config: ") + e.what());
  }
  if (c.program.length_days < 1) fail(ErrorKind::InvalidInput, "config: program length must be >= 1");
  if (c.token_ttl_seconds <= 0) fail(ErrorKind::InvalidInput, "config: token_ttl_seconds must be > 0");
  if (c.stress_threshold < 0 || c.stress_threshold > 1) {
    fail(ErrorKind::InvalidInput, "config: stress_threshold must lie in [0, 1]");
  }
  if (c.topics.empty()) fail(ErrorKind::InvalidInput, "config: topic catalog is empty");
  return c;
}

inline PlatformConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::NotFound, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, "config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

// Defaults that point at the resource directories under `root`.
inline PlatformConfig config_for_root(const fs::path& root) {
  return parse_config(json::object({{"data_dir", "data"}}), root);
}

}  // namespace nora::gateway
