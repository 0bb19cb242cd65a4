// noractl: serve the gateway, run scripted simulations, score a text.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>

#include "nora/gateway/server.hpp"
#include "nora/gateway/simulate.hpp"

#ifndef NORA_DEFAULT_CONFIG
#define NORA_DEFAULT_CONFIG "config/nora.json"
#endif

namespace {

using namespace nora;
using namespace nora::gateway;

gateway::PlatformConfig read_config(const std::string& path) {
  if (!path.empty()) return load_config(path);
  if (fs::exists(NORA_DEFAULT_CONFIG)) return load_config(NORA_DEFAULT_CONFIG);
  return load_config("config/nora.json");
}

int serve(const std::string& config_path, const std::string& data, int port) {
  auto config = read_config(config_path);
  if (!data.empty()) config.data_dir = data;
  if (port >= 0) config.port = static_cast<unsigned short>(port);
  auto hub = std::make_shared<WsHub>();
  PlatformParts parts;
  parts.store = open_store(config.data_dir);
  parts.push = hub;
  Platform platform(config, std::move(parts));
  Gateway gateway(platform);
  Server server(gateway, *hub, config.port, std::max(2u, std::thread::hardware_concurrency()));
  std::cerr << "noractl: listening on port " << server.port() << ", data in " << config.data_dir.string() << "\n";

  static std::atomic<bool> stop{false};
  std::signal(SIGINT, [](int) { stop = true; });
  std::signal(SIGTERM, [](int) { stop = true; });
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int simulate(const std::string& config_path, const std::string& script_path, const std::string& data,
             const std::string& out_path, ProgramOptions program, ChatSwarmOptions swarm) {
  auto config = read_config(config_path);
  config.hash_cost = HashCost::Min;
  json script = json::object();
  if (!script_path.empty()) {
    std::ifstream in(script_path);
    if (!in) fail(ErrorKind::NotFound, "cannot open script " + script_path);
    try {
      script = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(0, "script " + script_path + ": " + e.what());
    }
  }
  if (script.contains("language")) program.language = parse_language(script["language"].get<std::string>());
  if (script.contains("chat")) {
    const auto& c = script["chat"];
    swarm.users = c.value("users", swarm.users);
    swarm.topics = c.value("topics", swarm.topics);
    swarm.messages = c.value("messages", swarm.messages);
    swarm.drop_probability = c.value("drop", swarm.drop_probability);
    swarm.seed = c.value("seed", swarm.seed);
  }
  const auto answers = SessionScript::from_json(script.value("sessions", json::object()), program.language);

  PlatformParts parts;
  parts.store = open_store(data.empty() ? std::nullopt : std::optional<fs::path>(data));
  Platform platform(config, std::move(parts));

  Report report;
  const auto t0 = std::chrono::steady_clock::now();
  json out{{"days", program.days}, {"users", program.users}, {"language", to_string(program.language)}};
  out["program"] = simulate_program(platform, answers, program, report);
  if (swarm.messages > 0) out["chat"] = simulate_chat(swarm, report);
  const auto t1 = std::chrono::steady_clock::now();
  out["elapsed_seconds"] = std::chrono::duration<double>(t1 - t0).count();
  const auto r = report.to_json();
  out["checks"] = r["checks"];
  out["violations"] = r["violations"];

  const auto text = out.dump(2);
  if (out_path.empty() || out_path == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream(out_path) << text << "\n";
    std::cerr << "noractl: report written to " << out_path << "\n";
  }
  return report.violations() == 0 ? 0 : 1;
}

int score(const std::string& config_path, const std::string& text, const std::string& lang) {
  const auto config = read_config(config_path);
  const auto service = empathy::EmpathyService::from_lexicons(config.lexicon_dir, config.empathy);
  const auto u = nlu::Utterance::make(text, parse_language(lang));
  std::cout << json(service.score_turn(u)).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nora platform control"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "platform config file");

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP/WebSocket gateway");
  std::string data;
  int port = -1;
  serve_cmd->add_option("--config", config_path, "platform config file");
  serve_cmd->add_option("--data", data, "data directory (overrides config)");
  serve_cmd->add_option("--port", port, "listen port (overrides config)")->check(CLI::Range(0, 65535));

  auto* sim_cmd = app.add_subcommand("simulate", "drive scripted sessions and a chat swarm, report invariant checks");
  std::string script_path, sim_data, out_path;
  ProgramOptions program;
  ChatSwarmOptions swarm;
  sim_cmd->add_option("--config", config_path, "platform config file");
  sim_cmd->add_option("--script", script_path, "JSON script: sessions answers, language, chat options");
  sim_cmd->add_option("--days", program.days, "program days per user")->check(CLI::Range(1, 365));
  sim_cmd->add_option("--users", program.users, "simulated session users")->check(CLI::Range(1, 1000));
  sim_cmd->add_option("--data", sim_data, "use a file-backed store in this directory");
  sim_cmd->add_option("--out", out_path, "write the JSON report here (default stdout)");
  sim_cmd->add_option("--chat-users", swarm.users, "chat swarm users")->check(CLI::Range(2, 1000));
  sim_cmd->add_option("--topics", swarm.topics, "chat swarm topics")->check(CLI::Range(1, 100));
  sim_cmd->add_option("--messages", swarm.messages, "chat swarm messages (0 skips the swarm)")
      ->check(CLI::Range(0, 1000000));
  sim_cmd->add_option("--drop", swarm.drop_probability, "notification drop probability")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--seed", swarm.seed, "swarm RNG seed");

  auto* score_cmd = app.add_subcommand("score", "score one text for sentiment, emotion and stress");
  std::string text, lang = "en";
  score_cmd->add_option("--config", config_path, "platform config file");
  score_cmd->add_option("--text", text, "text to score")->required();
  score_cmd->add_option("--lang", lang, "en or zh")->check(CLI::IsMember({"en", "zh"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve_cmd) return serve(config_path, data, port);
    if (*sim_cmd) return simulate(config_path, script_path, sim_data, out_path, program, swarm);
    if (*score_cmd) return score(config_path, text, lang);
  } catch (const nora::Error& e) {
    std::cerr << "noractl: " << nora::to_string(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "noractl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
