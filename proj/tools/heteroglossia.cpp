#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "hg/common/error.hpp"
#include "hg/service/app.hpp"
#include "hg/service/http.hpp"
#include "hg/sim/sim.hpp"
#include "hg/stats/report.hpp"

namespace fs = std::filesystem;

namespace {

int serve(const std::optional<fs::path>& flag) {
  const auto path = hg::service::resolve_config_path(flag);
  if (!path) hg::fail(hg::ErrorCode::kConfigError, "no config file: pass --config or set HG_CONFIG");

  // SIGINT/SIGTERM are taken by a watcher thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  hg::service::App app(hg::service::load_config(*path));
  hg::service::HttpServer server(app);
  const int port = server.bind();
  std::cout << "listening on " << app.config().host() << ":" << port << std::endl;

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  watcher.detach();
  server.run();
  return 0;
}

int report(const fs::path& ratings, const fs::path& distances, const fs::path& out) {
  const auto r = hg::stats::run_report(ratings, distances, out);
  std::cout << "wrote " << (out / "report.txt").string() << " and " << (out / "report.csv").string()
            << " (" << r.rows.size() << " rows)\n";
  return 0;
}

int sim(const fs::path& profile, const std::string& server, const fs::path& out) {
  const auto result = hg::sim::run_sim(hg::sim::load_profile(profile), server, out);
  std::cout << "acceptances " << result.acceptances;
  for (const auto& [reason, n] : result.rejections) std::cout << ", " << reason << " " << n;
  std::cout << "\ntasks complete: " << (result.all_complete() ? "yes" : "no")
            << ", latency agreement: " << (result.latency_agreement() ? "yes" : "no") << "\n";
  return result.all_complete() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Crowd ideation service, study report and worker simulator"};
  cli.require_subcommand(1);

  std::optional<fs::path> config;
  auto* serve_cmd = cli.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", config, "Config file (overrides HG_CONFIG)");

  fs::path ratings, distances, out;
  auto* report_cmd = cli.add_subcommand("report", "Analyze ratings and distances");
  report_cmd->add_option("--ratings", ratings, "Ratings CSV")->required();
  report_cmd->add_option("--distances", distances, "Distances CSV")->required();
  report_cmd->add_option("--out", out, "Output directory")->required();

  fs::path profile;
  std::string server;
  auto* sim_cmd = cli.add_subcommand("sim", "Drive a running service with simulated workers");
  sim_cmd->add_option("--profile", profile, "Simulation profile")->required();
  sim_cmd->add_option("--server", server, "Server URL, e.g. http://127.0.0.1:8080")->required();
  sim_cmd->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*serve_cmd) return serve(config);
    if (*report_cmd) return report(ratings, distances, out);
    if (*sim_cmd) return sim(profile, server, out);
  } catch (const hg::Error& e) {
    std::cerr << "error: " << hg::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
