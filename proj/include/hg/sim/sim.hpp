#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/orchestrator/types.hpp"

namespace hg::sim {

// Seconds drawn from fixed(x), uniform(a,b) or exponential(rate).
struct Distribution {
  enum class Kind { kFixed, kUniform, kExponential };
  Kind kind = Kind::kFixed;
  double a = 0;
  double b = 0;

  // `u` is uniform in [0, 1).
  double sample(double u) const;
  static Distribution parse(std::string_view text);  // throws kConfigError
};

struct SimProfile {
  std::size_t n_workers = 9;
  Distribution arrival;    // inter-arrival seconds
  Distribution read_time;  // seconds from offer to read-bottom
  std::filesystem::path idea_source;
  double compliance = 1.0;  // probability a first attempt waits out the lock
  std::uint64_t seed = 1;
  std::string writer_key;

  // Tasks the simulator creates before the crowd arrives. With 0 it works on
  // whatever tasks are open on the server.
  std::size_t setup_tasks = 1;
  std::vector<std::size_t> setup_team_sizes{3};  // cycled across tasks
  unsigned setup_quota = 3;
  orchestrator::Strategy setup_strategy = orchestrator::Strategy::kRolePlay;

  double poll_seconds = 5;  // idle workers ask again after this long
  double histogram_bucket_seconds = 60;
  double max_virtual_hours = 72;
};

// `key = value` lines, '#' comments; relative paths resolve against base_dir.
SimProfile parse_profile(std::istream& in, const std::filesystem::path& base_dir = {});
SimProfile load_profile(const std::filesystem::path& path);

struct LatencyTriple {
  Millis first_idea = 0;
  std::optional<Millis> per_character_coverage;
  Millis last_idea = 0;
};

struct TaskOutcome {
  std::string task_id;
  std::size_t total_slots = 0;
  std::size_t acceptances = 0;
  bool complete = false;
  bool every_role_covered = false;
  std::size_t thread_replies = 0;
  std::optional<LatencyTriple> sim;     // from acceptance receipts
  std::optional<LatencyTriple> server;  // from GET /tasks/{id}/latency
  bool latency_agrees = false;          // within 1 ms
};

struct SimResult {
  std::size_t acceptances = 0;
  std::map<std::string, std::size_t> rejections;  // reason -> count
  std::size_t requests = 0;
  Millis virtual_duration = 0;
  std::vector<TaskOutcome> tasks;
  std::vector<Millis> idea_latencies;  // per accepted idea, from task creation

  bool all_complete() const;
  bool latency_agreement() const;
};

// Drives the worker API of a server running with clock = manual and writes
// histogram.csv, summary.csv and result.json into out_dir.
// Throws kServerUnreachable, kCorpusTooSmall, kConfigError.
SimResult run_sim(const SimProfile& profile, const std::string& server_url,
                  const std::filesystem::path& out_dir);

}  // namespace hg::sim
