#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/distance/distance.hpp"
#include "hg/orchestrator/orchestrator.hpp"
#include "hg/service/config.hpp"
#include "hg/service/event_log.hpp"
#include "hg/workspace/workspace.hpp"

namespace hg::service {

// The service core without transport: configuration, clock, persistence,
// recovery, and the scoring glue between orchestrator and distance.
class App {
 public:
  // Loads embeddings (kConfigError when missing or unreadable), then recovers
  // state from data_dir (kRecoveryError).
  explicit App(Config config);
  ~App();

  const Config& config() const { return config_; }
  workspace::Workspace& workspace() { return *workspace_; }
  orchestrator::Orchestrator& orchestrator() { return *orchestrator_; }
  Clock& clock() { return *clock_; }
  ManualClock* manual_clock() { return manual_; }
  EventLog& log() { return *log_; }

  // Held (shared) by every mutating request so a snapshot never observes an
  // event that is logged but not yet applied.
  std::shared_lock<std::shared_mutex> mutation_scope() { return std::shared_lock(gate_); }

  // Takes a snapshot when snapshot_every events have accumulated. Call with
  // no mutation_scope held.
  void maybe_snapshot();

  // Writes snapshot.json and empties the log. Returns the covered sequence.
  std::uint64_t snapshot();

  // Deep state used by recovery tests: {"workspace": ..., "orchestrator": ...}.
  json state() const;

  std::vector<std::string> metrics() const { return config_.metrics; }
  bool has_metric(std::string_view name) const;

  // Accepted ideas of a task, ranked by `metric` when given (farthest first),
  // with near-duplicate flags. Throws kInvalidArgument for unknown metrics.
  json ideas(std::string_view task_id, const std::optional<std::string>& metric);

  // Distance of `idea` from `prompt` under `metric`; throws when unscorable.
  double prompt_distance(std::string_view metric, std::string_view task_id,
                         std::string_view prompt, const orchestrator::IdeaSubmission& idea) const;
  double pair_distance(std::string_view metric, const orchestrator::IdeaSubmission& a,
                       const orchestrator::IdeaSubmission& b) const;

 private:
  void recover();
  std::map<std::string, double> score(std::string_view prompt, std::string_view idea) const;
  double text_distance(std::string_view metric, std::string_view a, std::string_view b) const;
  const std::vector<double>& sidecar_vector(const std::string& id) const;

  Config config_;
  std::unique_ptr<Clock> clock_;
  ManualClock* manual_ = nullptr;
  std::optional<distance::EmbeddingStore> embeddings_;
  std::optional<distance::SidecarVectors> sidecar_;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<workspace::Workspace> workspace_;
  std::unique_ptr<orchestrator::Orchestrator> orchestrator_;
  std::shared_mutex gate_;
  std::mutex snapshot_mu_;
};

}  // namespace hg::service
