#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/common/event_sink.hpp"
#include "hg/common/ids.hpp"
#include "hg/orchestrator/types.hpp"
#include "hg/workspace/workspace.hpp"

namespace hg::orchestrator {

// Reward for one assignment: a reading cost of one dollar per thousand prompt
// words plus a flat one-dollar writing cost, in cents rounded half-up.
std::int64_t compute_reward(std::size_t prompt_word_count);

// Longest run of consecutive tokens shared by both texts. Tokens are the
// whitespace words, lowercased, with leading/trailing ASCII punctuation
// stripped.
std::size_t longest_common_run(std::string_view a, std::string_view b);

// Scores an accepted idea against its prompt; metric name -> distance.
using Scorer = std::function<std::map<std::string, double>(std::string_view prompt,
                                                           std::string_view idea)>;

struct CreateTaskRequest {
  std::string document_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string team_id;
  std::optional<std::string> note;
  Strategy strategy = Strategy::kRolePlay;
  unsigned per_character_quota = 3;
};

// Ideation-task lifecycle. Claims and submissions on one task are serialized
// by that task's lock; different tasks proceed in parallel. Every mutation
// appends exactly one event to the sink before touching memory.
class Orchestrator {
 public:
  Orchestrator(workspace::Workspace& ws, Clock& clock, EventSink& sink,
               Settings settings = {});

  void set_scorer(Scorer scorer) { scorer_ = std::move(scorer); }
  const Settings& settings() const { return settings_; }

  IdeationTask create_task(const CreateTaskRequest& request);

  AssignmentOffer claim(std::string_view worker_id,
                        std::optional<std::string> idempotency_key = {});
  void attest_read_bottom(std::string_view slot_id, std::string_view worker_id,
                          std::optional<std::string> idempotency_key = {});
  SubmitOutcome submit(std::string_view slot_id, std::string_view worker_id,
                       std::string_view body,
                       std::optional<std::string> idempotency_key = {});
  void cancel(std::string_view task_id);

  IdeationTask get_task(std::string_view task_id) const;
  std::vector<IdeationTask> list_tasks() const;
  TaskStatus status(std::string_view task_id) const;
  TaskLatencyReport latency_report(std::string_view task_id) const;

  bool apply(std::string_view kind, const json& payload);
  json snapshot() const;
  void restore(const json& state);

 private:
  struct TaskEntry {
    mutable std::mutex mu;
    IdeationTask task;
  };
  struct WorkerEntry {
    std::mutex mu;
    std::optional<std::pair<std::string, std::string>> active;  // task, slot
    std::set<std::string> worked_tasks;
    std::map<std::string, json> idempotent;  // "<op>:<key>" -> outcome
  };

  TaskEntry& task_entry(std::string_view task_id) const;
  TaskEntry* task_for_slot(std::string_view slot_id) const;
  std::vector<TaskEntry*> tasks_in_order() const;
  WorkerEntry& worker(std::string_view worker_id);

  void apply_claim(const json& p);
  void apply_attest(const json& p);
  void apply_accept(const json& p);
  void apply_reject(const json& p);
  void apply_cancel(const json& p);
  void insert_task(const IdeationTask& task);

  workspace::Workspace& ws_;
  Clock& clock_;
  EventSink& sink_;
  Settings settings_;
  Scorer scorer_;

  mutable std::shared_mutex tasks_mu_;
  std::map<std::string, std::unique_ptr<TaskEntry>, std::less<>> tasks_;
  std::vector<TaskEntry*> order_;
  std::unordered_map<std::string, std::string> slot_to_task_;
  IdAllocator task_ids_{"task"};
  IdAllocator slot_ids_{"slot"};

  mutable std::mutex workers_mu_;
  std::map<std::string, std::unique_ptr<WorkerEntry>, std::less<>> workers_;
};

}  // namespace hg::orchestrator
