#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/workspace/types.hpp"
#include "json.hpp"

namespace hg::orchestrator {

using json = nlohmann::json;

enum class Strategy { kRolePlay, kNoRole };
enum class TaskState { kOpen, kComplete, kCancelled };
enum class SlotState { kUnclaimed, kClaimed, kSubmitted, kVoid };
enum class RejectReason { kTimeLock, kNoReadAttestation, kTooShort, kCopyOverlap };

std::string_view to_string(Strategy s);
std::string_view to_string(TaskState s);
std::string_view to_string(SlotState s);
std::string_view to_string(RejectReason r);
std::optional<Strategy> parse_strategy(std::string_view s);

// Reply label used for ideas from role-less slots.
inline constexpr std::string_view kNoRoleLabel = "no role";

struct Settings {
  double time_lock_seconds = 30.0;
  std::size_t min_idea_words = 50;
  std::size_t copy_overlap_tokens = 15;

  Millis time_lock_ms() const;
};

struct AssignmentSlot {
  std::string id;
  std::string task_id;
  std::optional<std::string> role;  // character id; present iff ROLE_PLAY
  SlotState state = SlotState::kUnclaimed;
  std::optional<std::string> claimed_by;
  Millis offered_at = 0;
  bool read_bottom_attested = false;

  bool operator==(const AssignmentSlot&) const = default;
};

struct IdeaSubmission {
  std::string id;
  std::string task_id;
  std::string slot_id;
  std::string worker_id;
  std::optional<std::string> role;
  std::string role_label;
  std::string body;
  Millis submitted_at = 0;
  Millis elapsed_read_ms = 0;
  std::map<std::string, double> distance_scores;

  bool operator==(const IdeaSubmission&) const = default;
};

struct IdeationTask {
  std::string id;
  std::string document_id;
  workspace::SelectionRange prompt;
  std::string team_id;
  std::vector<std::string> member_ids;  // team membership at creation
  std::optional<std::string> note;
  Strategy strategy = Strategy::kRolePlay;
  unsigned per_character_quota = 1;
  std::int64_t reward_cents = 0;
  std::string thread_id;
  Millis created_at = 0;
  TaskState state = TaskState::kOpen;
  std::vector<AssignmentSlot> slots;
  std::vector<IdeaSubmission> accepted;

  bool operator==(const IdeationTask&) const = default;
};

struct RoleCard {
  std::string name;
  std::string description;
};

// Everything a worker is allowed to see for one assignment.
struct AssignmentOffer {
  std::string slot_id;
  std::string task_id;
  std::string prompt;
  std::optional<RoleCard> role;
  std::optional<std::string> note;
  std::int64_t reward_cents = 0;
  bool min_read_ack_required = true;
  double time_lock_seconds = 0;
  std::size_t min_idea_words = 0;
  Millis offered_at = 0;
};

struct Rejection {
  RejectReason reason = RejectReason::kTimeLock;
  std::string message;
  Millis retry_after_ms = 0;  // remaining lock time for kTimeLock
};

using SubmitOutcome = std::variant<IdeaSubmission, Rejection>;

struct TaskLatencyReport {
  Millis first_idea = 0;
  std::optional<Millis> per_character_coverage;
  Millis last_idea = 0;
};

struct TaskStatus {
  std::string task_id;
  TaskState state = TaskState::kOpen;
  Strategy strategy = Strategy::kRolePlay;
  std::size_t total_slots = 0;
  std::size_t unclaimed = 0;
  std::size_t claimed = 0;
  std::size_t submitted = 0;
  std::size_t voided = 0;
  std::int64_t reward_cents = 0;
  Millis created_at = 0;
  std::string thread_id;
  std::vector<std::string> roles;  // current names of the task's characters; empty for NO_ROLE
  // role label -> accepted ideas, in arrival order
  std::map<std::string, std::vector<IdeaSubmission>> ideas_by_role;
  std::optional<TaskLatencyReport> latency;
};

void to_json(json& j, const AssignmentSlot& s);
void from_json(const json& j, AssignmentSlot& s);
void to_json(json& j, const IdeaSubmission& s);
void from_json(const json& j, IdeaSubmission& s);
void to_json(json& j, const IdeationTask& t);
void from_json(const json& j, IdeationTask& t);
void to_json(json& j, const AssignmentOffer& o);
void from_json(const json& j, AssignmentOffer& o);
void to_json(json& j, const Rejection& r);
void from_json(const json& j, Rejection& r);
void to_json(json& j, const TaskLatencyReport& r);
void to_json(json& j, const TaskStatus& s);

}  // namespace hg::orchestrator
