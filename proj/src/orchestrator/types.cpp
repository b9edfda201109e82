#include "hg/orchestrator/types.hpp"

#include <cmath>

namespace hg::orchestrator {

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <class E, std::size_t N>
E enum_from(const json& j, const E (&values)[N]) {
  const auto s = j.get<std::string>();
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw json::other_error::create(501, "unknown enum value " + s, &j);
}

constexpr Strategy kStrategies[] = {Strategy::kRolePlay, Strategy::kNoRole};
constexpr TaskState kTaskStates[] = {TaskState::kOpen, TaskState::kComplete,
                                     TaskState::kCancelled};
constexpr SlotState kSlotStates[] = {SlotState::kUnclaimed, SlotState::kClaimed,
                                     SlotState::kSubmitted, SlotState::kVoid};
constexpr RejectReason kReasons[] = {RejectReason::kTimeLock,
                                     RejectReason::kNoReadAttestation,
                                     RejectReason::kTooShort,
                                     RejectReason::kCopyOverlap};

}  // namespace

std::string_view to_string(Strategy s) {
  return s == Strategy::kRolePlay ? "ROLE_PLAY" : "NO_ROLE";
}

std::string_view to_string(TaskState s) {
  switch (s) {
    case TaskState::kOpen: return "OPEN";
    case TaskState::kComplete: return "COMPLETE";
    case TaskState::kCancelled: return "CANCELLED";
  }
  return "?";
}

std::string_view to_string(SlotState s) {
  switch (s) {
    case SlotState::kUnclaimed: return "UNCLAIMED";
    case SlotState::kClaimed: return "CLAIMED";
    case SlotState::kSubmitted: return "SUBMITTED";
    case SlotState::kVoid: return "VOID";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kTimeLock: return "TIME_LOCK";
    case RejectReason::kNoReadAttestation: return "NO_READ_ATTESTATION";
    case RejectReason::kTooShort: return "TOO_SHORT";
    case RejectReason::kCopyOverlap: return "COPY_OVERLAP";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (Strategy v : kStrategies) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

Millis Settings::time_lock_ms() const {
  return static_cast<Millis>(std::llround(time_lock_seconds * 1000.0));
}

void to_json(json& j, const AssignmentSlot& s) {
  j = json{{"id", s.id},
           {"task_id", s.task_id},
           {"role", opt(s.role)},
           {"state", to_string(s.state)},
           {"claimed_by", opt(s.claimed_by)},
           {"offered_at", s.offered_at},
           {"read_bottom_attested", s.read_bottom_attested}};
}

void from_json(const json& j, AssignmentSlot& s) {
  j.at("id").get_to(s.id);
  j.at("task_id").get_to(s.task_id);
  s.role = opt_from<std::string>(j, "role");
  s.state = enum_from(j.at("state"), kSlotStates);
  s.claimed_by = opt_from<std::string>(j, "claimed_by");
  j.at("offered_at").get_to(s.offered_at);
  j.at("read_bottom_attested").get_to(s.read_bottom_attested);
}

void to_json(json& j, const IdeaSubmission& s) {
  j = json{{"id", s.id},
           {"task_id", s.task_id},
           {"slot_id", s.slot_id},
           {"worker_id", s.worker_id},
           {"role", opt(s.role)},
           {"role_label", s.role_label},
           {"body", s.body},
           {"submitted_at", s.submitted_at},
           {"elapsed_read_ms", s.elapsed_read_ms},
           {"distance_scores", s.distance_scores}};
}

void from_json(const json& j, IdeaSubmission& s) {
  j.at("id").get_to(s.id);
  j.at("task_id").get_to(s.task_id);
  j.at("slot_id").get_to(s.slot_id);
  j.at("worker_id").get_to(s.worker_id);
  s.role = opt_from<std::string>(j, "role");
  j.at("role_label").get_to(s.role_label);
  j.at("body").get_to(s.body);
  j.at("submitted_at").get_to(s.submitted_at);
  j.at("elapsed_read_ms").get_to(s.elapsed_read_ms);
  j.at("distance_scores").get_to(s.distance_scores);
}

void to_json(json& j, const IdeationTask& t) {
  j = json{{"id", t.id},
           {"document_id", t.document_id},
           {"prompt", t.prompt},
           {"team_id", t.team_id},
           {"member_ids", t.member_ids},
           {"note", opt(t.note)},
           {"strategy", to_string(t.strategy)},
           {"per_character_quota", t.per_character_quota},
           {"reward_cents", t.reward_cents},
           {"thread_id", t.thread_id},
           {"created_at", t.created_at},
           {"state", to_string(t.state)},
           {"slots", t.slots},
           {"accepted", t.accepted}};
}

void from_json(const json& j, IdeationTask& t) {
  j.at("id").get_to(t.id);
  j.at("document_id").get_to(t.document_id);
  j.at("prompt").get_to(t.prompt);
  j.at("team_id").get_to(t.team_id);
  j.at("member_ids").get_to(t.member_ids);
  t.note = opt_from<std::string>(j, "note");
  t.strategy = enum_from(j.at("strategy"), kStrategies);
  j.at("per_character_quota").get_to(t.per_character_quota);
  j.at("reward_cents").get_to(t.reward_cents);
  j.at("thread_id").get_to(t.thread_id);
  j.at("created_at").get_to(t.created_at);
  t.state = enum_from(j.at("state"), kTaskStates);
  j.at("slots").get_to(t.slots);
  j.at("accepted").get_to(t.accepted);
}

void to_json(json& j, const AssignmentOffer& o) {
  j = json{{"slot_id", o.slot_id},
           {"task_id", o.task_id},
           {"prompt", o.prompt},
           {"role", o.role ? json{{"name", o.role->name},
                                  {"description", o.role->description}}
                           : json(nullptr)},
           {"note", opt(o.note)},
           {"reward_cents", o.reward_cents},
           {"min_read_ack_required", o.min_read_ack_required},
           {"time_lock_seconds", o.time_lock_seconds},
           {"min_idea_words", o.min_idea_words},
           {"offered_at", o.offered_at}};
}

void from_json(const json& j, AssignmentOffer& o) {
  j.at("slot_id").get_to(o.slot_id);
  j.at("task_id").get_to(o.task_id);
  j.at("prompt").get_to(o.prompt);
  const auto& role = j.at("role");
  if (role.is_null()) {
    o.role.reset();
  } else {
    o.role = RoleCard{role.at("name").get<std::string>(),
                      role.at("description").get<std::string>()};
  }
  o.note = opt_from<std::string>(j, "note");
  j.at("reward_cents").get_to(o.reward_cents);
  j.at("min_read_ack_required").get_to(o.min_read_ack_required);
  j.at("time_lock_seconds").get_to(o.time_lock_seconds);
  j.at("min_idea_words").get_to(o.min_idea_words);
  j.at("offered_at").get_to(o.offered_at);
}

void to_json(json& j, const Rejection& r) {
  j = json{{"reason", to_string(r.reason)},
           {"message", r.message},
           {"retry_after_ms", r.retry_after_ms}};
}

void from_json(const json& j, Rejection& r) {
  r.reason = enum_from(j.at("reason"), kReasons);
  j.at("message").get_to(r.message);
  j.at("retry_after_ms").get_to(r.retry_after_ms);
}

void to_json(json& j, const TaskLatencyReport& r) {
  j = json{{"first_idea_ms", r.first_idea},
           {"per_character_coverage_ms", opt(r.per_character_coverage)},
           {"last_idea_ms", r.last_idea}};
}

void to_json(json& j, const TaskStatus& s) {
  j = json{{"task_id", s.task_id},
           {"state", to_string(s.state)},
           {"strategy", to_string(s.strategy)},
           {"total_slots", s.total_slots},
           {"slots", {{"unclaimed", s.unclaimed},
                      {"claimed", s.claimed},
                      {"submitted", s.submitted},
                      {"void", s.voided}}},
           {"reward_cents", s.reward_cents},
           {"created_at", s.created_at},
           {"thread_id", s.thread_id},
           {"roles", s.roles},
           {"ideas_by_role", s.ideas_by_role},
           {"latency", s.latency ? json(*s.latency) : json(nullptr)}};
}

}  // namespace hg::orchestrator
