#include "hg/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <cctype>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"

namespace hg::orchestrator {

std::int64_t compute_reward(std::size_t prompt_word_count) {
  // 100 * (w / 1000 + 1) = w / 10 + 100 cents; +5 then floor rounds half-up.
  return 100 + static_cast<std::int64_t>((prompt_word_count + 5) / 10);
}

namespace {

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (std::string_view w : text::split_words(s)) {
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
                                     static_cast<unsigned char>(c) >= 0x80; };
    std::size_t b = 0, e = w.size();
    while (b < e && !alnum(w[b])) ++b;
    while (e > b && !alnum(w[e - 1])) --e;
    if (b < e) out.push_back(text::to_lower_ascii(w.substr(b, e - b)));
  }
  return out;
}

std::string slot_suffix(std::string_view slot_id) {
  const auto dash = slot_id.rfind('-');
  return std::string(dash == std::string_view::npos ? slot_id : slot_id.substr(dash + 1));
}

std::string overview_text(const IdeationTask& task, const workspace::Team& team,
                          const workspace::WorkspaceState& st) {
  std::string s = "Ideation task " + task.id + "\nTeam: " + team.name + "\nCharacters: ";
  for (std::size_t i = 0; i < task.member_ids.size(); ++i) {
    if (i) s += ", ";
    s += st.character(task.member_ids[i]).name;
  }
  s += "\nStrategy: ";
  s += task.strategy == Strategy::kRolePlay ? "role play" : "no role";
  s += "\nIdeas requested: " + std::to_string(task.slots.size()) + " (" +
       std::to_string(task.per_character_quota) + " per character)";
  if (task.note) s += "\nNote: " + *task.note;
  return s;
}

json with_key(json payload, const std::optional<std::string>& key) {
  if (key) payload["idempotency_key"] = *key;
  return payload;
}

}  // namespace

std::size_t longest_common_run(std::string_view a, std::string_view b) {
  const auto x = normalized_tokens(a);
  const auto y = normalized_tokens(b);
  if (x.empty() || y.empty()) return 0;
  std::vector<std::size_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

Orchestrator::Orchestrator(workspace::Workspace& ws, Clock& clock, EventSink& sink,
                           Settings settings)
    : ws_(ws), clock_(clock), sink_(sink), settings_(settings) {}

Orchestrator::TaskEntry& Orchestrator::task_entry(std::string_view task_id) const {
  std::shared_lock lock(tasks_mu_);
  const auto it = tasks_.find(task_id);
  if (it == tasks_.end()) fail(ErrorCode::kNotFound, "task " + std::string(task_id) + " not found");
  return *it->second;
}

Orchestrator::TaskEntry* Orchestrator::task_for_slot(std::string_view slot_id) const {
  std::shared_lock lock(tasks_mu_);
  const auto it = slot_to_task_.find(std::string(slot_id));
  if (it == slot_to_task_.end()) return nullptr;
  return tasks_.find(it->second)->second.get();
}

std::vector<Orchestrator::TaskEntry*> Orchestrator::tasks_in_order() const {
  std::shared_lock lock(tasks_mu_);
  return order_;
}

Orchestrator::WorkerEntry& Orchestrator::worker(std::string_view worker_id) {
  std::lock_guard lock(workers_mu_);
  auto it = workers_.find(worker_id);
  if (it == workers_.end()) {
    it = workers_.emplace(std::string(worker_id), std::make_unique<WorkerEntry>()).first;
  }
  return *it->second;
}

void Orchestrator::insert_task(const IdeationTask& task) {
  task_ids_.observe(task.id);
  auto entry = std::make_unique<TaskEntry>();
  entry->task = task;
  for (const auto& slot : task.slots) {
    slot_ids_.observe(slot.id);
    slot_to_task_[slot.id] = task.id;
  }
  order_.push_back(entry.get());
  tasks_[task.id] = std::move(entry);
}

IdeationTask Orchestrator::create_task(const CreateTaskRequest& req) {
  if (req.per_character_quota < 1) {
    fail(ErrorCode::kInvalidArgument, "per_character_quota must be at least 1");
  }
  return ws_.write([&](workspace::WorkspaceState& st) {
    const auto team_it = st.teams().find(req.team_id);
    if (team_it == st.teams().end() || team_it->second.deleted) {
      fail(ErrorCode::kUnknownTeam, "team " + req.team_id + " not found");
    }
    const workspace::Team& team = team_it->second;
    for (const auto& id : team.member_ids) {
      if (st.character(id).deleted) {
        fail(ErrorCode::kDeletedCharacterInTeam,
             "team " + team.id + " contains deleted character " + id);
      }
    }
    workspace::SelectionRange prompt;
    try {
      prompt = st.capture(req.document_id, req.start, req.end);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidAnchor) fail(ErrorCode::kInvalidSelection, e.what());
      throw;
    }

    const Millis now = clock_.now();
    std::unique_lock tasks_lock(tasks_mu_);
    IdeationTask task;
    task.id = task_ids_.peek();
    task.document_id = prompt.document_id;
    task.prompt = prompt;
    task.team_id = team.id;
    task.member_ids = team.member_ids;
    task.note = req.note;
    task.strategy = req.strategy;
    task.per_character_quota = req.per_character_quota;
    task.reward_cents = compute_reward(text::word_count(prompt.snapshot));
    task.created_at = now;
    std::uint64_t next_slot = slot_ids_.last();
    for (const auto& member : team.member_ids) {
      for (unsigned q = 0; q < req.per_character_quota; ++q) {
        AssignmentSlot slot;
        slot.id = "slot-" + std::to_string(++next_slot);
        slot.task_id = task.id;
        if (req.strategy == Strategy::kRolePlay) slot.role = member;
        task.slots.push_back(std::move(slot));
      }
    }
    workspace::CommentThread thread;
    thread.id = st.next_thread_id();
    thread.document_id = prompt.document_id;
    thread.anchor = prompt;
    thread.created_at = now;
    thread.overview = overview_text(task, team, st);
    task.thread_id = thread.id;

    sink_.append("task.created", json{{"task", task}, {"thread", thread}});
    st.put_thread(thread);
    insert_task(task);
    return task;
  });
}

AssignmentOffer Orchestrator::claim(std::string_view worker_id,
                                    std::optional<std::string> idempotency_key) {
  if (worker_id.empty()) fail(ErrorCode::kInvalidArgument, "worker id is empty");
  WorkerEntry& w = worker(worker_id);
  std::lock_guard wlock(w.mu);
  const std::string cache_key = idempotency_key ? "claim:" + *idempotency_key : "";
  if (idempotency_key) {
    if (auto it = w.idempotent.find(cache_key); it != w.idempotent.end()) {
      return it->second.get<AssignmentOffer>();
    }
  }
  if (w.active) {
    TaskEntry& t = task_entry(w.active->first);
    std::lock_guard tlock(t.mu);
    const auto& slots = t.task.slots;
    const auto it = std::find_if(slots.begin(), slots.end(),
                                 [&](const auto& s) { return s.id == w.active->second; });
    if (it != slots.end() && it->state == SlotState::kClaimed && it->claimed_by == worker_id) {
      fail(ErrorCode::kAlreadyActive, "worker already holds slot " + it->id);
    }
  }

  bool blocked_by_history = false;
  for (TaskEntry* entry : tasks_in_order()) {
    std::lock_guard tlock(entry->mu);
    IdeationTask& task = entry->task;
    if (task.state != TaskState::kOpen) continue;

    std::optional<AssignmentOffer> offer;
    ws_.read([&](const workspace::WorkspaceState& st) {
      for (const AssignmentSlot& slot : task.slots) {
        if (slot.state != SlotState::kUnclaimed) continue;
        std::optional<RoleCard> card;
        if (slot.role) {
          const auto& c = st.character(*slot.role);
          if (c.deleted) continue;
          card = RoleCard{c.name, c.description};
        }
        if (w.worked_tasks.count(task.id)) {
          blocked_by_history = true;
          return;
        }
        AssignmentOffer o;
        o.slot_id = slot.id;
        o.task_id = task.id;
        o.prompt = task.prompt.snapshot;
        o.role = std::move(card);
        o.note = task.note;
        o.reward_cents = task.reward_cents;
        o.min_read_ack_required = true;
        o.time_lock_seconds = settings_.time_lock_seconds;
        o.min_idea_words = settings_.min_idea_words;
        offer = std::move(o);
        return;
      }
    });
    if (!offer) continue;

    offer->offered_at = clock_.now();
    json payload{{"task_id", task.id},
                 {"slot_id", offer->slot_id},
                 {"worker_id", worker_id},
                 {"offered_at", offer->offered_at},
                 {"offer", *offer}};
    payload = with_key(std::move(payload), idempotency_key);
    sink_.append("slot.claimed", payload);
    auto& slot = *std::find_if(task.slots.begin(), task.slots.end(),
                               [&](const auto& s) { return s.id == offer->slot_id; });
    slot.state = SlotState::kClaimed;
    slot.claimed_by = std::string(worker_id);
    slot.offered_at = offer->offered_at;
    slot.read_bottom_attested = false;
    w.active = std::make_pair(task.id, slot.id);
    if (idempotency_key) w.idempotent[cache_key] = *offer;
    return *offer;
  }
  if (blocked_by_history) {
    fail(ErrorCode::kAlreadyWorkedTask, "worker already contributed to every task with open slots");
  }
  fail(ErrorCode::kNoWorkAvailable, "no open assignment slots");
}

void Orchestrator::attest_read_bottom(std::string_view slot_id, std::string_view worker_id,
                                      std::optional<std::string> idempotency_key) {
  WorkerEntry& w = worker(worker_id);
  std::lock_guard wlock(w.mu);
  const std::string cache_key = idempotency_key ? "attest:" + *idempotency_key : "";
  if (idempotency_key && w.idempotent.count(cache_key)) return;
  TaskEntry* entry = task_for_slot(slot_id);
  if (!entry) fail(ErrorCode::kNotFound, "slot " + std::string(slot_id) + " not found");
  std::lock_guard tlock(entry->mu);
  auto& slots = entry->task.slots;
  auto& slot = *std::find_if(slots.begin(), slots.end(),
                             [&](const auto& s) { return s.id == slot_id; });
  if (slot.state == SlotState::kSubmitted || slot.state == SlotState::kVoid) {
    fail(ErrorCode::kBadState, "slot " + slot.id + " is " + std::string(to_string(slot.state)));
  }
  if (slot.state != SlotState::kClaimed || slot.claimed_by != worker_id) {
    fail(ErrorCode::kNotClaimant, "slot " + slot.id + " is not claimed by this worker");
  }
  json payload{{"task_id", entry->task.id}, {"slot_id", slot.id}, {"worker_id", worker_id}};
  sink_.append("slot.attested", with_key(std::move(payload), idempotency_key));
  slot.read_bottom_attested = true;
  if (idempotency_key) w.idempotent[cache_key] = json::object();
}

SubmitOutcome Orchestrator::submit(std::string_view slot_id, std::string_view worker_id,
                                   std::string_view body,
                                   std::optional<std::string> idempotency_key) {
  WorkerEntry& w = worker(worker_id);
  std::lock_guard wlock(w.mu);
  const std::string cache_key = idempotency_key ? "submit:" + *idempotency_key : "";
  if (idempotency_key) {
    if (auto it = w.idempotent.find(cache_key); it != w.idempotent.end()) {
      const json& cached = it->second;
      if (cached.at("status") == "accepted") return cached.at("submission").get<IdeaSubmission>();
      return cached.at("rejection").get<Rejection>();
    }
  }
  TaskEntry* entry = task_for_slot(slot_id);
  if (!entry) fail(ErrorCode::kNotFound, "slot " + std::string(slot_id) + " not found");
  std::lock_guard tlock(entry->mu);
  IdeationTask& task = entry->task;
  auto& slot = *std::find_if(task.slots.begin(), task.slots.end(),
                             [&](const auto& s) { return s.id == slot_id; });
  if (slot.state == SlotState::kSubmitted || slot.state == SlotState::kVoid ||
      task.state != TaskState::kOpen) {
    fail(ErrorCode::kBadState, "slot " + slot.id + " is " + std::string(to_string(slot.state)));
  }
  if (slot.state != SlotState::kClaimed || slot.claimed_by != worker_id) {
    fail(ErrorCode::kNotClaimant, "slot " + slot.id + " is not claimed by this worker");
  }

  const Millis now = clock_.now();
  const Millis elapsed = now - slot.offered_at;
  std::optional<Rejection> rejection;
  if (elapsed < settings_.time_lock_ms()) {
    rejection = Rejection{RejectReason::kTimeLock,
                          "submitted before the time lock expired",
                          settings_.time_lock_ms() - elapsed};
  } else if (!slot.read_bottom_attested) {
    rejection = Rejection{RejectReason::kNoReadAttestation,
                          "the story prompt was not read to the bottom", 0};
  } else if (text::word_count(body) < settings_.min_idea_words) {
    rejection = Rejection{RejectReason::kTooShort,
                          "ideas need at least " + std::to_string(settings_.min_idea_words) +
                              " words", 0};
  } else if (longest_common_run(body, task.prompt.snapshot) >= settings_.copy_overlap_tokens) {
    rejection = Rejection{RejectReason::kCopyOverlap,
                          "the idea repeats a long passage of the story prompt", 0};
  }

  if (rejection) {
    json outcome{{"status", "rejected"}, {"rejection", *rejection}};
    json payload{{"task_id", task.id}, {"slot_id", slot.id}, {"worker_id", worker_id},
                 {"at", now}, {"outcome", outcome}};
    sink_.append("idea.rejected", with_key(std::move(payload), idempotency_key));
    slot.state = SlotState::kUnclaimed;
    slot.claimed_by.reset();
    slot.read_bottom_attested = false;
    w.active.reset();
    if (idempotency_key) w.idempotent[cache_key] = outcome;
    return *rejection;
  }

  IdeaSubmission sub;
  sub.id = "idea-" + slot_suffix(slot.id);
  sub.task_id = task.id;
  sub.slot_id = slot.id;
  sub.worker_id = std::string(worker_id);
  sub.role = slot.role;
  sub.body = std::string(body);
  sub.submitted_at = now;
  sub.elapsed_read_ms = elapsed;
  if (scorer_) sub.distance_scores = scorer_(task.prompt.snapshot, body);

  ws_.write([&](workspace::WorkspaceState& st) {
    sub.role_label = slot.role ? st.character(*slot.role).name : std::string(kNoRoleLabel);
    const auto& thread = st.thread(task.thread_id);
    workspace::Reply reply{sub.role_label, sub.body, now};
    if (!thread.replies.empty()) reply.at = std::max(reply.at, thread.replies.back().at);
    json outcome{{"status", "accepted"}, {"submission", sub}};
    json payload{{"task_id", task.id}, {"slot_id", slot.id}, {"worker_id", worker_id},
                 {"thread_id", task.thread_id}, {"reply", reply}, {"outcome", outcome}};
    sink_.append("idea.accepted", with_key(std::move(payload), idempotency_key));
    st.apply_reply(task.thread_id, reply);
    if (idempotency_key) w.idempotent[cache_key] = std::move(outcome);
  });
  slot.state = SlotState::kSubmitted;
  task.accepted.push_back(sub);
  if (std::all_of(task.slots.begin(), task.slots.end(),
                  [](const auto& s) { return s.state == SlotState::kSubmitted; })) {
    task.state = TaskState::kComplete;
  }
  w.active.reset();
  w.worked_tasks.insert(task.id);
  return sub;
}

void Orchestrator::cancel(std::string_view task_id) {
  TaskEntry& entry = task_entry(task_id);
  std::lock_guard tlock(entry.mu);
  if (entry.task.state != TaskState::kOpen) {
    fail(ErrorCode::kBadState, "task " + entry.task.id + " is " +
                                   std::string(to_string(entry.task.state)));
  }
  sink_.append("task.cancelled", json{{"task_id", entry.task.id}, {"at", clock_.now()}});
  entry.task.state = TaskState::kCancelled;
  for (auto& slot : entry.task.slots) {
    if (slot.state == SlotState::kUnclaimed || slot.state == SlotState::kClaimed) {
      slot.state = SlotState::kVoid;
    }
  }
}

IdeationTask Orchestrator::get_task(std::string_view task_id) const {
  TaskEntry& entry = task_entry(task_id);
  std::lock_guard tlock(entry.mu);
  return entry.task;
}

std::vector<IdeationTask> Orchestrator::list_tasks() const {
  std::vector<IdeationTask> out;
  for (TaskEntry* entry : tasks_in_order()) {
    std::lock_guard tlock(entry->mu);
    out.push_back(entry->task);
  }
  return out;
}

namespace {

std::optional<TaskLatencyReport> latency_of(const IdeationTask& task) {
  if (task.accepted.empty()) return std::nullopt;
  TaskLatencyReport r;
  Millis first = task.accepted.front().submitted_at;
  Millis last = first;
  for (const auto& s : task.accepted) {
    first = std::min(first, s.submitted_at);
    last = std::max(last, s.submitted_at);
  }
  r.first_idea = first - task.created_at;
  r.last_idea = last - task.created_at;
  if (task.strategy == Strategy::kRolePlay) {
    std::optional<Millis> coverage = Millis{0};
    for (const auto& member : task.member_ids) {
      std::optional<Millis> earliest;
      for (const auto& s : task.accepted) {
        if (s.role == member && (!earliest || s.submitted_at < *earliest)) {
          earliest = s.submitted_at;
        }
      }
      if (!earliest) {
        coverage.reset();
        break;
      }
      coverage = std::max(*coverage, *earliest - task.created_at);
    }
    r.per_character_coverage = coverage;
  }
  return r;
}

}  // namespace

TaskStatus Orchestrator::status(std::string_view task_id) const {
  TaskEntry& entry = task_entry(task_id);
  std::lock_guard tlock(entry.mu);
  const IdeationTask& task = entry.task;
  TaskStatus s;
  s.task_id = task.id;
  s.state = task.state;
  s.strategy = task.strategy;
  s.total_slots = task.slots.size();
  for (const auto& slot : task.slots) {
    switch (slot.state) {
      case SlotState::kUnclaimed: ++s.unclaimed; break;
      case SlotState::kClaimed: ++s.claimed; break;
      case SlotState::kSubmitted: ++s.submitted; break;
      case SlotState::kVoid: ++s.voided; break;
    }
  }
  s.reward_cents = task.reward_cents;
  s.created_at = task.created_at;
  s.thread_id = task.thread_id;
  if (task.strategy == Strategy::kRolePlay) {
    ws_.read([&](const workspace::WorkspaceState& st) {
      for (const auto& id : task.member_ids) s.roles.push_back(st.character(id).name);
    });
  }
  for (const auto& sub : task.accepted) s.ideas_by_role[sub.role_label].push_back(sub);
  s.latency = latency_of(task);
  return s;
}

TaskLatencyReport Orchestrator::latency_report(std::string_view task_id) const {
  TaskEntry& entry = task_entry(task_id);
  std::lock_guard tlock(entry.mu);
  auto r = latency_of(entry.task);
  if (!r) fail(ErrorCode::kNoIdeasYet, "task " + entry.task.id + " has no accepted ideas");
  return *r;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

AssignmentSlot& slot_in(IdeationTask& task, const std::string& slot_id) {
  const auto it = std::find_if(task.slots.begin(), task.slots.end(),
                               [&](const auto& s) { return s.id == slot_id; });
  if (it == task.slots.end()) fail(ErrorCode::kRecoveryError, "unknown slot " + slot_id);
  return *it;
}

}  // namespace

void Orchestrator::apply_claim(const json& p) {
  TaskEntry& entry = task_entry(p.at("task_id").get<std::string>());
  const auto worker_id = p.at("worker_id").get<std::string>();
  auto& slot = slot_in(entry.task, p.at("slot_id").get<std::string>());
  slot.state = SlotState::kClaimed;
  slot.claimed_by = worker_id;
  slot.offered_at = p.at("offered_at").get<Millis>();
  slot.read_bottom_attested = false;
  WorkerEntry& w = worker(worker_id);
  w.active = std::make_pair(entry.task.id, slot.id);
  if (p.contains("idempotency_key")) {
    w.idempotent["claim:" + p.at("idempotency_key").get<std::string>()] = p.at("offer");
  }
}

void Orchestrator::apply_attest(const json& p) {
  TaskEntry& entry = task_entry(p.at("task_id").get<std::string>());
  slot_in(entry.task, p.at("slot_id").get<std::string>()).read_bottom_attested = true;
  if (p.contains("idempotency_key")) {
    worker(p.at("worker_id").get<std::string>())
        .idempotent["attest:" + p.at("idempotency_key").get<std::string>()] = json::object();
  }
}

void Orchestrator::apply_accept(const json& p) {
  TaskEntry& entry = task_entry(p.at("task_id").get<std::string>());
  IdeationTask& task = entry.task;
  const auto& outcome = p.at("outcome");
  auto sub = outcome.at("submission").get<IdeaSubmission>();
  slot_in(task, sub.slot_id).state = SlotState::kSubmitted;
  task.accepted.push_back(sub);
  if (std::all_of(task.slots.begin(), task.slots.end(),
                  [](const auto& s) { return s.state == SlotState::kSubmitted; })) {
    task.state = TaskState::kComplete;
  }
  ws_.write([&](workspace::WorkspaceState& st) {
    st.apply_reply(p.at("thread_id").get<std::string>(), p.at("reply").get<workspace::Reply>());
  });
  WorkerEntry& w = worker(sub.worker_id);
  w.active.reset();
  w.worked_tasks.insert(task.id);
  if (p.contains("idempotency_key")) {
    w.idempotent["submit:" + p.at("idempotency_key").get<std::string>()] = outcome;
  }
}

void Orchestrator::apply_reject(const json& p) {
  TaskEntry& entry = task_entry(p.at("task_id").get<std::string>());
  auto& slot = slot_in(entry.task, p.at("slot_id").get<std::string>());
  slot.state = SlotState::kUnclaimed;
  slot.claimed_by.reset();
  slot.read_bottom_attested = false;
  WorkerEntry& w = worker(p.at("worker_id").get<std::string>());
  w.active.reset();
  if (p.contains("idempotency_key")) {
    w.idempotent["submit:" + p.at("idempotency_key").get<std::string>()] = p.at("outcome");
  }
}

void Orchestrator::apply_cancel(const json& p) {
  TaskEntry& entry = task_entry(p.at("task_id").get<std::string>());
  entry.task.state = TaskState::kCancelled;
  for (auto& slot : entry.task.slots) {
    if (slot.state == SlotState::kUnclaimed || slot.state == SlotState::kClaimed) {
      slot.state = SlotState::kVoid;
    }
  }
}

bool Orchestrator::apply(std::string_view kind, const json& p) {
  if (kind == "task.created") {
    const auto task = p.at("task").get<IdeationTask>();
    const auto thread = p.at("thread").get<workspace::CommentThread>();
    ws_.write([&](workspace::WorkspaceState& st) { st.put_thread(thread); });
    std::unique_lock lock(tasks_mu_);
    insert_task(task);
  } else if (kind == "slot.claimed") {
    apply_claim(p);
  } else if (kind == "slot.attested") {
    apply_attest(p);
  } else if (kind == "idea.accepted") {
    apply_accept(p);
  } else if (kind == "idea.rejected") {
    apply_reject(p);
  } else if (kind == "task.cancelled") {
    apply_cancel(p);
  } else {
    return false;
  }
  return true;
}

json Orchestrator::snapshot() const {
  json j;
  j["tasks"] = json::array();
  for (TaskEntry* entry : tasks_in_order()) {
    std::lock_guard tlock(entry->mu);
    j["tasks"].push_back(entry->task);
  }
  j["workers"] = json::object();
  {
    std::lock_guard lock(workers_mu_);
    for (const auto& [id, w] : workers_) {
      std::lock_guard wlock(w->mu);
      if (!w->active && w->worked_tasks.empty() && w->idempotent.empty()) continue;
      j["workers"][id] = {
          {"active", w->active ? json{{"task_id", w->active->first}, {"slot_id", w->active->second}}
                               : json(nullptr)},
          {"worked_tasks", w->worked_tasks},
          {"idempotent", w->idempotent}};
    }
  }
  std::shared_lock lock(tasks_mu_);
  j["ids"] = {{"task", task_ids_.last()}, {"slot", slot_ids_.last()}};
  return j;
}

void Orchestrator::restore(const json& state) {
  std::unique_lock lock(tasks_mu_);
  tasks_.clear();
  order_.clear();
  slot_to_task_.clear();
  for (const auto& t : state.at("tasks")) insert_task(t.get<IdeationTask>());
  task_ids_.reset(state.at("ids").at("task").get<std::uint64_t>());
  slot_ids_.reset(state.at("ids").at("slot").get<std::uint64_t>());
  std::lock_guard wlock(workers_mu_);
  workers_.clear();
  for (const auto& [id, w] : state.at("workers").items()) {
    auto entry = std::make_unique<WorkerEntry>();
    if (!w.at("active").is_null()) {
      entry->active = std::make_pair(w.at("active").at("task_id").get<std::string>(),
                                     w.at("active").at("slot_id").get<std::string>());
    }
    entry->worked_tasks = w.at("worked_tasks").get<std::set<std::string>>();
    entry->idempotent = w.at("idempotent").get<std::map<std::string, json>>();
    workers_.emplace(id, std::move(entry));
  }
}

}  // namespace hg::orchestrator
