#include "hg/workspace/workspace.hpp"

#include <algorithm>
#include <unordered_set>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"

namespace hg::workspace {

namespace {

template <class Map>
const auto& lookup(const Map& map, std::string_view id, const char* what) {
  const auto it = map.find(id);
  if (it == map.end()) fail(ErrorCode::kNotFound, std::string(what) + " " + std::string(id) + " not found");
  return it->second;
}

std::string checked_name(std::string_view name) {
  std::string trimmed = text::trim(name);
  if (trimmed.empty()) fail(ErrorCode::kEmptyName, "name is empty");
  return trimmed;
}

}  // namespace

AnchorEffect remap_anchor(SelectionRange& anchor, const TextEdit& edit,
                          std::size_t inserted_len) {
  const std::size_t edit_end = edit.at + edit.delete_len;
  if (edit_end <= anchor.start) {
    const auto delta = static_cast<std::ptrdiff_t>(inserted_len) -
                       static_cast<std::ptrdiff_t>(edit.delete_len);
    anchor.start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(anchor.start) + delta);
    anchor.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(anchor.end) + delta);
    return delta == 0 ? AnchorEffect::kUnchanged : AnchorEffect::kShifted;
  }
  if (edit.at >= anchor.end) return AnchorEffect::kUnchanged;
  return AnchorEffect::kOrphaned;
}

// ---------------------------------------------------------------------------
// WorkspaceState

WorkspaceState::WorkspaceState() = default;

const CharacterProfile& WorkspaceState::character(std::string_view id) const {
  return lookup(characters_, id, "character");
}

const Team& WorkspaceState::team(std::string_view id) const {
  const Team& t = lookup(teams_, id, "team");
  if (t.deleted) fail(ErrorCode::kNotFound, "team " + std::string(id) + " not found");
  return t;
}

const Document& WorkspaceState::document(std::string_view id) const {
  return lookup(documents_, id, "document");
}

const CommentThread& WorkspaceState::thread(std::string_view id) const {
  return lookup(threads_, id, "thread");
}

void WorkspaceState::check_members(const std::vector<std::string>& member_ids) const {
  if (member_ids.empty()) fail(ErrorCode::kEmptyTeam, "team has no members");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : member_ids) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::kDuplicateMember, "character " + id + " listed twice");
    }
    const auto it = characters_.find(id);
    if (it == characters_.end() || it->second.deleted) {
      fail(ErrorCode::kUnknownMember, "unknown character " + id);
    }
  }
}

SelectionRange WorkspaceState::capture(std::string_view document_id,
                                       std::size_t start,
                                       std::size_t end) const {
  const Document& doc = document(document_id);
  const std::size_t length = text::utf8_length(doc.body);
  if (!(start < end && end <= length)) {
    fail(ErrorCode::kInvalidAnchor,
         "selection [" + std::to_string(start) + "," + std::to_string(end) +
             ") invalid for body of length " + std::to_string(length));
  }
  const std::size_t b = text::utf8_byte_offset(doc.body, start);
  const std::size_t e = text::utf8_byte_offset(doc.body, end);
  return SelectionRange{doc.id, start, end, doc.body.substr(b, e - b),
                        doc.revision};
}

void WorkspaceState::put_character(const CharacterProfile& c) {
  character_ids_.observe(c.id);
  characters_[c.id] = c;
}

void WorkspaceState::put_team(const Team& t) {
  team_ids_.observe(t.id);
  teams_[t.id] = t;
}

void WorkspaceState::put_document(const Document& d) {
  document_ids_.observe(d.id);
  documents_[d.id] = d;
}

void WorkspaceState::put_thread(const CommentThread& t) {
  thread_ids_.observe(t.id);
  threads_[t.id] = t;
}

void WorkspaceState::apply_edit(std::string_view document_id, const TextEdit& edit) {
  const auto it = documents_.find(document_id);
  if (it == documents_.end()) fail(ErrorCode::kNotFound, "document not found");
  Document& doc = it->second;
  const std::size_t b = text::utf8_byte_offset(doc.body, edit.at);
  const std::size_t e =
      b == std::string::npos ? b : text::utf8_byte_offset(doc.body, edit.at + edit.delete_len);
  if (b == std::string::npos || e == std::string::npos) {
    fail(ErrorCode::kOutOfBounds, "edit range outside document body");
  }
  doc.body.replace(b, e - b, edit.insert);
  ++doc.revision;

  const std::size_t inserted = text::utf8_length(edit.insert);
  for (auto& [id, thread] : threads_) {
    if (thread.document_id != document_id || thread.orphaned) continue;
    if (remap_anchor(thread.anchor, edit, inserted) == AnchorEffect::kOrphaned) {
      thread.orphaned = true;
    }
  }
}

void WorkspaceState::apply_reply(std::string_view thread_id, const Reply& reply) {
  const auto it = threads_.find(thread_id);
  if (it == threads_.end()) fail(ErrorCode::kNotFound, "thread not found");
  it->second.replies.push_back(reply);
}

json WorkspaceState::to_json() const {
  json j;
  j["characters"] = json::array();
  for (const auto& [_, c] : characters_) j["characters"].push_back(c);
  j["teams"] = json::array();
  for (const auto& [_, t] : teams_) j["teams"].push_back(t);
  j["documents"] = json::array();
  for (const auto& [_, d] : documents_) j["documents"].push_back(d);
  j["threads"] = json::array();
  for (const auto& [_, t] : threads_) j["threads"].push_back(t);
  j["ids"] = {{"character", character_ids_.last()},
              {"team", team_ids_.last()},
              {"document", document_ids_.last()},
              {"thread", thread_ids_.last()}};
  return j;
}

void WorkspaceState::from_json(const json& j) {
  *this = WorkspaceState();
  for (const auto& c : j.at("characters")) put_character(c.get<CharacterProfile>());
  for (const auto& t : j.at("teams")) put_team(t.get<Team>());
  for (const auto& d : j.at("documents")) put_document(d.get<Document>());
  for (const auto& t : j.at("threads")) put_thread(t.get<CommentThread>());
  const auto& ids = j.at("ids");
  character_ids_.reset(ids.at("character").get<std::uint64_t>());
  team_ids_.reset(ids.at("team").get<std::uint64_t>());
  document_ids_.reset(ids.at("document").get<std::uint64_t>());
  thread_ids_.reset(ids.at("thread").get<std::uint64_t>());
}

// ---------------------------------------------------------------------------
// Workspace

CharacterProfile Workspace::create_character(std::string_view name,
                                             std::string_view description,
                                             std::optional<std::string> image_ref) {
  std::unique_lock lock(mu_);
  CharacterProfile c;
  c.name = checked_name(name);
  c.description = std::string(description);
  c.image_ref = std::move(image_ref);
  c.created_at = clock_.now();
  c.id = state_.next_character_id();
  sink_.append("character.created", c);
  state_.put_character(c);
  return c;
}

CharacterProfile Workspace::update_character(std::string_view id,
                                             const CharacterUpdate& update) {
  std::unique_lock lock(mu_);
  CharacterProfile c = state_.character(id);
  if (c.deleted) fail(ErrorCode::kNotFound, "character " + std::string(id) + " was deleted");
  if (update.name) c.name = checked_name(*update.name);
  if (update.description) c.description = *update.description;
  if (update.image_ref) c.image_ref = *update.image_ref;
  sink_.append("character.updated", c);
  state_.put_character(c);
  return c;
}

void Workspace::delete_character(std::string_view id) {
  std::unique_lock lock(mu_);
  CharacterProfile c = state_.character(id);
  if (c.deleted) fail(ErrorCode::kNotFound, "character " + std::string(id) + " was deleted");
  c.deleted = true;
  sink_.append("character.deleted", json{{"id", c.id}});
  state_.put_character(c);
}

CharacterProfile Workspace::get_character(std::string_view id) const {
  std::shared_lock lock(mu_);
  return state_.character(id);
}

std::vector<CharacterProfile> Workspace::list_characters(bool include_deleted) const {
  std::shared_lock lock(mu_);
  std::vector<CharacterProfile> out;
  for (const auto& [_, c] : state_.characters()) {
    if (include_deleted || !c.deleted) out.push_back(c);
  }
  return out;
}

Team Workspace::create_team(std::string_view name, std::vector<std::string> member_ids) {
  std::unique_lock lock(mu_);
  Team t;
  t.name = checked_name(name);
  state_.check_members(member_ids);
  t.member_ids = std::move(member_ids);
  t.id = state_.next_team_id();
  sink_.append("team.created", t);
  state_.put_team(t);
  return t;
}

Team Workspace::update_team(std::string_view id, const TeamUpdate& update) {
  std::unique_lock lock(mu_);
  Team t = state_.team(id);
  if (update.name) t.name = checked_name(*update.name);
  if (update.member_ids) {
    state_.check_members(*update.member_ids);
    t.member_ids = *update.member_ids;
  }
  sink_.append("team.updated", t);
  state_.put_team(t);
  return t;
}

void Workspace::delete_team(std::string_view id) {
  std::unique_lock lock(mu_);
  Team t = state_.team(id);
  t.deleted = true;
  sink_.append("team.deleted", json{{"id", t.id}});
  state_.put_team(t);
}

Team Workspace::get_team(std::string_view id) const {
  std::shared_lock lock(mu_);
  return state_.team(id);
}

std::vector<Team> Workspace::list_teams() const {
  std::shared_lock lock(mu_);
  std::vector<Team> out;
  for (const auto& [_, t] : state_.teams()) {
    if (!t.deleted) out.push_back(t);
  }
  return out;
}

Document Workspace::create_document(std::string_view title, std::string_view body) {
  std::unique_lock lock(mu_);
  Document d{state_.next_document_id(), std::string(title), std::string(body), 0};
  sink_.append("document.created", d);
  state_.put_document(d);
  return d;
}

Document Workspace::edit_document(std::string_view id, const TextEdit& edit) {
  std::unique_lock lock(mu_);
  const Document& doc = state_.document(id);
  const std::size_t length = text::utf8_length(doc.body);
  if (edit.at > length || edit.delete_len > length - edit.at) {
    fail(ErrorCode::kOutOfBounds, "edit range outside document body");
  }
  sink_.append("document.edited", json{{"id", doc.id}, {"edit", edit}});
  state_.apply_edit(id, edit);
  return state_.document(id);
}

Document Workspace::get_document(std::string_view id) const {
  std::shared_lock lock(mu_);
  return state_.document(id);
}

CommentThread Workspace::create_thread(std::string_view document_id,
                                       std::size_t start, std::size_t end,
                                       std::string_view overview) {
  std::unique_lock lock(mu_);
  CommentThread t;
  t.anchor = state_.capture(document_id, start, end);
  t.document_id = t.anchor.document_id;
  t.overview = std::string(overview);
  t.created_at = clock_.now();
  t.id = state_.next_thread_id();
  sink_.append("thread.created", t);
  state_.put_thread(t);
  return t;
}

CommentThread Workspace::append_reply(std::string_view thread_id,
                                      std::string_view author_label,
                                      std::string_view body) {
  std::unique_lock lock(mu_);
  const CommentThread& t = state_.thread(thread_id);
  Reply r{std::string(author_label), std::string(body), clock_.now()};
  if (!t.replies.empty()) r.at = std::max(r.at, t.replies.back().at);
  sink_.append("thread.reply", json{{"thread_id", t.id}, {"reply", r}});
  state_.apply_reply(thread_id, r);
  return state_.thread(thread_id);
}

CommentThread Workspace::get_thread(std::string_view id) const {
  std::shared_lock lock(mu_);
  return state_.thread(id);
}

std::vector<CommentThread> Workspace::list_threads(std::string_view document_id) const {
  std::shared_lock lock(mu_);
  state_.document(document_id);
  std::vector<CommentThread> out;
  for (const auto& [_, t] : state_.threads()) {
    if (t.document_id == document_id) out.push_back(t);
  }
  return out;
}

bool Workspace::apply(std::string_view kind, const json& payload) {
  std::unique_lock lock(mu_);
  if (kind == "character.created" || kind == "character.updated") {
    state_.put_character(payload.get<CharacterProfile>());
  } else if (kind == "character.deleted") {
    CharacterProfile c = state_.character(payload.at("id").get<std::string>());
    c.deleted = true;
    state_.put_character(c);
  } else if (kind == "team.created" || kind == "team.updated") {
    state_.put_team(payload.get<Team>());
  } else if (kind == "team.deleted") {
    Team t = state_.team(payload.at("id").get<std::string>());
    t.deleted = true;
    state_.put_team(t);
  } else if (kind == "document.created") {
    state_.put_document(payload.get<Document>());
  } else if (kind == "document.edited") {
    state_.apply_edit(payload.at("id").get<std::string>(),
                      payload.at("edit").get<TextEdit>());
  } else if (kind == "thread.created") {
    state_.put_thread(payload.get<CommentThread>());
  } else if (kind == "thread.reply") {
    state_.apply_reply(payload.at("thread_id").get<std::string>(),
                       payload.at("reply").get<Reply>());
  } else {
    return false;
  }
  return true;
}

json Workspace::snapshot() const {
  std::shared_lock lock(mu_);
  return state_.to_json();
}

void Workspace::restore(const json& state) {
  std::unique_lock lock(mu_);
  state_.from_json(state);
}

}  // namespace hg::workspace
