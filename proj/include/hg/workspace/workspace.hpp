#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/common/event_sink.hpp"
#include "hg/common/ids.hpp"
#include "hg/workspace/types.hpp"

namespace hg::workspace {

enum class AnchorEffect { kShifted, kUnchanged, kOrphaned };

// Remaps `anchor` for an edit already validated against the body it applies
// to. `inserted_len` is the code-point length of edit.insert. Edits ending at
// or before anchor.start shift it; edits starting at or after anchor.end leave
// it alone; anything else overlaps.
AnchorEffect remap_anchor(SelectionRange& anchor, const TextEdit& edit,
                          std::size_t inserted_len);

// Plain data plus the deterministic event appliers. Not synchronized; the
// owning Workspace serializes access.
class WorkspaceState {
 public:
  WorkspaceState();

  const CharacterProfile& character(std::string_view id) const;
  const Team& team(std::string_view id) const;
  const Document& document(std::string_view id) const;
  const CommentThread& thread(std::string_view id) const;

  const std::map<std::string, CharacterProfile, std::less<>>& characters() const {
    return characters_;
  }
  const std::map<std::string, Team, std::less<>>& teams() const { return teams_; }
  const std::map<std::string, Document, std::less<>>& documents() const {
    return documents_;
  }
  const std::map<std::string, CommentThread, std::less<>>& threads() const {
    return threads_;
  }

  // Validation helpers; throw hg::Error.
  void check_members(const std::vector<std::string>& member_ids) const;
  SelectionRange capture(std::string_view document_id, std::size_t start,
                         std::size_t end) const;

  std::string next_character_id() const { return character_ids_.peek(); }
  std::string next_team_id() const { return team_ids_.peek(); }
  std::string next_document_id() const { return document_ids_.peek(); }
  std::string next_thread_id() const { return thread_ids_.peek(); }

  void put_character(const CharacterProfile& c);
  void put_team(const Team& t);
  void put_document(const Document& d);
  void put_thread(const CommentThread& t);
  void apply_edit(std::string_view document_id, const TextEdit& edit);
  void apply_reply(std::string_view thread_id, const Reply& reply);

  json to_json() const;
  void from_json(const json& j);

 private:
  std::map<std::string, CharacterProfile, std::less<>> characters_;
  std::map<std::string, Team, std::less<>> teams_;
  std::map<std::string, Document, std::less<>> documents_;
  std::map<std::string, CommentThread, std::less<>> threads_;
  IdAllocator character_ids_{"ch"};
  IdAllocator team_ids_{"team"};
  IdAllocator document_ids_{"doc"};
  IdAllocator thread_ids_{"th"};
};

// Characters, teams, documents and anchored comment threads. Safe for
// concurrent use: mutations are serialized, reads see a consistent snapshot.
class Workspace {
 public:
  Workspace(Clock& clock, EventSink& sink) : clock_(clock), sink_(sink) {}

  CharacterProfile create_character(std::string_view name,
                                    std::string_view description,
                                    std::optional<std::string> image_ref = {});
  CharacterProfile update_character(std::string_view id,
                                    const CharacterUpdate& update);
  void delete_character(std::string_view id);
  CharacterProfile get_character(std::string_view id) const;
  std::vector<CharacterProfile> list_characters(bool include_deleted = false) const;

  Team create_team(std::string_view name, std::vector<std::string> member_ids);
  Team update_team(std::string_view id, const TeamUpdate& update);
  void delete_team(std::string_view id);
  Team get_team(std::string_view id) const;
  std::vector<Team> list_teams() const;

  Document create_document(std::string_view title, std::string_view body);
  Document edit_document(std::string_view id, const TextEdit& edit);
  Document get_document(std::string_view id) const;

  CommentThread create_thread(std::string_view document_id, std::size_t start,
                              std::size_t end, std::string_view overview);
  CommentThread append_reply(std::string_view thread_id,
                             std::string_view author_label,
                             std::string_view body);
  CommentThread get_thread(std::string_view id) const;
  std::vector<CommentThread> list_threads(std::string_view document_id) const;

  // Composite mutations (task creation, idea delivery) run under the same
  // exclusive lock so that their single event covers the workspace change.
  template <class Fn>
  decltype(auto) write(Fn&& fn) {
    std::unique_lock lock(mu_);
    return fn(state_);
  }

  template <class Fn>
  decltype(auto) read(Fn&& fn) const {
    std::shared_lock lock(mu_);
    return fn(std::as_const(state_));
  }

  // Replays a recorded event. Returns false when `kind` is not a workspace
  // event.
  bool apply(std::string_view kind, const json& payload);

  json snapshot() const;
  void restore(const json& state);

  Clock& clock() { return clock_; }

 private:
  Clock& clock_;
  EventSink& sink_;
  mutable std::shared_mutex mu_;
  WorkspaceState state_;
};

}  // namespace hg::workspace
