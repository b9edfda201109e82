#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hg/common/clock.hpp"
#include "json.hpp"

namespace hg::workspace {

using json = nlohmann::json;

struct CharacterProfile {
  std::string id;
  std::string name;
  std::string description;
  // Writer-only; never part of a worker payload.
  std::optional<std::string> image_ref;
  Millis created_at = 0;
  bool deleted = false;

  bool operator==(const CharacterProfile&) const = default;
};

struct Team {
  std::string id;
  std::string name;
  std::vector<std::string> member_ids;
  bool deleted = false;

  bool operator==(const Team&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::uint64_t revision = 0;

  bool operator==(const Document&) const = default;
};

// Offsets are code-point indices into the document body.
struct SelectionRange {
  std::string document_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string snapshot;
  std::uint64_t revision_at_capture = 0;

  bool operator==(const SelectionRange&) const = default;
};

struct Reply {
  std::string author_label;
  std::string body;
  Millis at = 0;

  bool operator==(const Reply&) const = default;
};

struct CommentThread {
  std::string id;
  std::string document_id;
  SelectionRange anchor;
  std::string overview;
  std::vector<Reply> replies;
  bool orphaned = false;
  Millis created_at = 0;

  bool operator==(const CommentThread&) const = default;
};

// Replace `delete_len` code points at `at` with `insert`.
struct TextEdit {
  std::size_t at = 0;
  std::size_t delete_len = 0;
  std::string insert;
};

struct CharacterUpdate {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::optional<std::optional<std::string>> image_ref;
};

struct TeamUpdate {
  std::optional<std::string> name;
  std::optional<std::vector<std::string>> member_ids;
};

void to_json(json& j, const CharacterProfile& c);
void from_json(const json& j, CharacterProfile& c);
void to_json(json& j, const Team& t);
void from_json(const json& j, Team& t);
void to_json(json& j, const Document& d);
void from_json(const json& j, Document& d);
void to_json(json& j, const SelectionRange& s);
void from_json(const json& j, SelectionRange& s);
void to_json(json& j, const Reply& r);
void from_json(const json& j, Reply& r);
void to_json(json& j, const CommentThread& t);
void from_json(const json& j, CommentThread& t);
void to_json(json& j, const TextEdit& e);
void from_json(const json& j, TextEdit& e);

}  // namespace hg::workspace
