#include "hg/workspace/types.hpp"

namespace hg::workspace {

void to_json(json& j, const CharacterProfile& c) {
  j = json{{"id", c.id},
           {"name", c.name},
           {"description", c.description},
           {"image_ref", c.image_ref ? json(*c.image_ref) : json(nullptr)},
           {"created_at", c.created_at},
           {"deleted", c.deleted}};
}

void from_json(const json& j, CharacterProfile& c) {
  j.at("id").get_to(c.id);
  j.at("name").get_to(c.name);
  j.at("description").get_to(c.description);
  const auto& img = j.at("image_ref");
  c.image_ref = img.is_null() ? std::nullopt
                              : std::optional<std::string>(img.get<std::string>());
  j.at("created_at").get_to(c.created_at);
  j.at("deleted").get_to(c.deleted);
}

void to_json(json& j, const Team& t) {
  j = json{{"id", t.id},
           {"name", t.name},
           {"member_ids", t.member_ids},
           {"deleted", t.deleted}};
}

void from_json(const json& j, Team& t) {
  j.at("id").get_to(t.id);
  j.at("name").get_to(t.name);
  j.at("member_ids").get_to(t.member_ids);
  j.at("deleted").get_to(t.deleted);
}

void to_json(json& j, const Document& d) {
  j = json{{"id", d.id},
           {"title", d.title},
           {"body", d.body},
           {"revision", d.revision}};
}

void from_json(const json& j, Document& d) {
  j.at("id").get_to(d.id);
  j.at("title").get_to(d.title);
  j.at("body").get_to(d.body);
  j.at("revision").get_to(d.revision);
}

void to_json(json& j, const SelectionRange& s) {
  j = json{{"document_id", s.document_id},
           {"start", s.start},
           {"end", s.end},
           {"snapshot", s.snapshot},
           {"revision_at_capture", s.revision_at_capture}};
}

void from_json(const json& j, SelectionRange& s) {
  j.at("document_id").get_to(s.document_id);
  j.at("start").get_to(s.start);
  j.at("end").get_to(s.end);
  j.at("snapshot").get_to(s.snapshot);
  j.at("revision_at_capture").get_to(s.revision_at_capture);
}

void to_json(json& j, const Reply& r) {
  j = json{{"author_label", r.author_label}, {"body", r.body}, {"at", r.at}};
}

void from_json(const json& j, Reply& r) {
  j.at("author_label").get_to(r.author_label);
  j.at("body").get_to(r.body);
  j.at("at").get_to(r.at);
}

void to_json(json& j, const CommentThread& t) {
  j = json{{"id", t.id},
           {"document_id", t.document_id},
           {"anchor", t.anchor},
           {"overview", t.overview},
           {"replies", t.replies},
           {"orphaned", t.orphaned},
           {"created_at", t.created_at}};
}

void from_json(const json& j, CommentThread& t) {
  j.at("id").get_to(t.id);
  j.at("document_id").get_to(t.document_id);
  j.at("anchor").get_to(t.anchor);
  j.at("overview").get_to(t.overview);
  j.at("replies").get_to(t.replies);
  j.at("orphaned").get_to(t.orphaned);
  j.at("created_at").get_to(t.created_at);
}

void to_json(json& j, const TextEdit& e) {
  j = json{{"at", e.at}, {"delete_len", e.delete_len}, {"insert", e.insert}};
}

void from_json(const json& j, TextEdit& e) {
  j.at("at").get_to(e.at);
  e.delete_len = j.value("delete_len", std::size_t{0});
  e.insert = j.value("insert", std::string{});
}

}  // namespace hg::workspace
