#include "hg/service/http.hpp"

#include <httplib.h>
#include <sys/socket.h>

#include <regex>

#include "hg/common/text.hpp"

namespace hg::service {

namespace {

using httplib::Request;
using httplib::Response;
using orchestrator::IdeaSubmission;
using orchestrator::Rejection;

enum class Access { kPublic, kWriter, kWorker };

constexpr const char* kJson = "application/json";

json error_body(ErrorCode code, std::string_view message) {
  return json{{"error", to_string(code)}, {"message", message}};
}

bool ends_with_at(const std::string& key) {
  return key == "at" || (key.size() > 3 && key.compare(key.size() - 3, 3, "_at") == 0);
}

json parse_body(const Request& req) {
  if (text::trim(req.body).empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorCode::kParseError, "request body must be a JSON object");
  return j;
}

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T>
T req_field(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

bool equal_secret(std::string_view a, std::string_view b) {
  unsigned char diff = a.size() == b.size() ? 0 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= a[i] ^ b[i % std::max<std::size_t>(b.size(), 1)];
  return diff == 0;
}

bool valid_worker_id(const std::string& id) {
  static const std::regex pattern("[A-Za-z0-9._:-]{1,64}");
  return std::regex_match(id, pattern);
}

std::optional<std::string> idempotency_key(const Request& req) {
  if (!req.has_header("Idempotency-Key")) return std::nullopt;
  std::string key = req.get_header_value("Idempotency-Key");
  if (key.empty() || key.size() > 200) fail(ErrorCode::kInvalidArgument, "bad Idempotency-Key");
  return key;
}

json worker_receipt(const orchestrator::SubmitOutcome& outcome) {
  if (const auto* sub = std::get_if<IdeaSubmission>(&outcome)) {
    return json{{"status", "accepted"},
                {"submission",
                 {{"id", sub->id},
                  {"task_id", sub->task_id},
                  {"slot_id", sub->slot_id},
                  {"role_label", sub->role_label},
                  {"submitted_at", sub->submitted_at},
                  {"word_count", text::word_count(sub->body)}}}};
  }
  const auto& r = std::get<Rejection>(outcome);
  return json{{"status", "rejected"},
              {"reason", to_string(r.reason)},
              {"message", r.message},
              {"retry_after_ms", r.retry_after_ms}};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kDenied:
      return 401;
    case ErrorCode::kNotClaimant:
      return 403;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kNoWorkAvailable:
    case ErrorCode::kAlreadyActive:
    case ErrorCode::kAlreadyWorkedTask:
    case ErrorCode::kBadState:
    case ErrorCode::kNoIdeasYet:
      return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyName:
    case ErrorCode::kUnknownMember:
    case ErrorCode::kDuplicateMember:
    case ErrorCode::kEmptyTeam:
    case ErrorCode::kOutOfBounds:
    case ErrorCode::kInvalidAnchor:
    case ErrorCode::kUnknownTeam:
    case ErrorCode::kDeletedCharacterInTeam:
    case ErrorCode::kInvalidSelection:
      return 422;
    case ErrorCode::kStorageFull:
      return 503;
    default:
      return 500;
  }
}

json with_iso_timestamps(json j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (ends_with_at(it.key()) && it.value().is_number_integer()) {
        it.value() = format_iso8601(it.value().get<Millis>());
      } else {
        it.value() = with_iso_timestamps(std::move(it.value()));
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) v = with_iso_timestamps(std::move(v));
  }
  return j;
}

HttpServer::HttpServer(App& app) : app_(app), server_(std::make_unique<httplib::Server>()) {
  const std::size_t threads = app_.config().http_threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // SO_REUSEADDR only: the library default (SO_REUSEPORT) would let a second
  // server share a port that is already in use.
  server_->set_socket_options([](int sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  const auto& cfg = app_.config();
  const int port = cfg.port();
  if (port == 0) {
    const int bound = server_->bind_to_any_port(cfg.host());
    if (bound < 0) fail(ErrorCode::kPortBindError, "cannot bind " + cfg.host());
    return bound;
  }
  if (!server_->bind_to_port(cfg.host(), port)) {
    fail(ErrorCode::kPortBindError, "cannot bind " + cfg.listen_address);
  }
  return port;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { run(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpServer::routes() {
  using Body = std::function<json(const Request&, Response&, const std::string& worker)>;
  auto handle = [this](Access access, bool mutating, int ok_status, Body body) {
    return [this, access, mutating, ok_status, body = std::move(body)](const Request& req,
                                                                        Response& res) {
      json out;
      int status = ok_status;
      try {
        std::string worker;
        if (access == Access::kWriter) {
          if (!req.has_header("X-Writer-Key")) fail(ErrorCode::kDenied, "writer key required");
          if (!equal_secret(req.get_header_value("X-Writer-Key"), app_.config().writer_key)) {
            fail(ErrorCode::kDenied, "wrong writer key");
          }
        } else if (access == Access::kWorker) {
          worker = req.get_header_value("X-Worker-Id");
          if (!valid_worker_id(worker)) fail(ErrorCode::kDenied, "worker id required");
        }
        if (mutating) {
          auto scope = app_.mutation_scope();
          out = body(req, res, worker);
        } else {
          out = body(req, res, worker);
        }
      } catch (const Error& e) {
        status = http_status(e.code());
        out = error_body(e.code(), e.what());
      } catch (const json::exception& e) {
        status = 400;
        out = error_body(ErrorCode::kParseError, e.what());
      } catch (const std::exception& e) {
        status = 500;
        out = json{{"error", "Internal"}, {"message", e.what()}};
      }
      res.status = status;
      if (status == 204) return;
      res.set_content(with_iso_timestamps(std::move(out)).dump(), kJson);
      if (mutating && status < 300) {
        try {
          app_.maybe_snapshot();
        } catch (const Error&) {
          // The mutation is durable in the log; compaction retries next time.
        }
      }
    };
  };
  auto& s = *server_;
  auto& ws = app_.workspace();
  auto& orch = app_.orchestrator();
  const auto W = Access::kWriter;

  s.Get("/health", handle(Access::kPublic, false, 200, [this](auto&, auto&, auto&) {
          return json{{"status", "ok"},
                      {"clock", app_.config().clock},
                      {"now", format_iso8601(app_.manual_clock() ? app_.manual_clock()->peek()
                                                                  : app_.clock().now())},
                      {"seq", app_.log().last_seq()},
                      {"metrics", app_.metrics()},
                      {"time_lock_seconds", app_.config().time_lock_seconds},
                      {"min_idea_words", app_.config().min_idea_words}};
        }));

  // --- characters ---------------------------------------------------------
  s.Post("/characters", handle(W, true, 201, [&ws](const Request& req, auto&, auto&) {
           const json b = parse_body(req);
           return json(ws.create_character(req_field<std::string>(b, "name"),
                                           opt<std::string>(b, "description").value_or(""),
                                           opt<std::string>(b, "image_ref")));
         }));
  s.Get("/characters", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.list_characters(req.get_param_value("include_deleted") == "true"));
        }));
  s.Get("/characters/:id", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.get_character(req.path_params.at("id")));
        }));
  s.Patch("/characters/:id", handle(W, true, 200, [&ws](const Request& req, auto&, auto&) {
            const json b = parse_body(req);
            workspace::CharacterUpdate u;
            u.name = opt<std::string>(b, "name");
            u.description = opt<std::string>(b, "description");
            if (b.contains("image_ref")) u.image_ref = opt<std::string>(b, "image_ref");
            return json(ws.update_character(req.path_params.at("id"), u));
          }));
  s.Delete("/characters/:id", handle(W, true, 204, [&ws](const Request& req, auto&, auto&) {
             ws.delete_character(req.path_params.at("id"));
             return json();
           }));

  // --- teams --------------------------------------------------------------
  s.Post("/teams", handle(W, true, 201, [&ws](const Request& req, auto&, auto&) {
           const json b = parse_body(req);
           return json(ws.create_team(req_field<std::string>(b, "name"),
                                      req_field<std::vector<std::string>>(b, "member_ids")));
         }));
  s.Get("/teams", handle(W, false, 200, [&ws](auto&, auto&, auto&) { return json(ws.list_teams()); }));
  s.Get("/teams/:id", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.get_team(req.path_params.at("id")));
        }));
  s.Patch("/teams/:id", handle(W, true, 200, [&ws](const Request& req, auto&, auto&) {
            const json b = parse_body(req);
            workspace::TeamUpdate u;
            u.name = opt<std::string>(b, "name");
            u.member_ids = opt<std::vector<std::string>>(b, "member_ids");
            return json(ws.update_team(req.path_params.at("id"), u));
          }));
  s.Delete("/teams/:id", handle(W, true, 204, [&ws](const Request& req, auto&, auto&) {
             ws.delete_team(req.path_params.at("id"));
             return json();
           }));

  // --- documents and threads ----------------------------------------------
  s.Post("/documents", handle(W, true, 201, [&ws](const Request& req, auto&, auto&) {
           const json b = parse_body(req);
           return json(ws.create_document(opt<std::string>(b, "title").value_or(""),
                                          req_field<std::string>(b, "body")));
         }));
  s.Get("/documents", handle(W, false, 200, [&ws](auto&, auto&, auto&) {
          return ws.read([](const workspace::WorkspaceState& st) {
            json out = json::array();
            for (const auto& [id, doc] : st.documents()) out.push_back(doc);
            return out;
          });
        }));
  s.Get("/documents/:id", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.get_document(req.path_params.at("id")));
        }));
  s.Patch("/documents/:id", handle(W, true, 200, [&ws](const Request& req, auto&, auto&) {
            const json b = parse_body(req);
            workspace::TextEdit edit{req_field<std::size_t>(b, "at"),
                                     opt<std::size_t>(b, "delete_len").value_or(0),
                                     opt<std::string>(b, "insert").value_or("")};
            return json(ws.edit_document(req.path_params.at("id"), edit));
          }));
  s.Get("/documents/:id/threads", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.list_threads(req.path_params.at("id")));
        }));
  s.Get("/threads/:id", handle(W, false, 200, [&ws](const Request& req, auto&, auto&) {
          return json(ws.get_thread(req.path_params.at("id")));
        }));

  // --- tasks --------------------------------------------------------------
  s.Post("/documents/:id/tasks", handle(W, true, 201, [this, &orch](const Request& req, auto&, auto&) {
           const json b = parse_body(req);
           orchestrator::CreateTaskRequest r;
           r.document_id = req.path_params.at("id");
           r.start = req_field<std::size_t>(b, "start");
           r.end = req_field<std::size_t>(b, "end");
           r.team_id = req_field<std::string>(b, "team_id");
           r.note = opt<std::string>(b, "note");
           if (const auto s = opt<std::string>(b, "strategy")) {
             const auto parsed = orchestrator::parse_strategy(*s);
             if (!parsed) fail(ErrorCode::kInvalidArgument, "strategy must be ROLE_PLAY or NO_ROLE");
             r.strategy = *parsed;
           }
           const auto quota = opt<long long>(b, "quota");
           if (quota && *quota < 1) fail(ErrorCode::kInvalidArgument, "quota must be >= 1");
           r.per_character_quota = quota ? static_cast<unsigned>(*quota) : app_.config().per_character_quota;
           return json(orch.create_task(r));
         }));
  s.Get("/tasks", handle(W, false, 200, [&orch](auto&, auto&, auto&) {
          json out = json::array();
          for (const auto& t : orch.list_tasks()) out.push_back(orch.status(t.id));
          return out;
        }));
  s.Get("/tasks/:id", handle(W, false, 200, [&orch](const Request& req, auto&, auto&) {
          return json(orch.status(req.path_params.at("id")));
        }));
  s.Get("/tasks/:id/latency", handle(W, false, 200, [&orch](const Request& req, auto&, auto&) {
          return json(orch.latency_report(req.path_params.at("id")));
        }));
  s.Post("/tasks/:id/cancel", handle(W, true, 200, [&orch](const Request& req, auto&, auto&) {
           orch.cancel(req.path_params.at("id"));
           return json(orch.status(req.path_params.at("id")));
         }));
  s.Get("/tasks/:id/ideas", handle(W, false, 200, [this](const Request& req, auto&, auto&) {
          std::optional<std::string> metric;
          if (req.has_param("rank")) metric = req.get_param_value("rank");
          return app_.ideas(req.path_params.at("id"), metric);
        }));

  // --- admin --------------------------------------------------------------
  s.Get("/admin/state", handle(W, false, 200, [this](auto&, auto&, auto&) {
          json st = app_.state();
          st["seq"] = app_.log().last_seq();
          return st;
        }));
  s.Post("/admin/snapshot", handle(W, false, 200, [this](auto&, auto&, auto&) {
           return json{{"seq", app_.snapshot()}};
         }));
  s.Post("/admin/clock", handle(W, false, 200, [this](const Request& req, auto&, auto&) {
           ManualClock* clock = app_.manual_clock();
           if (!clock) fail(ErrorCode::kBadState, "the server runs on the system clock");
           const json b = parse_body(req);
           if (b.contains("now")) {
             std::optional<Millis> t;
             if (b.at("now").is_string()) t = parse_iso8601(b.at("now").get<std::string>());
             if (b.at("now").is_number_integer()) t = b.at("now").get<Millis>();
             if (!t) fail(ErrorCode::kParseError, "now must be ISO-8601 or epoch milliseconds");
             if (!clock->set(*t)) fail(ErrorCode::kBadState, "the clock cannot move backwards");
           } else if (b.contains("advance_ms")) {
             const auto d = b.at("advance_ms").get<Millis>();
             if (d < 0) fail(ErrorCode::kBadState, "the clock cannot move backwards");
             clock->advance(d);
           } else {
             fail(ErrorCode::kParseError, "expected now or advance_ms");
           }
           return json{{"now", format_iso8601(clock->peek())}};
         }));

  // --- worker -------------------------------------------------------------
  s.Post("/work/claim", handle(Access::kWorker, true, 200,
                               [&orch](const Request& req, auto&, const std::string& worker) {
                                 return json(orch.claim(worker, idempotency_key(req)));
                               }));
  s.Post("/work/:slot/read-bottom",
         handle(Access::kWorker, true, 200,
                [&orch](const Request& req, auto&, const std::string& worker) {
                  orch.attest_read_bottom(req.path_params.at("slot"), worker, idempotency_key(req));
                  return json{{"slot_id", req.path_params.at("slot")}, {"read_bottom_attested", true}};
                }));
  s.Post("/work/:slot/submit",
         handle(Access::kWorker, true, 200,
                [&orch](const Request& req, auto&, const std::string& worker) {
                  const json b = parse_body(req);
                  return worker_receipt(orch.submit(req.path_params.at("slot"), worker,
                                                    req_field<std::string>(b, "body"),
                                                    idempotency_key(req)));
                }));
}

}  // namespace hg::service
