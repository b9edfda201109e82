#pragma once

#include <memory>
#include <thread>

#include "hg/common/error.hpp"
#include "hg/common/event_sink.hpp"
#include "hg/service/app.hpp"

namespace httplib {
class Server;
}

namespace hg::service {

// HTTP status for an error code.
int http_status(ErrorCode code);

// Rewrites integer values under keys named "at" or ending in "_at" into
// ISO-8601 UTC strings, recursively.
json with_iso_timestamps(json j);

// JSON API over an App. Writer routes need X-Writer-Key, worker routes
// X-Worker-Id; Idempotency-Key is honoured on worker mutations.
class HttpServer {
 public:
  explicit HttpServer(App& app);
  ~HttpServer();

  // Binds listen_address (port 0 picks a free port) and returns the port.
  // Throws kPortBindError.
  int bind();
  // Serves until stop(); bind() first.
  void run();
  // run() on a background thread.
  void start();
  void stop();

 private:
  void routes();

  App& app_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace hg::service
