#pragma once

#include <memory>
#include <string>

#include "foundry/pipeline/store.hpp"

namespace httplib {
class Server;
}

namespace foundry::review {

inline constexpr int kDefaultPort = 8787;

struct ServiceOptions {
  pipeline::ExportPolicy policy = pipeline::ExportPolicy::AnyAccept;
  std::string cors_origin = "*";
};

// HTTP view over a journal. Reads share a lock; verdicts go through the
// journal's single writer.
//
//   GET  /candidates?theme=&status=&sort=&limit=&offset=
//   GET  /candidates/{id}
//   POST /candidates/{id}/verdict   {"decision", "note", "reviewer"}
//   GET  /export/booklet.md
//   GET  /export/booklet.json
class ReviewService {
 public:
  ReviewService(pipeline::Journal& journal, ServiceOptions opts = {});
  ~ReviewService();

  // Binds to host:port (port 0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();

  httplib::Server& server() { return *server_; }

 private:
  void routes();

  pipeline::Journal& journal_;
  ServiceOptions opts_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace foundry::review
