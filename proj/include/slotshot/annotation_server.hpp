#pragma once

#include <memory>
#include <string>

#include "slotshot/annotation.hpp"

namespace httplib {
class Server;
}

namespace slotshot {

// JSON-over-HTTP front end for AnnotationService:
//   GET  /tasks/collection?annotator=ID      POST /responses/collection
//   GET  /tasks/verification?annotator=ID    POST /responses/verification
//   GET  /templates?relation=R&status=S      POST /templates/{id}/evaluate
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationService& service);
  ~AnnotationServer();

  // Binds to `port`, or to an ephemeral port when port is 0. Returns the port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void run();
  void stop();

 private:
  AnnotationService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace slotshot
