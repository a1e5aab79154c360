#include <signal.h>

#include <thread>

#include <httplib.h>

#include "curelite/common/error.hpp"
#include "curelite/service/service.hpp"

namespace curelite::service {

void serve(Service& service, const std::string& host, int port) {
  // SIGINT/SIGTERM are taken synchronously by a waiter thread so shutdown
  // runs outside signal context and the caller can save afterwards.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  httplib::Server server;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Put(".*", forward);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Curelite-Secret");
    res.status = 204;
  });

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    server.stop();
  });
  const bool ok = server.listen(host, port);
  if (waiter.joinable()) {
    // Wake the waiter if listen returned on its own.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  pthread_sigmask(SIG_UNBLOCK, &stop_signals, nullptr);
  if (!ok) throw Error(ErrorCode::IoFailure, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace curelite::service
