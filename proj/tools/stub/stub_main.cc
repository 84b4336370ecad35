// Deterministic model adapter for tests and offline runs.
//
//   stub_adapter --mode stdio [--delay-ms N] [--rubric-reply TEXT] ...
//   stub_adapter --mode http --port 8080
//
// In stdio mode requests arrive on stdin and responses leave on stdout, both
// framed with a 4-byte big-endian length.

#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "stub_adapter.h"
#include "tlm/protocol.h"

namespace {

bool WriteAll(int fd, const std::string& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + sent, bytes.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

int ServeStdio(const tlm::stub::StubOptions& options) {
  tlm::FrameDecoder decoder;
  char buf[65536];
  for (;;) {
    const ssize_t n = ::read(STDIN_FILENO, buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return 0;
    decoder.Append(std::string_view(buf, static_cast<std::size_t>(n)));
    while (auto frame = decoder.Next()) {
      if (options.delay.count() > 0) std::this_thread::sleep_for(options.delay);
      if (!WriteAll(STDOUT_FILENO,
                    tlm::FrameMessage(tlm::stub::HandleMessage(*frame, options)))) {
        return 1;
      }
    }
  }
}

int ServeHttp(const tlm::stub::StubOptions& options, const std::string& host,
              int port) {
  httplib::Server server;
  server.Post("/v1/infer", [&](const httplib::Request& req, httplib::Response& res) {
    if (options.delay.count() > 0) std::this_thread::sleep_for(options.delay);
    res.set_content(tlm::stub::HandleMessage(req.body, options),
                    "application/json");
  });
  if (port == 0) port = server.bind_to_any_port(host);
  else if (!server.bind_to_port(host, port)) port = -1;
  if (port < 0) {
    std::cerr << "stub_adapter: cannot bind " << host << "\n";
    return 1;
  }
  std::cout << port << std::endl;
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic stub model adapter"};
  std::string mode = "stdio";
  std::string host = "127.0.0.1";
  int port = 0;
  int delay_ms = 0;
  std::string rubric_reply;
  tlm::stub::StubOptions options;

  app.add_option("--mode", mode, "stdio or http")
      ->check(CLI::IsMember({"stdio", "http"}));
  app.add_option("--host", host, "HTTP bind address");
  app.add_option("--port", port, "HTTP port; 0 picks one and prints it");
  app.add_option("--delay-ms", delay_ms, "Sleep before every response");
  app.add_option("--rubric-reply", rubric_reply, "Fixed rubric reply text");
  app.add_flag("--corrupt-request-id", options.corrupt_request_id,
               "Reply with a request_id that does not match");
  app.add_flag("--drift-sentences", options.drift_sentences,
               "Pretend the adapter holds different retrieval sentences");
  app.add_flag("--empty-captions", options.empty_captions,
               "Return empty caption text");
  CLI11_PARSE(app, argc, argv);

  options.delay = std::chrono::milliseconds(delay_ms);
  if (app.count("--rubric-reply")) options.rubric_reply = rubric_reply;

  return mode == "stdio" ? ServeStdio(options) : ServeHttp(options, host, port);
}
