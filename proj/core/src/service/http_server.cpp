#include <httplib.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <mutex>
#include <thread>

#include "escout/service.hpp"

namespace escout {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Request to_request(const httplib::Request& in) {
  Request r;
  r.method = in.method;
  r.path = in.path;
  for (const auto& [k, v] : in.params) r.query.emplace(k, v);
  for (const auto& [k, v] : in.headers) r.headers.emplace(lower(k), v);
  r.body = in.body;
  return r;
}

std::string iso_now() {
  const auto now = std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
  return format_rfc3339(now, Zone::utc());
}

}  // namespace

int serve(Api& api) {
  httplib::Server server;
  std::mutex log_mutex;
  const bool log = api.config().log_requests;

  const auto handler = [&](const httplib::Request& in, httplib::Response& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const Response r = api.handle(to_request(in));
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.status = r.status;
    out.set_content(r.body.dump(), "application/json");
    if (log) {
      const Json line = {{"ts", iso_now()},     {"method", in.method}, {"path", in.path},
                         {"status", r.status},  {"duration_ms", ms},    {"bytes", out.body.size()}};
      std::lock_guard guard(log_mutex);
      std::cout << line.dump() << std::endl;
    }
  };
  const char* pattern = R"(/api/.*)";
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Patch(pattern, handler);
  server.Delete(pattern, handler);
  if (api.config().static_dir && !server.set_mount_point("/", api.config().static_dir->string())) {
    std::cerr << "escout: static dir " << api.config().static_dir->string() << " does not exist\n";
    return 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });

  const auto& c = api.config();
  if (!server.bind_to_port(c.host, c.port)) {
    std::cerr << "escout: cannot listen on " << c.host << ":" << c.port << "\n";
    g_stop.store(true);
    watcher.join();
    return 1;
  }
  std::cout << Json{{"ts", iso_now()}, {"event", "listening"}, {"host", c.host}, {"port", c.port}}.dump()
            << std::endl;
  server.listen_after_bind();
  g_stop.store(true);
  watcher.join();
  return 0;
}

}  // namespace escout
