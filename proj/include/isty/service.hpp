#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "isty/error.hpp"
#include "isty/lightfield.hpp"
#include "isty/mask_ops.hpp"

namespace httplib {
class Server;
}

namespace isty {

class NotFoundError : public Error {
 public:
  using Error::Error;
};

struct ServiceOptions {
  std::chrono::seconds ttl{30 * 60};
  /// Replaceable for tests.
  std::function<std::chrono::steady_clock::time_point()> clock = [] {
    return std::chrono::steady_clock::now();
  };
};

enum class MaskChoice {
  current,  // whatever the last mask / band / edits call left behind
  automatic,  // the model's mask at disparity 0
};

/// Interactive de-occlusion sessions.  Requests on one session are serialized
/// by that session's lock; distinct sessions proceed in parallel and only
/// share the (immutable) model.
class SessionManager {
 public:
  explicit SessionManager(std::shared_ptr<const Deoccluder> model, ServiceOptions opts = {});

  std::string create(LightField lf);
  ViewImage center(const std::string& id);
  /// Sets and returns the current mask.
  SoftMask mask(const std::string& id, double d);
  SoftMask band(const std::string& id, double d1, double d2);
  SoftMask apply_edits(const std::string& id, const std::vector<Stroke>& strokes);
  SoftMask current_mask(const std::string& id);
  ViewImage deocc(const std::string& id, MaskChoice choice = MaskChoice::current);
  /// JSON array of {"op", ...parameters} in request order.
  std::string history(const std::string& id);
  void remove(const std::string& id);

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t expire();
  std::size_t size() const;
  /// Number of model mask evaluations so far (cache misses), across sessions.
  std::uint64_t model_calls() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);
  SoftMask mask_locked(Session& s, double d);

  std::shared_ptr<const Deoccluder> model_;
  ServiceOptions opts_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_token_;
  std::uint64_t model_calls_ = 0;
};

/// REST front end:
///   POST   /sessions?u=U&v=V        body: PNG grid of U x V views
///   GET    /sessions/{id}/center    PNG
///   GET    /sessions/{id}/mask      PNG (current mask)
///   POST   /sessions/{id}/mask      {"d": ...}             -> PNG
///   POST   /sessions/{id}/band      {"d1": ..., "d2": ...} -> PNG
///   POST   /sessions/{id}/edits     {"strokes": [...]}     -> PNG
///   POST   /sessions/{id}/deocc     {"mask": "current"|"auto"} (optional) -> PNG
///   GET    /sessions/{id}/history   JSON
///   DELETE /sessions/{id}
/// Mask endpoints accept ?bits=16 for lossless 16-bit output.  Errors are
/// {"code", "message"} with a 4xx/5xx status.
class HttpService {
 public:
  explicit HttpService(SessionManager& sessions);
  ~HttpService();

  /// Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  SessionManager& sessions_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace isty
