#include <cstdlib>

#include "httplib.h"
#include "isty/image_io.hpp"
#include "isty/lightfield_io.hpp"
#include "isty/service.hpp"
#include "json.hpp"

namespace isty {

using nlohmann::json;

namespace {

constexpr const char* kSession = R"(/sessions/([0-9a-f]{16}))";

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
  res.status = status;
  res.set_content(json{{"code", code}, {"message", msg}}.dump(), "application/json");
}

void send_png(httplib::Response& res, std::vector<std::uint8_t> bytes) {
  res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
}

void send_mask(const httplib::Request& req, httplib::Response& res, const SoftMask& m) {
  int bits = 8;
  if (req.has_param("bits")) {
    const std::string b = req.get_param_value("bits");
    if (b != "8" && b != "16") throw ArgumentError("bits must be 8 or 16");
    bits = std::stoi(b);
  }
  send_png(res, encode_png(m, bits));
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ArgumentError("request body is not a JSON object");
  return j;
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ArgumentError(std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

int positive_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) throw ArgumentError(std::string("missing query parameter '") + key + "'");
  const std::string s = req.get_param_value(key);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || v <= 0 || v > 64) throw ArgumentError(std::string("bad ") + key);
  return static_cast<int>(v);
}

}  // namespace

HttpService::HttpService(SessionManager& sessions)
    : sessions_(sessions), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  auto& mgr = sessions_;

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const NotFoundError& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const ArgumentError& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const FormatError& e) {
      send_error(res, 400, "bad_upload", e.what());
    } catch (const LoadError& e) {
      send_error(res, 400, "bad_upload", e.what());
    } catch (const ConfigError& e) {
      send_error(res, 422, "unsupported", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });

  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const int U = positive_param(req, "u"), V = positive_param(req, "v");
    if (req.body.empty()) throw FormatError("empty upload");
    const auto img = decode_image(std::vector<std::uint8_t>(req.body.begin(), req.body.end()));
    const LightField lf = lightfield_from_grid(img.rgb, U, V);
    const std::string id = mgr.create(lf);
    res.status = 201;
    res.set_content(json{{"id", id}, {"U", lf.U()}, {"V", lf.V()}, {"X", lf.X()}, {"Y", lf.Y()}}.dump(),
                    "application/json");
  });

  srv.Get(std::string(kSession) + "/center", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send_png(res, encode_png(mgr.center(req.matches[1])));
  });

  srv.Get(std::string(kSession) + "/mask", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send_mask(req, res, mgr.current_mask(req.matches[1]));
  });

  srv.Post(std::string(kSession) + "/mask", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const json j = body_json(req);
    send_mask(req, res, mgr.mask(req.matches[1], number(j, "d")));
  });

  srv.Post(std::string(kSession) + "/band", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const json j = body_json(req);
    send_mask(req, res, mgr.band(req.matches[1], number(j, "d1"), number(j, "d2")));
  });

  srv.Post(std::string(kSession) + "/edits", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const json j = body_json(req);
    if (!j.contains("strokes")) throw ArgumentError("missing 'strokes'");
    send_mask(req, res, mgr.apply_edits(req.matches[1], strokes_from_json(j.dump())));
  });

  srv.Post(std::string(kSession) + "/deocc", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const json j = body_json(req);
    MaskChoice choice = MaskChoice::current;
    if (j.contains("mask")) {
      if (j["mask"] == "auto") {
        choice = MaskChoice::automatic;
      } else if (j["mask"] != "current") {
        throw ArgumentError("mask must be \"current\" or \"auto\"");
      }
    }
    send_png(res, encode_png(mgr.deocc(req.matches[1], choice)));
  });

  srv.Get(std::string(kSession) + "/history", [&mgr](const httplib::Request& req, httplib::Response& res) {
    res.set_content(mgr.history(req.matches[1]), "application/json");
  });

  srv.Delete(kSession, [&mgr](const httplib::Request& req, httplib::Response& res) {
    mgr.remove(req.matches[1]);
    res.status = 204;
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not_found" : "error", httplib::status_message(res.status));
    }
  });
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ArgumentError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::stop() { server_->stop(); }

}  // namespace isty
