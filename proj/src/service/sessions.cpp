#include <cstdio>
#include <random>

#include "isty/service.hpp"
#include "json.hpp"

namespace isty {

using nlohmann::json;

struct SessionManager::Session {
  std::mutex mu;
  LightField lf;
  std::map<double, SoftMask> mask_cache;
  SoftMask current;
  bool has_current = false;
  json history = json::array();
  std::chrono::steady_clock::time_point last_used;
};

SessionManager::SessionManager(std::shared_ptr<const Deoccluder> model, ServiceOptions opts)
    : model_(std::move(model)), opts_(std::move(opts)), next_token_(std::random_device{}()) {
  if (!model_) throw ArgumentError("SessionManager: no model");
}

std::string SessionManager::create(LightField lf) {
  lf.validate();
  auto s = std::make_shared<Session>();
  s->lf = std::move(lf);
  s->last_used = opts_.clock();
  s->history.push_back({{"op", "create"}, {"U", s->lf.U()}, {"V", s->lf.V()},
                        {"X", s->lf.X()}, {"Y", s->lf.Y()}});
  std::lock_guard lock(mu_);
  std::string id;
  do {
    // splitmix64 over a counter seeded from the OS: unique and hard to guess
    std::uint64_t z = (next_token_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
    id = buf;
  } while (sessions_.count(id));
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  const auto now = opts_.clock();
  if (it == sessions_.end() || now - it->second->last_used > opts_.ttl) {
    if (it != sessions_.end()) sessions_.erase(it);
    throw NotFoundError("no session " + id);
  }
  it->second->last_used = now;
  return it->second;
}

SoftMask SessionManager::mask_locked(Session& s, double d) {
  if (!std::isfinite(d)) throw ArgumentError("disparity must be finite");
  auto it = s.mask_cache.find(d);
  if (it != s.mask_cache.end()) return it->second;
  SoftMask m = mask_at_disparity(s.lf, d, *model_);
  {
    std::lock_guard lock(mu_);
    ++model_calls_;
  }
  s.mask_cache.emplace(d, m);
  return m;
}

ViewImage SessionManager::center(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return center_view(s->lf);
}

SoftMask SessionManager::mask(const std::string& id, double d) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->current = mask_locked(*s, d);
  s->has_current = true;
  s->history.push_back({{"op", "mask"}, {"d", d}});
  return s->current;
}

SoftMask SessionManager::band(const std::string& id, double d1, double d2) {
  if (!(d1 <= d2)) throw ArgumentError("band needs d1 <= d2");
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->current = band_mask(mask_locked(*s, d1), mask_locked(*s, d2));
  s->has_current = true;
  s->history.push_back({{"op", "band"}, {"d1", d1}, {"d2", d2}});
  return s->current;
}

SoftMask SessionManager::apply_edits(const std::string& id, const std::vector<Stroke>& strokes) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  const SoftMask base = s->has_current ? s->current : mask_locked(*s, 0.0);
  s->current = merge_user_edit(base, strokes);
  s->has_current = true;
  s->history.push_back({{"op", "edits"}, {"strokes", json::parse(strokes_to_json(strokes))["strokes"]}});
  return s->current;
}

SoftMask SessionManager::current_mask(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (!s->has_current) {
    s->current = mask_locked(*s, 0.0);
    s->has_current = true;
  }
  return s->current;
}

ViewImage SessionManager::deocc(const std::string& id, MaskChoice choice) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  SoftMask m;
  if (choice == MaskChoice::automatic || !s->has_current) {
    m = mask_locked(*s, 0.0);
  } else {
    m = s->current;
  }
  s->history.push_back({{"op", "deocc"}, {"mask", choice == MaskChoice::current ? "current" : "auto"}});
  return model_->inpaint(s->lf, m);
}

std::string SessionManager::history(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return s->history.dump();
}

void SessionManager::remove(const std::string& id) {
  find(id);
  std::lock_guard lock(mu_);
  sessions_.erase(id);
}

std::size_t SessionManager::expire() {
  std::lock_guard lock(mu_);
  const auto now = opts_.clock();
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > opts_.ttl; });
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::uint64_t SessionManager::model_calls() const {
  std::lock_guard lock(mu_);
  return model_calls_;
}

}  // namespace isty
