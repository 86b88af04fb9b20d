#include "isty/rng.hpp"

#include <sstream>

#include "isty/error.hpp"

namespace isty {

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
  if (!is) throw FormatError("invalid RNG state");
}

}  // namespace isty
