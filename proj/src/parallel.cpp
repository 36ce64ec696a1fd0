#include "maxent/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace maxent {

std::size_t default_workers() {
  if (const char* env = std::getenv("MAXENT_WORKERS")) {
    std::string_view s(env);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace maxent
