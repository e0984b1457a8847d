#include "ontoq/property.hpp"

#include <charconv>
#include <cmath>
#include <ctime>

namespace ontoq {

bool is_storable(const PropertyValue& value) {
  if (const auto* d = std::get_if<double>(&value)) return std::isfinite(*d);
  if (const auto* t = std::get_if<Timestamp>(&value)) return t->seconds >= 0;
  return true;
}

std::optional<int> compare_values(const PropertyValue& a, const PropertyValue& b) {
  if (a.index() != b.index()) return std::nullopt;
  auto sign = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
  switch (a.index()) {
    case 0: return sign(std::get<std::string>(a), std::get<std::string>(b));
    case 1: return sign(std::get<double>(a), std::get<double>(b));
    case 2: return sign(std::get<bool>(a), std::get<bool>(b));
    default: return sign(std::get<Timestamp>(a).seconds, std::get<Timestamp>(b).seconds);
  }
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_iso8601(Timestamp ts) {
  std::time_t t = static_cast<std::time_t>(ts.seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_display(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return format_iso8601(v);
        }
      },
      value);
}

}  // namespace ontoq
