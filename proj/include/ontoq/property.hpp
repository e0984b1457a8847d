#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace ontoq {

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Scalar property value. Alternatives are ordered text, number, boolean,
/// timestamp; that order is also the cross-type sort order.
using PropertyValue = std::variant<std::string, double, bool, Timestamp>;

using PropertyMap = std::map<std::string, PropertyValue>;

/// True when the value satisfies the storage invariants (finite numbers,
/// non-negative timestamps).
bool is_storable(const PropertyValue& value);

/// Ordering of two values of the same alternative. Returns nullopt when the
/// alternatives differ; callers treat that as an unknown comparison.
std::optional<int> compare_values(const PropertyValue& a, const PropertyValue& b);

/// Display form used by tables and summaries: text verbatim, numbers in
/// shortest round-trip form, timestamps as ISO-8601 UTC.
std::string to_display(const PropertyValue& value);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

std::string format_iso8601(Timestamp ts);

}  // namespace ontoq
