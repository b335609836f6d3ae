#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xsni/errors.hpp"

namespace xsni {

// A canonicalized DNS hostname: lowercase ASCII, dot-separated labels.
// Canonical form is enforced at construction, so comparisons are plain
// string comparisons.
class Hostname {
public:
  Hostname() = default; // empty placeholder, not a valid name
  explicit Hostname(std::string_view name);

  // Non-throwing variant for untrusted byte streams (wire decode paths).
  static std::optional<Hostname> try_parse(std::string_view name);

  const std::string& str() const { return name_; }
  bool empty() const { return name_.empty(); }
  std::size_t label_count() const;
  std::vector<std::string_view> labels() const;

  auto operator<=>(const Hostname&) const = default;

private:
  std::string name_;
};

// Validation shared with SAN-pattern parsing. Returns the lowercase
// canonical form or nullopt if the name is not a legal hostname.
std::optional<std::string> canonicalize_hostname(std::string_view name);

std::ostream& operator<<(std::ostream& os, const Hostname& h);

} // namespace xsni
