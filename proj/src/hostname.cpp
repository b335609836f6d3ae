#include "xsni/hostname.hpp"

#include <cctype>
#include <ostream>

namespace xsni {

namespace {

constexpr std::size_t kMaxNameLength = 253;
constexpr std::size_t kMaxLabelLength = 63;

bool label_char_ok(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

} // namespace

std::optional<std::string> canonicalize_hostname(std::string_view name) {
  if (name.empty() || name.size() > kMaxNameLength) {
    return std::nullopt;
  }
  std::string lower;
  lower.reserve(name.size());
  for (char c : name) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (uc >= 0x80) {
      return std::nullopt; // ASCII only
    }
    lower.push_back(static_cast<char>(std::tolower(uc)));
  }
  if (lower.front() == '.' || lower.back() == '.') {
    return std::nullopt;
  }
  std::size_t label_len = 0;
  for (char c : lower) {
    if (c == '.') {
      if (label_len == 0) {
        return std::nullopt; // empty label
      }
      label_len = 0;
      continue;
    }
    if (!label_char_ok(c)) {
      return std::nullopt;
    }
    if (++label_len > kMaxLabelLength) {
      return std::nullopt;
    }
  }
  return lower;
}

Hostname::Hostname(std::string_view name) {
  auto canonical = canonicalize_hostname(name);
  if (!canonical) {
    throw ParseError("invalid hostname: \"" + std::string(name) + "\"");
  }
  name_ = std::move(*canonical);
}

std::optional<Hostname> Hostname::try_parse(std::string_view name) {
  auto canonical = canonicalize_hostname(name);
  if (!canonical) {
    return std::nullopt;
  }
  Hostname h;
  h.name_ = std::move(*canonical);
  return h;
}

std::size_t Hostname::label_count() const {
  std::size_t count = 1;
  for (char c : name_) {
    if (c == '.') {
      ++count;
    }
  }
  return count;
}

std::vector<std::string_view> Hostname::labels() const {
  std::vector<std::string_view> out;
  std::string_view rest = name_;
  while (true) {
    auto dot = rest.find('.');
    if (dot == std::string_view::npos) {
      out.push_back(rest);
      break;
    }
    out.push_back(rest.substr(0, dot));
    rest.remove_prefix(dot + 1);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Hostname& h) {
  return os << h.str();
}

} // namespace xsni
