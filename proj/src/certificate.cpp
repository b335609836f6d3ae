#include "xsni/certificate.hpp"

#include <algorithm>

namespace xsni {

SanPattern::SanPattern(std::string_view text) {
  std::string_view rest = text;
  if (rest.rfind("*.", 0) == 0) {
    wildcard_ = true;
    rest.remove_prefix(2);
  }
  if (rest.find('*') != std::string_view::npos) {
    // wildcard anywhere but the entire leftmost label
    throw ParseError("malformed SAN pattern: \"" + std::string(text) + "\"");
  }
  auto canonical = canonicalize_hostname(rest);
  if (!canonical) {
    throw ParseError("malformed SAN pattern: \"" + std::string(text) + "\"");
  }
  text_ = wildcard_ ? "*." + *canonical : *canonical;
}

bool san_matches(const SanPattern& pattern, const Hostname& host) {
  if (!pattern.is_wildcard()) {
    return pattern.text() == host.str();
  }
  std::string_view suffix(pattern.text());
  suffix.remove_prefix(2);
  const std::string& name = host.str();
  // host must be <one label> "." suffix
  if (name.size() <= suffix.size() + 1) {
    return false;
  }
  std::size_t label_len = name.size() - suffix.size() - 1;
  if (name[label_len] != '.') {
    return false;
  }
  std::string_view label(name.data(), label_len);
  if (label.find('.') != std::string_view::npos) {
    return false; // wildcard spans exactly one label
  }
  return std::string_view(name).substr(label_len + 1) == suffix;
}

CertificateDescriptor::CertificateDescriptor(Hostname subject, std::vector<SanPattern> san,
                                             std::string key)
    : subject_sni(std::move(subject)), san_list(std::move(san)), key_id(std::move(key)) {
  if (san_list.empty()) {
    throw ValidationError("certificate for " + subject_sni.str() + " has an empty SAN list");
  }
}

bool CertificateDescriptor::covers(const Hostname& host) const {
  return std::any_of(san_list.begin(), san_list.end(),
                     [&](const SanPattern& p) { return san_matches(p, host); });
}

} // namespace xsni
