#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xsni/hostname.hpp"

namespace xsni {

// One entry of a certificate's SAN list: either an exact hostname or a
// single-label wildcard such as *.example.com. The wildcard is only legal
// as the entire leftmost label.
class SanPattern {
public:
  explicit SanPattern(std::string_view text);

  bool is_wildcard() const { return wildcard_; }
  const std::string& text() const { return text_; }

  auto operator<=>(const SanPattern&) const = default;

private:
  std::string text_;   // canonical lowercase, includes "*." prefix if wildcard
  bool wildcard_ = false;
};

// True iff the pattern authenticates the host: exact equality, or a
// wildcard covering exactly one extra label. "*.example.com" matches
// "static.example.com" but neither "a.b.example.com" nor "example.com".
bool san_matches(const SanPattern& pattern, const Hostname& host);

// Structural stand-in for an X.509 leaf certificate: the subject it was
// served for, the SAN list it authenticates, and an opaque key identifier.
struct CertificateDescriptor {
  Hostname subject_sni;
  std::vector<SanPattern> san_list; // non-empty
  std::string key_id;

  CertificateDescriptor(Hostname subject, std::vector<SanPattern> san, std::string key);

  bool covers(const Hostname& host) const;

  auto operator<=>(const CertificateDescriptor&) const = default;
};

} // namespace xsni
