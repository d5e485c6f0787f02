#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mignet {

namespace detail {
// ISO 3166-1 alpha-2, officially assigned codes, sorted.
inline constexpr std::array<std::string_view, 249> kIsoAlpha2 = {
    "AD", "AE", "AF", "AG", "AI", "AL", "AM", "AO", "AQ", "AR", "AS", "AT", "AU", "AW", "AX", "AZ", "BA",
    "BB", "BD", "BE", "BF", "BG", "BH", "BI", "BJ", "BL", "BM", "BN", "BO", "BQ", "BR", "BS", "BT", "BV",
    "BW", "BY", "BZ", "CA", "CC", "CD", "CF", "CG", "CH", "CI", "CK", "CL", "CM", "CN", "CO", "CR", "CU",
    "CV", "CW", "CX", "CY", "CZ", "DE", "DJ", "DK", "DM", "DO", "DZ", "EC", "EE", "EG", "EH", "ER", "ES",
    "ET", "FI", "FJ", "FK", "FM", "FO", "FR", "GA", "GB", "GD", "GE", "GF", "GG", "GH", "GI", "GL", "GM",
    "GN", "GP", "GQ", "GR", "GS", "GT", "GU", "GW", "GY", "HK", "HM", "HN", "HR", "HT", "HU", "ID", "IE",
    "IL", "IM", "IN", "IO", "IQ", "IR", "IS", "IT", "JE", "JM", "JO", "JP", "KE", "KG", "KH", "KI", "KM",
    "KN", "KP", "KR", "KW", "KY", "KZ", "LA", "LB", "LC", "LI", "LK", "LR", "LS", "LT", "LU", "LV", "LY",
    "MA", "MC", "MD", "ME", "MF", "MG", "MH", "MK", "ML", "MM", "MN", "MO", "MP", "MQ", "MR", "MS", "MT",
    "MU", "MV", "MW", "MX", "MY", "MZ", "NA", "NC", "NE", "NF", "NG", "NI", "NL", "NO", "NP", "NR", "NU",
    "NZ", "OM", "PA", "PE", "PF", "PG", "PH", "PK", "PL", "PM", "PN", "PR", "PS", "PT", "PW", "PY", "QA",
    "RE", "RO", "RS", "RU", "RW", "SA", "SB", "SC", "SD", "SE", "SG", "SH", "SI", "SJ", "SK", "SL", "SM",
    "SN", "SO", "SR", "SS", "ST", "SV", "SX", "SY", "SZ", "TC", "TD", "TF", "TG", "TH", "TJ", "TK", "TL",
    "TM", "TN", "TO", "TR", "TT", "TV", "TW", "TZ", "UA", "UG", "UM", "US", "UY", "UZ", "VA", "VC", "VE",
    "VG", "VI", "VN", "VU", "WF", "WS", "YE", "YT", "ZA", "ZM", "ZW"};
}  // namespace detail

/// An ISO 3166-1 alpha-2 country code, stored as two upper-case letters.
/// Ordering is lexicographic on the code.
class CountryCode {
 public:
  constexpr CountryCode() = default;

  /// Accepts either case; returns nullopt for anything that is not an
  /// assigned alpha-2 code.
  static std::optional<CountryCode> parse(std::string_view s) {
    if (s.size() != 2) return std::nullopt;
    char a = upper(s[0]), b = upper(s[1]);
    const char buf[2] = {a, b};
    std::string_view code(buf, 2);
    if (!std::binary_search(detail::kIsoAlpha2.begin(), detail::kIsoAlpha2.end(), code)) return std::nullopt;
    return CountryCode(a, b);
  }

  std::string str() const { return std::string{hi_, lo_}; }
  std::uint16_t packed() const { return static_cast<std::uint16_t>((hi_ << 8) | lo_); }

  friend auto operator<=>(const CountryCode&, const CountryCode&) = default;

 private:
  constexpr CountryCode(char a, char b) : hi_(a), lo_(b) {}
  static constexpr char upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }

  char hi_ = 'Z';
  char lo_ = 'Z';
};

using OptCountry = std::optional<CountryCode>;

inline std::string to_string(const OptCountry& c) { return c ? c->str() : std::string(); }

}  // namespace mignet
