#include "dhira/timeutil.hpp"

#include <array>
#include <cstdio>

#include "dhira/errors.hpp"

namespace dhira {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yy + (m <= 2);
}

bool is_leap(std::int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> k = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29u : k[m - 1];
}

int parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return -1;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
  const auto fail = [&]() -> std::int64_t {
    throw DataError("bad ISO-8601 timestamp: '" + std::string(text) + "'");
  };

  if (text.size() < 10) return fail();
  const int year = parse_fixed_uint(text, 0, 4);
  const int month = parse_fixed_uint(text, 5, 2);
  const int day = parse_fixed_uint(text, 8, 2);
  if (year < 0 || month < 1 || month > 12 || text[4] != '-' || text[7] != '-') return fail();
  if (day < 1 || day > static_cast<int>(days_in_month(year, month))) return fail();

  int hh = 0, mm = 0, ss = 0;
  std::size_t pos = 10;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return fail();
    hh = parse_fixed_uint(text, pos + 1, 2);
    mm = parse_fixed_uint(text, pos + 4, 2);
    ss = parse_fixed_uint(text, pos + 7, 2);
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60 ||
        pos + 3 >= text.size() || text[pos + 3] != ':' || text[pos + 6] != ':') {
      return fail();
    }
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }

  std::int64_t offset = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const int sign = text[pos] == '+' ? 1 : -1;
      const int oh = parse_fixed_uint(text, pos + 1, 2);
      if (oh < 0 || pos + 3 >= text.size() || text[pos + 3] != ':') return fail();
      const int om = parse_fixed_uint(text, pos + 4, 2);
      if (om < 0) return fail();
      offset = sign * (oh * 3600 + om * 60);
      pos += 6;
    } else {
      return fail();
    }
  }
  if (pos != text.size()) return fail();

  const std::int64_t days = days_from_civil(year, month, day);
  return days * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t sod = epoch_seconds % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60), static_cast<long long>(sod % 60));
  return buf;
}

}  // namespace dhira
