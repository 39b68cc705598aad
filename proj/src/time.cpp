#include "probagen/time.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace probagen {

namespace {

using namespace std::chrono;

constexpr std::int64_t kMillisPerDay = 86'400'000;

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void skip_spaces() {
    while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  // Exactly `width` digits, or 1..width when `exact` is false.
  std::optional<int> digits(int width, bool exact = true) {
    int value = 0;
    int n = 0;
    while (n < width && !done() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      value = value * 10 + (s_[pos_] - '0');
      ++pos_;
      ++n;
    }
    if (n == 0 || (exact && n != width)) return std::nullopt;
    return value;
  }

  // Digits after a decimal point, converted to milliseconds (truncating).
  int fraction_millis() {
    int ms = 0;
    int n = 0;
    while (!done() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      if (n < 3) ms = ms * 10 + (s_[pos_] - '0');
      ++pos_;
      ++n;
    }
    for (; n < 3; ++n) ms *= 10;
    return ms;
  }

  std::optional<std::int64_t> signed_integer() {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  // Z | +HH:MM | +HHMM | +HH ; returns offset in minutes east of UTC.
  std::optional<int> utc_offset() {
    if (accept('Z') || accept('z')) return 0;
    int sign = 0;
    if (accept('+')) sign = 1;
    else if (accept('-')) sign = -1;
    else return std::nullopt;
    auto hh = digits(2);
    if (!hh) return std::nullopt;
    int mm = 0;
    if (accept(':')) {
      auto m = digits(2);
      if (!m) return std::nullopt;
      mm = *m;
    } else if (peek() >= '0' && peek() <= '9') {
      auto m = digits(2);
      if (!m) return std::nullopt;
      mm = *m;
    }
    return sign * (*hh * 60 + mm);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

struct Fields {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millis = 0;
  int offset_minutes = 0;
  std::optional<std::int64_t> epoch_seconds;
};

std::optional<Timestamp> assemble(const Fields& f) {
  if (f.epoch_seconds) return Timestamp{Millis{*f.epoch_seconds * 1000 + f.millis}};
  year_month_day ymd{year{f.year}, month{static_cast<unsigned>(f.month)},
                     day{static_cast<unsigned>(f.day)}};
  if (!ymd.ok() || f.hour > 23 || f.minute > 59 || f.second > 60) return std::nullopt;
  const auto date = sys_days{ymd};
  const auto local = time_point_cast<Millis>(date) + hours{f.hour} + minutes{f.minute} +
                     seconds{f.second} + Millis{f.millis};
  return local - minutes{f.offset_minutes};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// %T -> %H:%M:%S, %F -> %Y-%m-%d
std::string expand_shorthands(std::string_view format) {
  std::string out;
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] == '%' && i + 1 < format.size()) {
      const char d = format[i + 1];
      if (d == 'T') { out += "%H:%M:%S"; ++i; continue; }
      if (d == 'F') { out += "%Y-%m-%d"; ++i; continue; }
      out.push_back('%');
      out.push_back(d);
      ++i;
      continue;
    }
    out.push_back(format[i]);
  }
  return out;
}

}  // namespace

Millis from_seconds(double seconds) {
  return Millis{static_cast<std::int64_t>(std::llround(seconds * 1000.0))};
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  Cursor c(text);
  c.skip_spaces();
  Fields f;
  auto y = c.digits(4);
  if (!y || !c.accept('-')) return std::nullopt;
  auto mo = c.digits(2);
  if (!mo || !c.accept('-')) return std::nullopt;
  auto d = c.digits(2);
  if (!d) return std::nullopt;
  f.year = *y;
  f.month = *mo;
  f.day = *d;
  if (c.accept('T') || c.accept('t') || c.accept(' ')) {
    auto h = c.digits(2);
    if (!h || !c.accept(':')) return std::nullopt;
    auto mi = c.digits(2);
    if (!mi) return std::nullopt;
    f.hour = *h;
    f.minute = *mi;
    if (c.accept(':')) {
      auto s = c.digits(2);
      if (!s) return std::nullopt;
      f.second = *s;
      if (c.accept('.') || c.accept(',')) f.millis = c.fraction_millis();
    }
    c.skip_spaces();
    if (!c.done()) {
      auto off = c.utc_offset();
      if (!off) return std::nullopt;
      f.offset_minutes = *off;
    }
  }
  c.skip_spaces();
  if (!c.done()) return std::nullopt;
  return assemble(f);
}

std::string format_iso8601(Timestamp t) { return format_timestamp(t, "%Y-%m-%dT%H:%M:%S.%f+00:00"); }

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view raw_format) {
  if (raw_format == "ISO8601" || raw_format.empty()) return parse_iso8601(text);
  const std::string format = expand_shorthands(raw_format);
  Cursor c(text);
  Fields f;
  for (std::size_t i = 0; i < format.size(); ++i) {
    const char fc = format[i];
    if (fc == ' ') {
      c.skip_spaces();
      continue;
    }
    if (fc != '%' || i + 1 == format.size()) {
      if (!c.accept(fc)) return std::nullopt;
      continue;
    }
    const char directive = format[++i];
    std::optional<int> v;
    switch (directive) {
      case 'Y': v = c.digits(4); if (v) f.year = *v; break;
      case 'm': v = c.digits(2, false); if (v) f.month = *v; break;
      case 'd': v = c.digits(2, false); if (v) f.day = *v; break;
      case 'H': v = c.digits(2, false); if (v) f.hour = *v; break;
      case 'M': v = c.digits(2, false); if (v) f.minute = *v; break;
      case 'S':
        v = c.digits(2, false);
        if (v) {
          f.second = *v;
          if (c.peek() == '.' && (i + 1 >= format.size() || format[i + 1] != '.')) {
            c.accept('.');
            f.millis = c.fraction_millis();
          }
        }
        break;
      case 'f': f.millis = c.fraction_millis(); v = 0; break;
      case 'z': v = c.utc_offset(); if (v) f.offset_minutes = *v; break;
      case 's': {
        auto s = c.signed_integer();
        if (!s) return std::nullopt;
        f.epoch_seconds = *s;
        if (c.peek() == '.') {
          c.accept('.');
          f.millis = c.fraction_millis();
        }
        v = 0;
        break;
      }
      case '%': v = c.accept('%') ? std::optional<int>{0} : std::nullopt; break;
      default: return std::nullopt;
    }
    if (!v) return std::nullopt;
  }
  c.skip_spaces();
  if (!c.done()) return std::nullopt;
  return assemble(f);
}

std::string format_timestamp(Timestamp t, std::string_view raw_format) {
  if (raw_format == "ISO8601" || raw_format.empty()) return format_iso8601(t);
  const std::string format = expand_shorthands(raw_format);
  const std::int64_t ms_total = t.time_since_epoch().count();
  const std::int64_t day_count = floor_div(ms_total, kMillisPerDay);
  const std::int64_t ms_of_day = ms_total - day_count * kMillisPerDay;
  const year_month_day ymd{sys_days{days{day_count}}};
  const int hh = static_cast<int>(ms_of_day / kMillisPerHour);
  const int mi = static_cast<int>((ms_of_day / 60'000) % 60);
  const int ss = static_cast<int>((ms_of_day / 1000) % 60);
  const int ms = static_cast<int>(ms_of_day % 1000);

  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] != '%' || i + 1 == format.size()) {
      out.push_back(format[i]);
      continue;
    }
    switch (format[++i]) {
      case 'Y': std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year())); break;
      case 'm': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.month())); break;
      case 'd': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.day())); break;
      case 'H': std::snprintf(buf, sizeof buf, "%02d", hh); break;
      case 'M': std::snprintf(buf, sizeof buf, "%02d", mi); break;
      case 'S': std::snprintf(buf, sizeof buf, "%02d", ss); break;
      case 'f': std::snprintf(buf, sizeof buf, "%03d", ms); break;
      case 'z': std::snprintf(buf, sizeof buf, "+0000"); break;
      case 's': std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(floor_div(ms_total, 1000))); break;
      case '%': std::snprintf(buf, sizeof buf, "%%"); break;
      default: buf[0] = '\0'; break;
    }
    out += buf;
  }
  return out;
}

unsigned weekday_index(Timestamp t) {
  const auto d = floor<days>(t);
  return weekday{d}.iso_encoding() - 1;
}

double hour_of_day(Timestamp t) {
  const std::int64_t ms_total = t.time_since_epoch().count();
  const std::int64_t ms_of_day = ms_total - floor_div(ms_total, kMillisPerDay) * kMillisPerDay;
  return static_cast<double>(ms_of_day) / kMillisPerHour;
}

std::int64_t week_index(Timestamp t) {
  // 1970-01-01 was a Thursday; shifting by 3 days aligns boundaries to Mondays.
  const std::int64_t day_count = floor_div(t.time_since_epoch().count(), kMillisPerDay);
  return floor_div(day_count + 3, 7);
}

}  // namespace probagen
