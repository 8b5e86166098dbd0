#include <charconv>
#include <cstdio>

#include "pollcast/vote.hpp"

namespace pollcast {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return true;
}

}  // namespace

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss<milliseconds> tod{ts - day};
    char buf[40];
    const auto ms = tod.subseconds().count();
    if (ms == 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long long>(tod.seconds().count()));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long long>(tod.seconds().count()), static_cast<long long>(ms));
    }
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-' || !read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) ||
        !read_int(s, 8, 2, d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    Timestamp ts{sys_days{ymd}};
    if (s.size() == 10) return ts;

    int hh = 0, mm = 0, ss = 0;
    if (s[10] != 'T' || !read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !read_int(s, 14, 2, mm))
        return std::nullopt;
    std::size_t pos = 16;
    long long millis = 0;
    if (pos < s.size() && s[pos] == ':') {
        if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            int digits = 0;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                if (digits < 3) millis = millis * 10 + (s[pos] - '0');
                ++digits;
                ++pos;
            }
            if (digits == 0) return std::nullopt;
            for (int k = digits; k < 3; ++k) millis *= 10;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    ts += hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};

    if (pos == s.size()) return std::nullopt;  // zone designator is required
    if (s[pos] == 'Z' && pos + 1 == s.size()) return ts;
    int oh = 0, om = 0;
    if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && read_int(s, pos + 1, 2, oh) &&
        s[pos + 3] == ':' && read_int(s, pos + 4, 2, om) && oh < 24 && om < 60) {
        const auto offset = hours{oh} + minutes{om};
        return s[pos] == '+' ? ts - offset : ts + offset;
    }
    return std::nullopt;
}

}  // namespace pollcast
