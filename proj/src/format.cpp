#include "gibbs/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace gibbs {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    // to_chars ignores the global locale
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

double round_report(double v)
{
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

}  // namespace gibbs
