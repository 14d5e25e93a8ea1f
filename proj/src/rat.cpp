#include "pwlnet/rat.hpp"

#include <cctype>
#include <stdexcept>

namespace pwlnet {

Rat rat(long num, long den) {
    if (den == 0) throw std::domain_error("rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat rat(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

namespace {

bool valid_integer_token(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace

Rat rat_parse(std::string_view s) {
    auto slash = s.find('/');
    std::string_view num = s.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!valid_integer_token(num) || !valid_integer_token(den))
        throw std::invalid_argument("rat_parse: malformed rational '" + std::string(s) + "'");
    Int n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0)
        throw std::invalid_argument("rat_parse: zero denominator in '" + std::string(s) + "'");
    return rat(n, d);
}

std::string rat_str(const Rat& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double rat_double(const Rat& r) { return r.get_d(); }

} // namespace pwlnet
