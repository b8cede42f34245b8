#include "pqspace/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace pqspace {

namespace {

BigInt pow10(long e) {
    BigInt r = 1;
    for (long i = 0; i < e; ++i) r *= 10;
    return r;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) raise(ErrorKind::parse, "empty numeric literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) raise(ErrorKind::parse, "zero denominator in '" + s + "'");
        return Rational(num, den);
    }

    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }

    std::string digits;
    long scale = 0; // decimal places after the point
    bool seen_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
        } else if (c == '.') {
            if (s.find('.', pos + 1) != std::string::npos)
                raise(ErrorKind::parse, "bad numeric literal '" + s + "'");
            std::size_t start = pos + 1;
            for (std::size_t k = start; k < s.size(); ++k) {
                char d = s[k];
                if (d == 'e' || d == 'E') break;
                if (!std::isdigit(static_cast<unsigned char>(d)))
                    raise(ErrorKind::parse, "bad numeric literal '" + s + "'");
                digits.push_back(d);
                ++scale;
                seen_digit = true;
            }
            pos += scale;
        } else if (c == 'e' || c == 'E') {
            char* end = nullptr;
            long exp = std::strtol(s.c_str() + pos + 1, &end, 10);
            if (end != s.c_str() + s.size())
                raise(ErrorKind::parse, "bad numeric literal '" + s + "'");
            scale -= exp;
            break;
        } else {
            raise(ErrorKind::parse, "bad numeric literal '" + s + "'");
        }
    }
    if (!seen_digit) raise(ErrorKind::parse, "bad numeric literal '" + s + "'");

    BigInt num(digits.empty() ? "0" : digits);
    if (negative) num = -num;
    if (scale >= 0) return Rational(num, pow10(scale));
    return Rational(num * pow10(-scale), 1);
}

std::string format_rational(const Rational& value) {
    const BigInt num = numerator(value);
    const BigInt den = denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

} // namespace pqspace
