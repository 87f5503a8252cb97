#include "coclique/rational.hpp"

#include <cctype>
#include <numeric>

#include "coclique/error.hpp"

namespace coclique {

Rational Rational::of(int64_t num, int64_t den) {
    if (den <= 0 || num < 0) throw Error("rational: expected num >= 0 and den > 0");
    const int64_t g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

namespace {

std::optional<int64_t> parse_digits(std::string_view s) {
    if (s.empty() || s.size() > 18) return std::nullopt;
    int64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace

std::optional<Rational> Rational::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto n = parse_digits(text.substr(0, slash));
        auto d = parse_digits(text.substr(slash + 1));
        if (!n || !d || *d == 0) return std::nullopt;
        return Rational::of(*n, *d);
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        auto n = parse_digits(text);
        if (!n) return std::nullopt;
        return Rational::of(*n, 1);
    }
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) return std::nullopt;
    int64_t int_val = 0;
    if (!int_part.empty()) {
        auto n = parse_digits(int_part);
        if (!n) return std::nullopt;
        int_val = *n;
    }
    int64_t frac_val = 0;
    int64_t scale = 1;
    if (!frac_part.empty()) {
        auto f = parse_digits(frac_part);
        if (!f) return std::nullopt;
        frac_val = *f;
        for (size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    }
    return Rational::of(int_val * scale + frac_val, scale);
}

std::string Rational::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

int compare(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

} // namespace coclique
