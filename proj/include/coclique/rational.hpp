#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coclique {

// Exact non-negative rational, always reduced, denominator > 0.
// Density thresholds like 0.90 sit exactly on achievable densities
// (9/10), so comparisons must never go through floating point.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    static Rational of(int64_t num, int64_t den);

    // Accepts "0.9", "0.90", "9/10", "1", "1.0". Rejects anything
    // negative, malformed, or too long to hold exactly in 64 bits.
    static std::optional<Rational> parse(std::string_view text);

    std::string str() const; // canonical "num/den"

    double approx() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
};

// Sign of a - b via 128-bit cross multiplication.
int compare(const Rational& a, const Rational& b);

inline bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
inline bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
inline bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
inline bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

} // namespace coclique
