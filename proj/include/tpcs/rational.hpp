#pragma once

#include "tpcs/errors.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

namespace tpcs {

/// Exact rational number with 64-bit numerator and denominator, always kept
/// in lowest terms with a positive denominator. All arithmetic is checked;
/// results that do not fit in 64 bits raise ModelError instead of wrapping.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }
    bool is_zero() const { return num_ == 0; }

    Rational operator-() const { return Rational(checked_negate(num_), den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(w(a.num_) * b.den_ + w(b.num_) * a.den_, w(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_i128(w(a.num_) * b.den_ - w(b.num_) * a.den_, w(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(w(a.num_) * b.num_, w(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ModelError("rational division by zero");
        return from_i128(w(a.num_) * b.den_, w(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return w(a.num_) * b.den_ < w(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return w(a.num_) * b.den_ <= w(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "7/3" for proper fractions, "4" for integers.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "3", "-3", "3/4" and decimal forms like "0.25".
    static std::optional<Rational> parse(std::string_view text);

private:
    using i128 = __int128;

    static i128 w(std::int64_t v) { return static_cast<i128>(v); }

    static std::int64_t checked_negate(std::int64_t v) {
        if (v == INT64_MIN) throw ModelError("rational overflow: negate");
        return -v;
    }

    static std::int64_t narrow(i128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw ModelError("rational overflow: 64-bit bound exceeded");
        return static_cast<std::int64_t>(v);
    }

    static Rational from_i128(i128 num, i128 den) {
        if (den == 0) throw ModelError("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i128 g = gcd128(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        Rational r;
        r.num_ = narrow(num);
        r.den_ = narrow(den);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() { *this = from_i128(w(num_), w(den_)); }

    std::int64_t num_;
    std::int64_t den_;
};

inline std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    auto parse_i64 = [](std::string_view s, std::int64_t& out) -> bool {
        if (s.empty()) return false;
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '-' || s[0] == '+') { neg = (s[0] == '-'); i = 1; }
        if (i == s.size()) return false;
        i128 acc = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
            acc = acc * 10 + (s[i] - '0');
            if (acc > static_cast<i128>(INT64_MAX) + 1) return false;
        }
        if (neg) acc = -acc;
        if (acc > INT64_MAX || acc < INT64_MIN) return false;
        out = static_cast<std::int64_t>(acc);
        return true;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0;
        std::int64_t d = 0;
        if (!parse_i64(text.substr(0, slash), n) || !parse_i64(text.substr(slash + 1), d) || d == 0)
            return std::nullopt;
        return Rational(n, d);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view ip = text.substr(0, dot);
        std::string_view fp = text.substr(dot + 1);
        if (fp.empty() || fp.size() > 18) return std::nullopt;
        std::int64_t whole = 0;
        if (!ip.empty() && ip != "-" && ip != "+") {
            if (!parse_i64(ip, whole)) return std::nullopt;
        }
        std::int64_t frac = 0;
        if (!parse_i64(fp, frac) || frac < 0) return std::nullopt;
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        bool neg = !ip.empty() && ip[0] == '-';
        Rational r = Rational(whole < 0 ? -whole : whole, 1) + Rational(frac, scale);
        return neg ? -r : r;
    }
    std::int64_t n = 0;
    if (!parse_i64(text, n)) return std::nullopt;
    return Rational(n);
}

} // namespace tpcs
