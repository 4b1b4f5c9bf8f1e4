#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace scamhunt {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision base-10 decimal: value = mantissa * 10^-scale.
///
/// Addition, subtraction and multiplication are exact. The representation is
/// kept normalized (no trailing zero digits in the fraction) so equal values
/// compare and print identically.
class Decimal {
public:
    Decimal() = default;
    Decimal(long long v) : mantissa_(v) {}  // NOLINT(google-explicit-constructor)

    /// Accepts "[-]digits[.digits]". No exponent, no leading '+', no spaces.
    static std::optional<Decimal> parse(std::string_view text);
    /// Throws PreconditionError on malformed input.
    static Decimal from_string(std::string_view text);

    /// `units` base units of a coin with `decimals` fractional digits
    /// (e.g. wei with decimals = 18).
    static Decimal from_base_units(const BigInt& units, unsigned decimals);
    static std::optional<Decimal> from_base_units(std::string_view units, unsigned decimals);
    /// Exact inverse of from_base_units; nullopt when the value has more
    /// fractional digits than the unit can represent.
    std::optional<BigInt> to_base_units(unsigned decimals) const;

    /// Multiplies by 10^exp10 (exp10 may be negative). Exact.
    Decimal shifted(int exp10) const;

    /// Rounds half away from zero to `places` fractional digits.
    Decimal rounded(unsigned places) const;

    /// Canonical text: minimal digits, no exponent ("130", "0.5", "-2.25").
    std::string to_string() const;
    /// Rounded to exactly `places` fractional digits ("156000.00").
    std::string to_fixed(unsigned places) const;

    bool is_zero() const { return mantissa_ == 0; }
    int sign() const { return mantissa_.sign(); }
    unsigned scale() const noexcept { return scale_; }
    const BigInt& mantissa() const noexcept { return mantissa_; }

    Decimal& operator+=(const Decimal& o);
    Decimal& operator-=(const Decimal& o);
    friend Decimal operator+(Decimal a, const Decimal& b) { return a += b; }
    friend Decimal operator-(Decimal a, const Decimal& b) { return a -= b; }
    friend Decimal operator*(const Decimal& a, const Decimal& b);
    Decimal operator-() const;

    friend bool operator==(const Decimal& a, const Decimal& b) {
        return a.scale_ == b.scale_ && a.mantissa_ == b.mantissa_;
    }
    friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

private:
    Decimal(BigInt mantissa, unsigned scale);
    void normalize();

    BigInt mantissa_{0};
    unsigned scale_{0};
};

}  // namespace scamhunt
