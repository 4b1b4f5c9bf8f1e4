#include "scamhunt/decimal.hpp"

#include "scamhunt/errors.hpp"

namespace scamhunt {

namespace {

BigInt pow10(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 0; i < n; ++i) r *= 10;
    return r;
}

}  // namespace

Decimal::Decimal(BigInt mantissa, unsigned scale) : mantissa_(std::move(mantissa)), scale_(scale) {
    normalize();
}

void Decimal::normalize() {
    if (mantissa_ == 0) {
        scale_ = 0;
        return;
    }
    while (scale_ > 0 && mantissa_ % 10 == 0) {
        mantissa_ /= 10;
        --scale_;
    }
}

std::optional<Decimal> Decimal::parse(std::string_view s) {
    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') {
        negative = true;
        ++i;
    }
    BigInt m = 0;
    unsigned scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c >= '0' && c <= '9') {
            m = m * 10 + (c - '0');
            any_digit = true;
            if (seen_point) ++scale;
        } else if (c == '.' && !seen_point && any_digit) {
            seen_point = true;
        } else {
            return std::nullopt;
        }
    }
    if (!any_digit || (seen_point && scale == 0)) return std::nullopt;
    return Decimal(negative ? BigInt(-m) : m, scale);
}

Decimal Decimal::from_string(std::string_view text) {
    auto d = parse(text);
    if (!d) throw PreconditionError("malformed decimal: '" + std::string(text) + "'");
    return *d;
}

Decimal Decimal::from_base_units(const BigInt& units, unsigned decimals) {
    return Decimal(units, decimals);
}

std::optional<Decimal> Decimal::from_base_units(std::string_view units, unsigned decimals) {
    if (units.empty()) return std::nullopt;
    for (char c : units) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    return Decimal(BigInt(std::string(units)), decimals);
}

std::optional<BigInt> Decimal::to_base_units(unsigned decimals) const {
    if (scale_ > decimals) return std::nullopt;
    return mantissa_ * pow10(decimals - scale_);
}

Decimal Decimal::shifted(int exp10) const {
    if (exp10 >= 0) {
        const auto e = static_cast<unsigned>(exp10);
        if (e <= scale_) return Decimal(mantissa_, scale_ - e);
        return Decimal(mantissa_ * pow10(e - scale_), 0);
    }
    return Decimal(mantissa_, scale_ + static_cast<unsigned>(-exp10));
}

Decimal Decimal::rounded(unsigned places) const {
    if (scale_ <= places) return *this;
    const BigInt divisor = pow10(scale_ - places);
    BigInt q = mantissa_ / divisor;  // truncates toward zero
    BigInt r = mantissa_ % divisor;
    if (r < 0) r = -r;
    if (r * 2 >= divisor) q += (mantissa_ < 0 ? -1 : 1);
    return Decimal(q, places);
}

std::string Decimal::to_string() const {
    BigInt abs = mantissa_ < 0 ? BigInt(-mantissa_) : mantissa_;
    std::string digits = abs.str();
    if (scale_ > 0) {
        if (digits.size() <= scale_) digits.insert(0, scale_ - digits.size() + 1, '0');
        digits.insert(digits.size() - scale_, 1, '.');
    }
    return mantissa_ < 0 ? "-" + digits : digits;
}

std::string Decimal::to_fixed(unsigned places) const {
    const Decimal r = rounded(places);
    std::string s = r.to_string();
    if (places == 0) return s;
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += '.';
        dot = s.size() - 1;
    }
    const std::size_t have = s.size() - dot - 1;
    s.append(places - have, '0');
    return s;
}

Decimal& Decimal::operator+=(const Decimal& o) {
    if (scale_ >= o.scale_) {
        mantissa_ += o.mantissa_ * pow10(scale_ - o.scale_);
    } else {
        mantissa_ = mantissa_ * pow10(o.scale_ - scale_) + o.mantissa_;
        scale_ = o.scale_;
    }
    normalize();
    return *this;
}

Decimal& Decimal::operator-=(const Decimal& o) { return *this += -o; }

Decimal Decimal::operator-() const { return Decimal(BigInt(-mantissa_), scale_); }

Decimal operator*(const Decimal& a, const Decimal& b) {
    return Decimal(a.mantissa_ * b.mantissa_, a.scale_ + b.scale_);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    const unsigned s = std::max(a.scale_, b.scale_);
    const BigInt lhs = a.mantissa_ * pow10(s - a.scale_);
    const BigInt rhs = b.mantissa_ * pow10(s - b.scale_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace scamhunt
