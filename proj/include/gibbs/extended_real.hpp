#pragma once

#include <cmath>
#include <string>

namespace gibbs {

/// A real number or one of the two infinities. Endpoint logic branches on
/// finiteness, so infinities are tagged explicitly rather than encoded as
/// IEEE inf.
class ExtendedReal {
public:
    enum class Kind { Finite, PlusInfinity, MinusInfinity };

    constexpr ExtendedReal() = default;

    static constexpr ExtendedReal finite(double v) { return ExtendedReal(Kind::Finite, v); }
    static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity, 0.0); }
    static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::MinusInfinity, 0.0); }

    /// Classifies an IEEE value: +-inf map to the tagged infinities.
    static ExtendedReal from_double(double v)
    {
        if (std::isinf(v)) return v > 0 ? plus_infinity() : minus_infinity();
        return finite(v);
    }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_plus_infinity() const { return kind_ == Kind::PlusInfinity; }
    constexpr bool is_minus_infinity() const { return kind_ == Kind::MinusInfinity; }

    /// Finite value; only meaningful when is_finite().
    constexpr double value() const { return value_; }

    /// IEEE view, for arithmetic that is valid with infinities.
    double to_double() const
    {
        switch (kind_) {
        case Kind::PlusInfinity: return HUGE_VAL;
        case Kind::MinusInfinity: return -HUGE_VAL;
        default: return value_;
        }
    }

    std::string to_string() const;

    friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

private:
    constexpr ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}

    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

}  // namespace gibbs
