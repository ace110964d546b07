#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcm {

// Extended real value in (-inf, +inf].  +infinity is carried as the IEEE
// infinity of the underlying double; NaN and -infinity are never stored.
class ExtReal {
public:
    ExtReal() : v_(0.0) {}
    explicit ExtReal(double v) : v_(v) {
        if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN");
        if (v == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("ExtReal: -inf not representable");
    }

    static ExtReal infinity() {
        ExtReal r;
        r.v_ = std::numeric_limits<double>::infinity();
        return r;
    }

    bool is_finite() const { return std::isfinite(v_); }
    bool is_infinite() const { return std::isinf(v_); }

    // Finite value; throws when called on +inf.
    double value() const {
        if (!is_finite()) throw std::domain_error("ExtReal: value() on +inf");
        return v_;
    }
    // Raw double, +inf allowed.  Safe for comparisons and min/max.
    double raw() const { return v_; }

    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

    // Extended-real sum: +inf absorbs.
    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (!a.is_finite() || !b.is_finite()) return infinity();
        return ExtReal(a.v_ + b.v_);
    }

private:
    double v_;
};

inline double exp_neg(ExtReal phi) {
    // e^{-phi} with e^{-inf} = 0.
    return phi.is_finite() ? std::exp(-phi.value()) : 0.0;
}

} // namespace dcm
