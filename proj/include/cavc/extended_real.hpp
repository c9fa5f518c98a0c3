#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace cavc {

// Nonnegative extended real: a finite double or a distinguished +infinity.
// Only ordering, min and max are defined; the infinite marker can never leak
// into float arithmetic.
class ExtendedReal {
  public:
    ExtendedReal() = default;
    ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit by design

    static ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }

    double value() const {
        if (infinite_) throw std::logic_error("ExtendedReal: value() on infinity");
        return value_;
    }

    // Finite value or fallback (for report columns, never for arithmetic).
    double value_or(double fallback) const { return infinite_ ? fallback : value_; }

    std::string to_string() const {
        if (infinite_) return "inf";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.6g", value_);
        return buf;
    }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ && b.infinite_;
        return a.value_ == b.value_;
    }
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return a < b || a == b; }
    friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
    friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return b <= a; }

    friend ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? a : b; }
    friend ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? b : a; }

  private:
    double value_ = 0.0;
    bool infinite_ = false;
};

}  // namespace cavc
