#ifndef SCAFFOLD_EXTINT_HPP
#define SCAFFOLD_EXTINT_HPP

#include <limits>
#include <ostream>
#include <string>

namespace scaffold {

/// Integer extended by +infinity. Used for valuations (v(0) = infinity) and
/// for tolerances in residue characteristic p.
class ExtInt {
public:
    ExtInt() : finite_(true), v_(0) {}
    ExtInt(long long v) : finite_(true), v_(v) {} // implicit: valuations are ints

    static ExtInt infinity() {
        ExtInt e;
        e.finite_ = false;
        return e;
    }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    long long value() const { return v_; } // only meaningful when finite

    friend bool operator==(const ExtInt& a, const ExtInt& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.v_ == b.v_;
    }
    friend bool operator!=(const ExtInt& a, const ExtInt& b) { return !(a == b); }
    friend bool operator<(const ExtInt& a, const ExtInt& b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(const ExtInt& a, const ExtInt& b) { return a < b || a == b; }
    friend bool operator>(const ExtInt& a, const ExtInt& b) { return b < a; }
    friend bool operator>=(const ExtInt& a, const ExtInt& b) { return b <= a; }

    friend ExtInt operator+(const ExtInt& a, const ExtInt& b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return ExtInt(a.v_ + b.v_);
    }

    std::string str() const { return finite_ ? std::to_string(v_) : "inf"; }

    friend std::ostream& operator<<(std::ostream& os, const ExtInt& e) {
        return os << e.str();
    }

private:
    bool finite_;
    long long v_;
};

} // namespace scaffold

#endif
