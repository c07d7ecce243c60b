#ifndef SCAFFOLD_DIGITS_HPP
#define SCAFFOLD_DIGITS_HPP

#include <vector>

#include "scaffold/errors.hpp"

namespace scaffold {

/// Base-p digit of a at position s (the coefficient of p^s).
inline long long digit(long long a, int s, long long p) {
    for (int i = 0; i < s; ++i) a /= p;
    return a % p;
}

inline long long mod_pos(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

inline long long inv_mod(long long a, long long m) {
    // extended Euclid; gcd(a, m) must be 1
    long long r0 = m, r1 = mod_pos(a, m), s0 = 0, s1 = 1;
    while (r1 != 0) {
        long long q = r0 / r1;
        long long r2 = r0 - q * r1;
        long long s2 = s0 - q * s1;
        r0 = r1; r1 = r2; s0 = s1; s1 = s2;
    }
    if (r0 != 1) throw Error("element not invertible in Z/" + std::to_string(m));
    return mod_pos(s0, m);
}

/// The digit bookkeeping attached to shift parameters b_1 <= ... <= b_n, all
/// prime to p and congruent to a common residue b modulo p^n:
///   bfrak(a) = sum_i a_(n-i) p^(n-i) b_i,
///   afrak(t) = the unique a in [0, p^n) with a = -b^{-1} t  mod p^n,
///   t = -bfrak(afrak(t)) + p^n f(t).
class DigitMaps {
public:
    DigitMaps(long long p, int n, std::vector<long long> breaks)
        : p_(p), n_(n), b_(std::move(breaks)) {
        pn_ = 1;
        for (int i = 0; i < n_; ++i) pn_ *= p_;
        if (static_cast<int>(b_.size()) != n_)
            throw AssumptionViolation("break count does not match n");
        for (int i = 0; i < n_; ++i) {
            if (b_[i] % p_ == 0)
                throw AssumptionViolation("p divides b_" + std::to_string(i + 1));
            if (mod_pos(b_[i], pn_) != mod_pos(b_[0], pn_))
                throw AssumptionViolation(
                    "breaks do not share one residue class modulo p^n");
        }
        residue_ = mod_pos(b_[0], pn_);
        neg_binv_ = mod_pos(-inv_mod(residue_, pn_), pn_);
    }

    long long p() const { return p_; }
    int n() const { return n_; }
    long long pn() const { return pn_; }
    long long residue() const { return residue_; }
    const std::vector<long long>& breaks() const { return b_; }

    /// bfrak of a digit vector given as an integer a in [0, p^n).
    long long bfrak(long long a) const {
        long long s = 0, pw = pn_ / p_; // p^(n-1) down to p^0
        for (int i = 1; i <= n_; ++i) {
            s += digit(a, n_ - i, p_) * pw * b_[i - 1];
            pw /= p_;
        }
        return s;
    }

    long long afrak(long long t) const {
        return mod_pos(neg_binv_ * mod_pos(t, pn_), pn_);
    }

    long long f(long long t) const {
        long long num = t + bfrak(afrak(t));
        return num / pn_; // exactly divisible by construction
    }

private:
    long long p_;
    int n_;
    std::vector<long long> b_;
    long long pn_;
    long long residue_;
    long long neg_binv_;
};

} // namespace scaffold

#endif
