#ifndef SCAFFOLD_SERIES_HPP
#define SCAFFOLD_SERIES_HPP

#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "scaffold/errors.hpp"
#include "scaffold/extint.hpp"
#include "scaffold/residue_field.hpp"

namespace scaffold {

/// Sentinel precision for exactly known (finitely supported) series.
constexpr long long kPrecInf = std::numeric_limits<long long>::max() / 4;

inline long long prec_add(long long a, long long b) {
    if (a >= kPrecInf / 2 || b >= kPrecInf / 2) return kPrecInf;
    return a + b;
}

/// An element of K_0 = F_q((t)) with tracked precision.
///
/// Representation: coefficients for exponents [val, val+coeffs.size()) are
/// stored; exponents in [val+coeffs.size(), prec) are exactly zero; exponents
/// >= prec are unknown. prec = kPrecInf means the element is known exactly
/// (finite support). Three states:
///   - exact zero:      zero_ set, no coefficients, prec infinite;
///   - normalized:      leading stored coefficient nonzero, valuation = val;
///   - indeterminate:   no nonzero coefficient known below finite prec
///                      (all-zero window; the element may or may not be 0).
class Series {
public:
    Series() : field_(nullptr), val_(0), prec_(kPrecInf), zero_(true) {}

    static Series zero(const Fq& f) {
        Series s;
        s.field_ = &f;
        return s;
    }

    static Series monomial(const Fq& f, const FqElem& c, long long exp) {
        Series s = zero(f);
        if (f.is_zero(c)) return s;
        s.zero_ = false;
        s.val_ = exp;
        s.coeffs_.push_back(c);
        return s;
    }

    static Series monomial_int(const Fq& f, long long c, long long exp) {
        return monomial(f, f.from_int(c), exp);
    }

    static Series constant(const Fq& f, const FqElem& c) { return monomial(f, c, 0); }

    static Series constant_int(const Fq& f, long long c) {
        return monomial_int(f, c, 0);
    }

    /// t (the fixed prime element of K_0).
    static Series pi(const Fq& f) { return monomial_int(f, 1, 1); }

    /// Build from (exponent, coefficient) terms; prec = kPrecInf means exact.
    static Series from_terms(const Fq& f,
                             const std::vector<std::pair<long long, FqElem>>& terms,
                             long long prec = kPrecInf) {
        Series s = zero(f);
        if (terms.empty()) {
            if (prec < kPrecInf) {
                s.zero_ = false;
                s.prec_ = prec;
                s.val_ = prec;
            }
            return s;
        }
        long long lo = terms[0].first, hi = terms[0].first;
        for (const auto& [e, c] : terms) {
            if (e >= prec)
                throw Error("series term at exponent " + std::to_string(e) +
                            " not below precision " + std::to_string(prec));
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
        s.zero_ = false;
        s.val_ = lo;
        s.prec_ = prec;
        s.coeffs_.assign(static_cast<size_t>(hi - lo + 1), f.zero());
        for (const auto& [e, c] : terms)
            s.coeffs_[static_cast<size_t>(e - lo)] = f.add(s.coeffs_[e - lo], c);
        s.normalize();
        return s;
    }

    /// All-zero window below prec; nothing known beyond.
    static Series indeterminate(const Fq& f, long long prec) {
        Series s = zero(f);
        s.zero_ = false;
        s.prec_ = prec;
        s.val_ = prec;
        return s;
    }

    const Fq& field() const { return *field_; }

    bool is_exact_zero() const { return zero_; }

    /// No nonzero coefficient is known (exact zero or indeterminate window).
    bool is_zero_to_precision() const { return coeffs_.empty(); }

    bool is_indeterminate() const { return !zero_ && coeffs_.empty(); }

    bool has_leading() const { return !coeffs_.empty(); }

    /// Valuation of the leading stored coefficient; only valid with has_leading().
    long long val() const { return val_; }

    long long prec_raw() const { return prec_; }

    ExtInt prec() const {
        return prec_ == kPrecInf ? ExtInt::infinity() : ExtInt(prec_);
    }

    bool is_exact() const { return prec_ == kPrecInf; }

    /// Exact valuation. Infinity iff exactly zero; throws when all stored
    /// coefficients vanish but the element is not known to be zero.
    ExtInt valuation() const {
        if (zero_) return ExtInt::infinity();
        if (coeffs_.empty()) throw IndeterminateValuation(prec_);
        return ExtInt(val_);
    }

    /// True when the valuation is provably >= t; throws PrecisionInsufficient
    /// when the stored window cannot decide.
    bool valuation_at_least(long long t) const {
        if (zero_) return true;
        if (!coeffs_.empty()) return val_ >= t;
        if (prec_ >= t) return true;
        throw PrecisionInsufficient("valuation_at_least(" + std::to_string(t) +
                                    ") with window up to " + std::to_string(prec_));
    }

    bool coeff_known(long long e) const { return zero_ || e < prec_; }

    FqElem coeff(long long e) const {
        if (zero_) return field_->zero();
        if (e >= prec_)
            throw IndeterminatePrecision("coefficient at exponent " + std::to_string(e));
        if (e < val_ || e >= val_ + static_cast<long long>(coeffs_.size()))
            return field_->zero();
        return coeffs_[static_cast<size_t>(e - val_)];
    }

    /// Nonzero (exponent, coefficient) pairs of the stored window.
    std::vector<std::pair<long long, FqElem>> terms() const {
        std::vector<std::pair<long long, FqElem>> out;
        for (size_t i = 0; i < coeffs_.size(); ++i)
            if (!field_->is_zero(coeffs_[i]))
                out.emplace_back(val_ + static_cast<long long>(i), coeffs_[i]);
        return out;
    }

    friend Series operator+(const Series& a, const Series& b) {
        check_fields(a, b);
        const Fq& f = *a.field_;
        if (a.zero_) return b;
        if (b.zero_) return a;
        long long prec = std::min(a.prec_, b.prec_);
        long long lo = std::min(a.window_lo(), b.window_lo());
        long long hi = std::min(prec, std::max(a.window_hi(), b.window_hi()));
        Series r = zero(f);
        r.zero_ = false;
        r.prec_ = prec;
        if (lo >= hi) {
            r.val_ = prec;
            r.normalize();
            return r;
        }
        r.val_ = lo;
        r.coeffs_.assign(static_cast<size_t>(hi - lo), f.zero());
        a.add_window_into(r);
        b.add_window_into(r);
        r.normalize();
        return r;
    }

    friend Series operator-(const Series& a) {
        Series r = a;
        for (auto& c : r.coeffs_) c = r.field_->neg(c);
        return r;
    }

    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator*(const Series& a, const Series& b) {
        check_fields(a, b);
        const Fq& f = *a.field_;
        if (a.zero_ || b.zero_) return zero(f);
        // valuation placeholders: an indeterminate operand contributes its
        // precision bound, which keeps the rule conservative and correct
        long long va = a.coeffs_.empty() ? a.prec_ : a.val_;
        long long vb = b.coeffs_.empty() ? b.prec_ : b.val_;
        long long prec = std::min(prec_add(a.prec_, vb), prec_add(b.prec_, va));
        Series r = zero(f);
        r.zero_ = false;
        r.prec_ = prec;
        if (a.coeffs_.empty() || b.coeffs_.empty()) {
            r.val_ = prec;
            r.normalize();
            return r;
        }
        long long lo = a.val_ + b.val_;
        long long hi = std::min(prec, a.window_hi() + b.window_hi() - 1);
        if (lo >= hi && prec < kPrecInf) {
            r.val_ = prec;
            r.normalize();
            return r;
        }
        r.val_ = lo;
        r.coeffs_.assign(static_cast<size_t>(hi - lo), f.zero());
        for (size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (f.is_zero(a.coeffs_[i])) continue;
            long long ea = a.val_ + static_cast<long long>(i);
            size_t jmax = std::min(b.coeffs_.size(), static_cast<size_t>(
                std::max<long long>(0, hi - ea - b.val_)));
            for (size_t j = 0; j < jmax; ++j) {
                if (f.is_zero(b.coeffs_[j])) continue;
                f.mul_acc(r.coeffs_[static_cast<size_t>(ea + b.val_ + j - lo)],
                          a.coeffs_[i], b.coeffs_[j]);
            }
        }
        r.normalize();
        return r;
    }

    friend Series operator*(const Series& a, const FqElem& c) {
        Series r = a;
        if (r.field_->is_zero(c)) return zero(*a.field_);
        for (auto& x : r.coeffs_) x = r.field_->mul(x, c);
        r.normalize();
        return r;
    }

    friend Series operator*(const FqElem& c, const Series& a) { return a * c; }

    /// Multiply by t^k.
    Series shifted(long long k) const {
        Series r = *this;
        if (r.zero_) return r;
        r.val_ += k;
        if (r.prec_ < kPrecInf) r.prec_ += k;
        return r;
    }

    Series scalar_int(long long c) const {
        return *this * field_->from_int(c);
    }

    /// Restrict knowledge to exponents < new_prec.
    Series truncated(long long new_prec) const {
        if (zero_ || new_prec >= prec_) return *this;
        Series r = *this;
        r.prec_ = new_prec;
        long long keep = new_prec - r.val_;
        if (keep <= 0) {
            r.coeffs_.clear();
            r.val_ = new_prec;
        } else if (static_cast<size_t>(keep) < r.coeffs_.size()) {
            r.coeffs_.resize(static_cast<size_t>(keep));
        }
        r.normalize();
        return r;
    }

    /// Coefficient-wise p-th power: the Frobenius twist. In characteristic p,
    /// (a + unknown tail)^p = a^p + (tail)^p, so precision multiplies by p.
    Series frobenius_pow() const {
        const Fq& f = *field_;
        Series r = zero(f);
        if (zero_) return r;
        r.zero_ = false;
        long long p = f.p();
        r.prec_ = prec_ == kPrecInf ? kPrecInf : prec_ * p;
        r.val_ = val_ * p;
        if (coeffs_.empty()) {
            r.val_ = r.prec_;
            return r;
        }
        r.coeffs_.assign(static_cast<size_t>((coeffs_.size() - 1) * p + 1), f.zero());
        for (size_t i = 0; i < coeffs_.size(); ++i)
            if (!f.is_zero(coeffs_[i]))
                r.coeffs_[i * p] = f.frobenius(coeffs_[i]);
        r.normalize();
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        if (zero_) {
            os << "0 (exact)";
            return os.str();
        }
        bool first = true;
        for (auto& [e, c] : terms()) {
            if (!first) os << " + ";
            first = false;
            os << "[";
            for (size_t i = 0; i < c.size(); ++i) {
                if (i) os << ",";
                os << c[i];
            }
            os << "]*t^" << e;
        }
        if (first) os << "0";
        if (prec_ != kPrecInf) os << " + O(t^" << prec_ << ")";
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Series& s) {
        return os << s.str();
    }

    /// Identical normalized content, including precision.
    friend bool operator==(const Series& a, const Series& b) {
        if (!a.field_->same(*b.field_)) return false;
        if (a.zero_ != b.zero_) return false;
        if (a.zero_) return true;
        return a.val_ == b.val_ && a.prec_ == b.prec_ && a.coeffs_ == b.coeffs_;
    }

private:
    static void check_fields(const Series& a, const Series& b) {
        if (!a.field_ || !b.field_ || !a.field_->same(*b.field_))
            throw FieldMismatch();
    }

    long long window_lo() const { return coeffs_.empty() ? prec_ : val_; }
    long long window_hi() const {
        return coeffs_.empty() ? prec_
                               : val_ + static_cast<long long>(coeffs_.size());
    }

    // add stored coefficients into r's window (r covers [r.val_, r.val_+size))
    void add_window_into(Series& r) const {
        for (size_t i = 0; i < coeffs_.size(); ++i) {
            long long e = val_ + static_cast<long long>(i);
            if (e < r.val_) continue;
            size_t k = static_cast<size_t>(e - r.val_);
            if (k >= r.coeffs_.size()) break;
            r.field_->add_in(r.coeffs_[k], coeffs_[i]);
        }
    }

    void normalize() {
        const Fq& f = *field_;
        size_t b = 0;
        while (b < coeffs_.size() && f.is_zero(coeffs_[b])) ++b;
        if (b > 0) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(b));
            val_ += static_cast<long long>(b);
        }
        while (!coeffs_.empty() && f.is_zero(coeffs_.back())) coeffs_.pop_back();
        if (coeffs_.empty()) {
            if (prec_ == kPrecInf) {
                zero_ = true;
                val_ = 0;
            } else {
                zero_ = false;
                val_ = prec_;
            }
        }
    }

    const Fq* field_;
    long long val_;
    std::vector<FqElem> coeffs_;
    long long prec_;
    bool zero_;
};

/// Default relative precision used when inverting an exactly known series
/// whose inverse is not finitely supported.
constexpr long long kDefaultInvRelPrec = 64;

/// Multiplicative inverse. For a with finite precision the result precision
/// mirrors multiplication: prec(inv a) = prec(a) - 2 val(a), so that
/// a * inv(a) = 1 holds to the reported precision. For exact non-monomial a
/// the expansion is infinite and rel_prec terms are produced.
inline Series inv(const Series& a, long long rel_prec = kDefaultInvRelPrec) {
    if (a.is_exact_zero()) throw DivideByZero();
    if (!a.has_leading()) throw IndeterminateValuation(a.prec_raw());
    const Fq& f = a.field();
    auto ts = a.terms();
    long long va = a.val();
    if (a.is_exact() && ts.size() == 1)
        return Series::monomial(f, f.inv(ts[0].second), -va);
    long long out_prec =
        a.is_exact() ? -va + rel_prec : a.prec_raw() - 2 * va;
    long long len = out_prec - (-va);
    if (len <= 0)
        throw PrecisionInsufficient("inverse of series with empty result window");
    // b_0 = a_v^{-1};  b_k = -a_v^{-1} sum_{i=1..k} a_{v+i} b_{k-i}
    FqElem lead_inv = f.inv(a.coeff(va));
    std::vector<FqElem> b(static_cast<size_t>(len), f.zero());
    b[0] = lead_inv;
    for (long long k = 1; k < len; ++k) {
        FqElem acc = f.zero();
        for (long long i = 1; i <= k; ++i) {
            FqElem ai = a.coeff(va + i); // k < len keeps va+i inside a's window
            if (f.is_zero(ai)) continue;
            f.mul_acc(acc, ai, b[static_cast<size_t>(k - i)]);
        }
        b[static_cast<size_t>(k)] = f.neg(f.mul(lead_inv, acc));
    }
    std::vector<std::pair<long long, FqElem>> terms;
    for (long long k = 0; k < len; ++k)
        if (!f.is_zero(b[static_cast<size_t>(k)]))
            terms.emplace_back(-va + k, b[static_cast<size_t>(k)]);
    return Series::from_terms(f, terms, out_prec);
}

inline Series div(const Series& a, const Series& b,
                  long long rel_prec = kDefaultInvRelPrec) {
    return a * inv(b, rel_prec);
}

inline Series pow(const Series& a, long long e,
                  long long rel_prec = kDefaultInvRelPrec) {
    const Fq& f = a.field();
    if (e < 0) return pow(inv(a, rel_prec), -e, rel_prec);
    Series r = Series::constant_int(f, 1);
    Series base = a;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

/// The Artin-Schreier map x -> x^p - x, exact via the Frobenius twist.
inline Series wp(const Series& a) { return a.frobenius_pow() - a; }

/// binom(mu, k) = mu (mu-1) ... (mu-k+1) / k! evaluated in K_0; requires
/// 0 <= k < p so that k! is a unit.
inline Series binom_series(const Series& mu, long long k) {
    const Fq& f = mu.field();
    if (k < 0) return Series::zero(f);
    if (k >= f.p())
        throw Error("binom_series requires k < p");
    Series r = Series::constant_int(f, 1);
    long long fact = 1;
    for (long long i = 0; i < k; ++i) {
        r = r * (mu - Series::constant_int(f, i));
        fact = (fact * ((i + 1) % f.p())) % f.p();
    }
    return r * f.inv(f.from_int(fact));
}

} // namespace scaffold

#endif
