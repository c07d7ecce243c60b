#ifndef SCAFFOLD_RESIDUE_FIELD_HPP
#define SCAFFOLD_RESIDUE_FIELD_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "scaffold/errors.hpp"

namespace scaffold {

/// Element of F_q = F_p[x]/(modulus), stored as the d coefficients of its
/// representative, low degree first, each in [0, p).
using FqElem = boost::container::small_vector<int32_t, 4>;

namespace detail {

inline bool is_prime_ll(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

} // namespace detail

/// The finite field F_{p^d} with the canonical modulus: the lexicographically
/// least monic irreducible of degree d over F_p, coefficients compared low
/// degree first. Two fields with equal (p, d) are the same object; obtain
/// instances through Fq::make only.
class Fq {
public:
    static const Fq& make(long long p, int d) {
        if (!detail::is_prime_ll(p)) throw NotPrime(p);
        if (d < 1) throw DegreeTooLarge(p, d);
        long long sz = 1; // p <= 2^20 after the cap, so no overflow below
        for (int i = 0; i < d; ++i) {
            sz *= p;
            if (sz > (1 << 20)) throw DegreeTooLarge(p, d);
        }
        static std::mutex mu;
        static std::map<std::pair<long long, int>, std::unique_ptr<Fq>> registry;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = registry[{p, d}];
        if (!slot) slot.reset(new Fq(p, d));
        return *slot;
    }

    long long p() const { return p_; }
    int d() const { return d_; }
    long long q() const { return q_; }

    /// Monic modulus, length d+1, low degree first. For d = 1 this is x.
    const std::vector<int32_t>& modulus() const { return mod_; }

    bool same(const Fq& other) const { return p_ == other.p_ && d_ == other.d_; }

    // --- element construction ---

    FqElem zero() const { return FqElem(d_, 0); }

    FqElem one() const { return from_int(1); }

    FqElem from_int(long long k) const {
        FqElem e(d_, 0);
        long long r = k % p_;
        if (r < 0) r += p_;
        e[0] = static_cast<int32_t>(r);
        return e;
    }

    /// Element from coefficient list (length <= d), reduced mod p.
    FqElem from_coeffs(const std::vector<long long>& c) const {
        FqElem e(d_, 0);
        for (size_t i = 0; i < c.size() && i < static_cast<size_t>(d_); ++i) {
            long long r = c[i] % p_;
            if (r < 0) r += p_;
            e[i] = static_cast<int32_t>(r);
        }
        return e;
    }

    /// x mod modulus: a generator of the field over F_p when d > 1.
    /// For d = 1 the residue of x is 0.
    FqElem gen() const {
        FqElem e(d_, 0);
        if (d_ > 1) e[1] = 1;
        return e;
    }

    /// Element with index k in [0, q): base-p digits of k are the coefficients.
    FqElem from_index(long long k) const {
        FqElem e(d_, 0);
        for (int i = 0; i < d_ && k > 0; ++i) {
            e[i] = static_cast<int32_t>(k % p_);
            k /= p_;
        }
        return e;
    }

    long long to_index(const FqElem& a) const {
        long long k = 0;
        for (int i = d_ - 1; i >= 0; --i) k = k * p_ + a[i];
        return k;
    }

    // --- element arithmetic ---

    bool is_zero(const FqElem& a) const {
        for (int32_t c : a)
            if (c != 0) return false;
        return true;
    }

    bool eq(const FqElem& a, const FqElem& b) const { return a == b; }

    FqElem add(const FqElem& a, const FqElem& b) const {
        FqElem r(d_, 0);
        for (int i = 0; i < d_; ++i) {
            int32_t s = a[i] + b[i];
            if (s >= p_) s -= static_cast<int32_t>(p_);
            r[i] = s;
        }
        return r;
    }

    void add_in(FqElem& a, const FqElem& b) const {
        for (int i = 0; i < d_; ++i) {
            int32_t s = a[i] + b[i];
            if (s >= p_) s -= static_cast<int32_t>(p_);
            a[i] = s;
        }
    }

    FqElem sub(const FqElem& a, const FqElem& b) const {
        FqElem r(d_, 0);
        for (int i = 0; i < d_; ++i) {
            int32_t s = a[i] - b[i];
            if (s < 0) s += static_cast<int32_t>(p_);
            r[i] = s;
        }
        return r;
    }

    FqElem neg(const FqElem& a) const {
        FqElem r(d_, 0);
        for (int i = 0; i < d_; ++i) r[i] = a[i] ? static_cast<int32_t>(p_) - a[i] : 0;
        return r;
    }

    FqElem mul(const FqElem& a, const FqElem& b) const {
        if (d_ == 1) {
            FqElem r(1, 0);
            r[0] = static_cast<int32_t>((static_cast<int64_t>(a[0]) * b[0]) % p_);
            return r;
        }
        return mul_general(a, b);
    }

    /// acc += a * b, avoiding temporaries in the d = 1 fast path.
    void mul_acc(FqElem& acc, const FqElem& a, const FqElem& b) const {
        if (d_ == 1) {
            acc[0] = static_cast<int32_t>(
                (acc[0] + static_cast<int64_t>(a[0]) * b[0]) % p_);
            return;
        }
        add_in(acc, mul_general(a, b));
    }

    FqElem scalar_mul(const FqElem& a, long long k) const {
        long long r = k % p_;
        if (r < 0) r += p_;
        FqElem out(d_, 0);
        for (int i = 0; i < d_; ++i)
            out[i] = static_cast<int32_t>((static_cast<int64_t>(a[i]) * r) % p_);
        return out;
    }

    FqElem pow(FqElem a, long long e) const {
        if (e < 0) {
            a = inv(a);
            e = -e;
        }
        FqElem r = one();
        while (e > 0) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    FqElem inv(const FqElem& a) const {
        if (is_zero(a)) throw DivideByZero();
        if (d_ == 1) {
            FqElem r(1, 0);
            r[0] = static_cast<int32_t>(inv_mod_p(a[0]));
            return r;
        }
        // extended Euclid in F_p[x] against the modulus
        std::vector<int32_t> r0(mod_.begin(), mod_.end());
        std::vector<int32_t> r1(a.begin(), a.end());
        std::vector<int32_t> s0{0}, s1{1};
        trim(r1);
        while (!r1.empty()) {
            std::vector<int32_t> q, rem;
            poly_divmod(r0, r1, q, rem);
            std::vector<int32_t> s2 = poly_sub(s0, poly_mul(q, s1));
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        // r0 = gcd, a nonzero constant since the modulus is irreducible
        long long c = inv_mod_p(r0.empty() ? 1 : r0[0]);
        FqElem out(d_, 0);
        for (size_t i = 0; i < s0.size() && i < static_cast<size_t>(d_); ++i)
            out[i] = static_cast<int32_t>((static_cast<int64_t>(s0[i]) * c) % p_);
        return out;
    }

    /// The Frobenius automorphism x -> x^p.
    FqElem frobenius(const FqElem& a) const { return pow(a, p_); }

    /// Inverse of Frobenius (= Frobenius iterated d-1 times).
    FqElem frobenius_inv(const FqElem& a) const {
        FqElem r = a;
        for (int i = 0; i < d_ - 1; ++i) r = frobenius(r);
        return r;
    }

private:
    Fq(long long p, int d) : p_(p), d_(d) {
        q_ = 1;
        for (int i = 0; i < d_; ++i) q_ *= p_;
        mod_ = canonical_modulus();
    }

    long long inv_mod_p(long long a) const {
        // Fermat; p is prime and a != 0 mod p
        long long r = 1, b = a % p_, e = p_ - 2;
        if (b < 0) b += p_;
        if (b == 0) throw DivideByZero();
        while (e > 0) {
            if (e & 1) r = (r * b) % p_;
            b = (b * b) % p_;
            e >>= 1;
        }
        return r;
    }

    static void trim(std::vector<int32_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    }

    std::vector<int32_t> poly_mul(const std::vector<int32_t>& a,
                                  const std::vector<int32_t>& b) const {
        if (a.empty() || b.empty()) return {};
        std::vector<int32_t> r(a.size() + b.size() - 1, 0);
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j)
                r[i + j] = static_cast<int32_t>(
                    (r[i + j] + static_cast<int64_t>(a[i]) * b[j]) % p_);
        trim(r);
        return r;
    }

    std::vector<int32_t> poly_sub(const std::vector<int32_t>& a,
                                  const std::vector<int32_t>& b) const {
        std::vector<int32_t> r(std::max(a.size(), b.size()), 0);
        for (size_t i = 0; i < r.size(); ++i) {
            int64_t x = (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
            x %= p_;
            if (x < 0) x += p_;
            r[i] = static_cast<int32_t>(x);
        }
        trim(r);
        return r;
    }

    void poly_divmod(const std::vector<int32_t>& a, const std::vector<int32_t>& b,
                     std::vector<int32_t>& q, std::vector<int32_t>& rem) const {
        rem = a;
        trim(rem);
        q.assign(rem.size() > b.size() ? rem.size() - b.size() + 1 : 1, 0);
        long long lead_inv = inv_mod_p(b.back());
        while (rem.size() >= b.size() && !rem.empty()) {
            size_t shift = rem.size() - b.size();
            long long c = (static_cast<int64_t>(rem.back()) * lead_inv) % p_;
            q[shift] = static_cast<int32_t>(c);
            for (size_t i = 0; i < b.size(); ++i) {
                int64_t x = rem[shift + i] - c * b[i] % p_;
                x %= p_;
                if (x < 0) x += p_;
                rem[shift + i] = static_cast<int32_t>(x);
            }
            trim(rem);
        }
        trim(q);
    }

    bool poly_irreducible(const std::vector<int32_t>& f) const {
        // trial division by every monic polynomial of degree 1..deg(f)/2
        int deg = static_cast<int>(f.size()) - 1;
        for (int dd = 1; 2 * dd <= deg; ++dd) {
            long long count = 1;
            for (int i = 0; i < dd; ++i) count *= p_;
            for (long long k = 0; k < count; ++k) {
                std::vector<int32_t> g(dd + 1, 0);
                long long kk = k;
                for (int i = 0; i < dd; ++i) {
                    g[i] = static_cast<int32_t>(kk % p_);
                    kk /= p_;
                }
                g[dd] = 1;
                std::vector<int32_t> q, rem;
                poly_divmod(f, g, q, rem);
                if (rem.empty()) return false;
            }
        }
        return true;
    }

    std::vector<int32_t> canonical_modulus() const {
        if (d_ == 1) return {0, 1}; // x: all degree-1 monics are irreducible
        long long count = 1;
        for (int i = 0; i < d_; ++i) count *= p_;
        for (long long k = 0; k < count; ++k) {
            std::vector<int32_t> f(d_ + 1, 0);
            long long kk = k;
            for (int i = 0; i < d_; ++i) {
                f[i] = static_cast<int32_t>(kk % p_);
                kk /= p_;
            }
            f[d_] = 1;
            if (poly_irreducible(f)) return f;
        }
        throw Error("no irreducible polynomial found (unreachable)");
    }

    FqElem mul_general(const FqElem& a, const FqElem& b) const {
        boost::container::small_vector<int64_t, 8> prod(2 * d_ - 1, 0);
        for (int i = 0; i < d_; ++i) {
            if (!a[i]) continue;
            for (int j = 0; j < d_; ++j)
                prod[i + j] += static_cast<int64_t>(a[i]) * b[j];
        }
        // reduce by the monic modulus
        for (int k = 2 * d_ - 2; k >= d_; --k) {
            int64_t c = prod[k] % p_;
            if (c == 0) continue;
            for (int i = 0; i < d_; ++i)
                prod[k - d_ + i] -= c * mod_[i];
            prod[k] = 0;
        }
        FqElem r(d_, 0);
        for (int i = 0; i < d_; ++i) {
            int64_t x = prod[i] % p_;
            if (x < 0) x += p_;
            r[i] = static_cast<int32_t>(x);
        }
        return r;
    }

    long long p_;
    int d_;
    long long q_;
    std::vector<int32_t> mod_;
};

/// True iff the given elements of one residue field are linearly independent
/// over F_p (rank check by Gaussian elimination on their coefficient vectors).
inline bool fp_independent(const Fq& field, const std::vector<FqElem>& elems) {
    for (const auto& e : elems)
        if (static_cast<int>(e.size()) != field.d()) throw FieldMismatch();
    const long long p = field.p();
    std::vector<std::vector<int64_t>> rows;
    rows.reserve(elems.size());
    for (const auto& e : elems) rows.emplace_back(e.begin(), e.end());
    size_t rank = 0;
    for (int col = 0; col < field.d() && rank < rows.size(); ++col) {
        size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][col] % p == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        // normalize pivot row
        int64_t inv = 1, b = rows[rank][col] % p, e = p - 2;
        while (e > 0) {
            if (e & 1) inv = inv * b % p;
            b = b * b % p;
            e >>= 1;
        }
        for (auto& x : rows[rank]) x = x * inv % p;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            int64_t c = rows[r][col] % p;
            if (!c) continue;
            for (int j = 0; j < field.d(); ++j) {
                rows[r][j] = ((rows[r][j] - c * rows[rank][j]) % p + p) % p;
            }
        }
        ++rank;
    }
    return rank == elems.size();
}

} // namespace scaffold

#endif
