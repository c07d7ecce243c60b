#ifndef SCAFFOLD_RAMIFICATION_HPP
#define SCAFFOLD_RAMIFICATION_HPP

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <boost/rational.hpp>

#include "scaffold/digits.hpp"
#include "scaffold/errors.hpp"
#include "scaffold/extint.hpp"

namespace scaffold {

using Rational = boost::rational<long long>;

enum class CharMode { char_p, char_0 };

inline long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

inline long long floordiv(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

/// Numeric ramification data for a totally ramified p-extension of degree
/// p^n: lower breaks b_i, upper breaks u_i, jump data (b_1, m_2..m_n) when it
/// exists, the Assumption-2 residue b, and the increasing sequence C_i.
struct RamProfile {
    long long p = 2;
    int n = 1;
    CharMode char_mode = CharMode::char_p;
    ExtInt v0p = ExtInt::infinity(); // v_0(p); infinity in characteristic p

    std::vector<long long> lower;                 // b_1 <= ... <= b_n
    std::vector<long long> upper;                 // u_1 <= ... <= u_n
    std::optional<std::vector<long long>> jumps;  // m_2..m_n; requires A4
    std::vector<Rational> C;                      // C_0..C_n

    long long pn() const { return ipow(p, n); }

    bool a1() const { return lower[0] % p != 0; }

    bool a2() const {
        for (long long b : lower)
            if (mod_pos(b, pn()) != mod_pos(lower[0], pn())) return false;
        return true;
    }

    bool a4() const {
        if (upper[0] % p == 0) return false;
        long long q = ipow(p, n - 1);
        for (long long u : upper)
            if (mod_pos(u, q) != mod_pos(upper[0], q)) return false;
        return true;
    }

    /// Assumption-2 residue; only meaningful when a2() holds.
    long long residue() const { return mod_pos(lower[0], pn()); }
};

namespace detail {

inline void require_order(const std::vector<long long>& b, const char* name) {
    if (b.empty()) throw OrderViolation(std::string(name) + " breaks empty");
    if (b[0] <= 0)
        throw OrderViolation(std::string(name) + " breaks must be positive");
    for (size_t i = 1; i < b.size(); ++i)
        if (b[i] < b[i - 1])
            throw OrderViolation(std::string(name) + " breaks must be nondecreasing");
}

inline void finish_profile(RamProfile& r) {
    // jump data m_i = (u_i - u_{i-1}) / p^{n-1}, defined exactly when the
    // upper breaks are congruent modulo p^{n-1}
    long long q = ipow(r.p, r.n - 1);
    std::vector<long long> m;
    bool ok = true;
    for (int i = 1; i < r.n; ++i) {
        long long diff = r.upper[i] - r.upper[i - 1];
        if (diff % q != 0) {
            ok = false;
            break;
        }
        m.push_back(diff / q);
    }
    if (ok) r.jumps = std::move(m);
    r.C.assign(static_cast<size_t>(r.n) + 1, Rational(0));
    for (int i = 1; i <= r.n; ++i)
        r.C[i] = Rational(r.upper[i - 1]) - Rational(r.lower[i - 1], ipow(r.p, i));
}

} // namespace detail

/// Complete a profile from lower breaks. Throws NonIntegralUpperBreaks when
/// Eq.-(1) conversion leaves the residue classes inconsistent.
inline RamProfile profile_from_lower(long long p, int n, CharMode mode, ExtInt v0p,
                                     std::vector<long long> lower) {
    detail::require_order(lower, "lower");
    if (static_cast<int>(lower.size()) != n)
        throw OrderViolation("expected n lower breaks");
    RamProfile r;
    r.p = p;
    r.n = n;
    r.char_mode = mode;
    r.v0p = v0p;
    r.lower = std::move(lower);
    r.upper.resize(n);
    Rational u(r.lower[0]);
    r.upper[0] = r.lower[0];
    for (int i = 1; i < n; ++i) {
        u += Rational(r.lower[i] - r.lower[i - 1], ipow(p, i));
        if (u.denominator() != 1) throw NonIntegralUpperBreaks(i + 1);
        r.upper[i] = u.numerator();
    }
    detail::finish_profile(r);
    return r;
}

inline RamProfile profile_from_upper(long long p, int n, CharMode mode, ExtInt v0p,
                                     std::vector<long long> upper) {
    detail::require_order(upper, "upper");
    if (static_cast<int>(upper.size()) != n)
        throw OrderViolation("expected n upper breaks");
    RamProfile r;
    r.p = p;
    r.n = n;
    r.char_mode = mode;
    r.v0p = v0p;
    r.upper = std::move(upper);
    r.lower.resize(n);
    r.lower[0] = r.upper[0];
    for (int i = 1; i < n; ++i)
        r.lower[i] = r.lower[i - 1] + ipow(p, i) * (r.upper[i] - r.upper[i - 1]);
    detail::finish_profile(r);
    return r;
}

/// Complete a profile from jump data (b_1, m_2..m_n):
///   u_i = b_1 + p^(n-1) sum_{k<=i} m_k,  b_i = b_1 + p^n sum_{k<=i} p^(k-2) m_k.
inline RamProfile profile_from_jumps(long long p, int n, CharMode mode, ExtInt v0p,
                                     long long b1, std::vector<long long> m) {
    if (b1 <= 0) throw OrderViolation("b_1 must be positive");
    if (static_cast<int>(m.size()) != n - 1)
        throw OrderViolation("expected n-1 jump values m_2..m_n");
    for (long long mk : m)
        if (mk < 0) throw OrderViolation("jump data must be nonnegative");
    RamProfile r;
    r.p = p;
    r.n = n;
    r.char_mode = mode;
    r.v0p = v0p;
    r.lower.resize(n);
    r.upper.resize(n);
    r.lower[0] = r.upper[0] = b1;
    long long su = 0, sb = 0;
    for (int i = 2; i <= n; ++i) {
        su += m[i - 2];
        sb += ipow(p, i - 2) * m[i - 2];
        r.upper[i - 1] = b1 + ipow(p, n - 1) * su;
        r.lower[i - 1] = b1 + ipow(p, n) * sb;
    }
    detail::finish_profile(r);
    return r;
}

// ---------------------------------------------------------------------------
// assumptions
// ---------------------------------------------------------------------------

struct AssumptionsReport {
    bool a1 = false;
    bool a2 = false;
    bool a4 = false;
    std::optional<bool> a5; // needs epsilon valuations
    bool a6 = false;
    long long tolerance_used = 1;
    // required gap g(i,j) = p^{n-1} u_i - p^{n-j} b_i + T for 1 <= i <= j <= n
    std::vector<std::tuple<int, int, long long>> a3_gap;
};

/// Evaluate Assumptions 1, 2, 4, 5, 6 and the Assumption-3 gap table at
/// tolerance T. eps_v0, when given, holds v_0(eps_i) for i = 1..n.
inline AssumptionsReport check_assumptions(const RamProfile& r,
                                           const std::vector<ExtInt>* eps_v0 = nullptr,
                                           long long T = 1) {
    AssumptionsReport rep;
    rep.tolerance_used = T;
    rep.a1 = r.a1();
    rep.a2 = r.a2();
    rep.a4 = r.a4();
    if (eps_v0) {
        bool ok = true;
        for (int i = 1; i <= r.n && ok; ++i) {
            const ExtInt& v = (*eps_v0)[i - 1];
            if (v.is_infinite()) continue;
            // v_0(eps_i) > -u_i + C_{n-1}
            Rational bound = Rational(-r.upper[i - 1]) + r.C[r.n - 1];
            ok = Rational(v.value()) > bound;
        }
        rep.a5 = ok;
    }
    if (r.v0p.is_infinite()) {
        rep.a6 = true;
    } else {
        // v_0(p) >= C_n + T / p^n
        rep.a6 = Rational(r.v0p.value()) >= r.C[r.n] + Rational(T, r.pn());
    }
    long long pn1 = ipow(r.p, r.n - 1);
    for (int i = 1; i <= r.n; ++i)
        for (int j = i; j <= r.n; ++j)
            rep.a3_gap.emplace_back(
                i, j, pn1 * r.upper[i - 1] - ipow(r.p, r.n - j) * r.lower[i - 1] + T);
    return rep;
}

// ---------------------------------------------------------------------------
// tolerances
// ---------------------------------------------------------------------------

struct ToleranceResult {
    bool available = false;
    ExtInt value = 0;
    std::string criterion;
    std::string reason; // set when unavailable
};

/// Degree-p cyclic extension in characteristic 0: T = p v_K(p) - (p-1) u.
inline ToleranceResult tolerance_degree_p(long long p, ExtInt vKp, long long u) {
    if (u <= 0 || u % p == 0)
        throw FamilyPreconditionViolation("degree_p needs u > 0 prime to p");
    ToleranceResult t;
    t.criterion = "Cp";
    if (vKp.is_infinite()) {
        t.available = true;
        t.value = ExtInt::infinity();
        return t;
    }
    long long val = p * vKp.value() - (p - 1) * u;
    if (val < 1) {
        t.reason = "p v_K(p) - (p-1) u < 1";
        return t;
    }
    t.available = true;
    t.value = val;
    return t;
}

/// General elementary abelian bound from Assumption 6: the largest T with
/// v_0(p) >= C_n + T/p^n, i.e. T = floor(p^n (v_0(p) - C_n)).
inline ToleranceResult tolerance_elem_ab(const RamProfile& r) {
    ToleranceResult t;
    t.criterion = "elem_ab";
    if (r.v0p.is_infinite()) {
        t.available = true;
        t.value = ExtInt::infinity();
        return t;
    }
    Rational raw = Rational(r.pn()) * (Rational(r.v0p.value()) - r.C[r.n]);
    long long val = floordiv(raw.numerator(), raw.denominator());
    if (val < 1) {
        t.reason = "v_0(p) < C_n + 1/p^n";
        return t;
    }
    t.available = true;
    t.value = val;
    return t;
}

/// Biquadratic: T = 4 v_0(2) - 2 b_1 - b_2, needing 2 b_1 + b_2 < 4 v_0(2).
inline ToleranceResult tolerance_biquadratic(long long b1, long long b2, ExtInt v02) {
    if (b1 <= 0 || b2 < b1 || b1 % 2 == 0 || b2 % 2 == 0)
        throw FamilyPreconditionViolation("biquadratic needs odd 0 < b1 <= b2");
    ToleranceResult t;
    t.criterion = "biquadratic";
    if (v02.is_infinite()) {
        t.available = true;
        t.value = ExtInt::infinity();
        return t;
    }
    long long val = 4 * v02.value() - 2 * b1 - b2;
    if (val < 1) {
        t.reason = "2 b_1 + b_2 >= 4 v_0(2)";
        return t;
    }
    t.available = true;
    t.value = val;
    return t;
}

/// Weakly ramified: T = p^n v_0(p) - (p^n - 1).
inline ToleranceResult tolerance_weakly_ramified(long long p, int n, ExtInt v0p) {
    ToleranceResult t;
    t.criterion = "weakly_ramified";
    if (v0p.is_infinite()) {
        t.available = true;
        t.value = ExtInt::infinity();
        return t;
    }
    long long pn = ipow(p, n);
    long long val = pn * v0p.value() - (pn - 1);
    if (val < 1) {
        t.reason = "v_0(p) < 1";
        return t;
    }
    t.available = true;
    t.value = val;
    return t;
}

/// Abrashkin elementary extension: T = p^n v_0(p) - (p^n - 1) u.
inline ToleranceResult tolerance_abrashkin(long long p, int n, ExtInt v0p, long long u) {
    if (u <= 0 || u % p == 0)
        throw FamilyPreconditionViolation("abrashkin needs u > 0 prime to p");
    ToleranceResult t;
    t.criterion = "abrashkin";
    if (v0p.is_infinite()) {
        t.available = true;
        t.value = ExtInt::infinity();
        return t;
    }
    long long pn = ipow(p, n);
    long long val = pn * v0p.value() - (pn - 1) * u;
    if (val < 1) {
        t.reason = "u >= p^n v_0(p) / (p^n - 1)";
        return t;
    }
    t.available = true;
    t.value = val;
    return t;
}

// ---------------------------------------------------------------------------
// freeness verdicts
// ---------------------------------------------------------------------------

enum class FreeStatus { Free, NotFree, Undetermined, OutOfScope };

inline const char* to_string(FreeStatus s) {
    switch (s) {
        case FreeStatus::Free: return "Free";
        case FreeStatus::NotFree: return "NotFree";
        case FreeStatus::Undetermined: return "Undetermined";
        default: return "OutOfScope";
    }
}

struct Verdict {
    FreeStatus status = FreeStatus::Undetermined;
    std::string criterion;
    std::string detail;
};

/// Martel's inequality for the valuation ring of a biquadratic extension:
/// free over its associated order iff 2b_1 + b_2 <= 4 v_0(2) + 3 (-1)^((b_1-1)/2).
inline Verdict freeness_martel(long long b1, long long b2, long long v02) {
    if (b1 <= 0 || b2 < b1 || b1 % 2 == 0 || b2 % 2 == 0)
        throw FamilyPreconditionViolation("martel needs odd 0 < b1 <= b2");
    if (mod_pos(b1, 4) != mod_pos(b2, 4))
        throw FamilyPreconditionViolation("martel needs b1 = b2 mod 4");
    if (2 * b1 + b2 > 6 * v02 - 3)
        throw FamilyPreconditionViolation(
            "maximally ramified quadratic subextension (2b1+b2 > 6v-3)");
    Verdict v;
    v.criterion = "martel";
    long long sign = (mod_pos(b1, 4) == 1) ? 3 : -3;
    long long lhs = 2 * b1 + b2, rhs = 4 * v02 + sign;
    v.status = lhs <= rhs ? FreeStatus::Free : FreeStatus::NotFree;
    v.detail = std::to_string(lhs) + (lhs <= rhs ? " <= " : " > ") + std::to_string(rhs);
    return v;
}

/// Gate values for the eight biquadratic (b, h) cases, b = b_2 mod 4 in {1,3}
/// and 0 <= b - h < 4: L1 = 4 + b - h bounds the not-free assertions, L2 =
/// max(1, b - h) the free ones. The two rows with a w(s) != d(s) defect are
/// (b,h) = (1,-2) and (3,1).
struct BiquadGate {
    long long b, h, L1, L2;
    bool free_row;
};

inline std::vector<BiquadGate> biquadratic_gate_table() {
    std::vector<BiquadGate> rows;
    for (long long b : {1LL, 3LL})
        for (long long h = b; h > b - 4; --h) {
            BiquadGate g;
            g.b = b;
            g.h = h;
            g.L1 = 4 + b - h;
            g.L2 = std::max<long long>(1, b - h);
            g.free_row = !((b == 1 && h == -2) || (b == 3 && h == 1));
            rows.push_back(g);
        }
    return rows;
}

/// Ideal-by-ideal biquadratic verdicts. Free/NotFree exactly where the gate
/// table decides at tolerance T = 4 v_0(2) - 2b_1 - b_2; Undetermined in the
/// gaps, including T < 1 where no scaffold is guaranteed.
inline Verdict freeness_biquadratic_ideal(long long b1, long long b2, long long h,
                                          long long v02) {
    if (b1 <= 0 || b2 < b1 || b1 % 2 == 0 || b2 % 2 == 0)
        throw FamilyPreconditionViolation("biquadratic needs odd 0 < b1 <= b2");
    if (mod_pos(b1, 4) != mod_pos(b2, 4))
        throw FamilyPreconditionViolation("biquadratic needs b1 = b2 mod 4");
    Verdict v;
    v.criterion = "biquadratic_ideal";
    long long T = 4 * v02 - 2 * b1 - b2;
    if (T < 1) {
        v.status = FreeStatus::Undetermined;
        v.detail = "tolerance " + std::to_string(T) + " < 1: no scaffold guaranteed";
        return v;
    }
    long long b = mod_pos(b2, 4); // 1 or 3
    long long hr = b - mod_pos(b - h, 4);
    for (const auto& g : biquadratic_gate_table()) {
        if (g.b != b || g.h != hr) continue;
        if (g.free_row) {
            v.status = T >= g.L2 ? FreeStatus::Free : FreeStatus::Undetermined;
            v.detail = "T=" + std::to_string(T) + " vs L2=" + std::to_string(g.L2);
        } else {
            v.status = T >= g.L1 ? FreeStatus::NotFree : FreeStatus::Undetermined;
            v.detail = "T=" + std::to_string(T) + " vs L1=" + std::to_string(g.L1);
        }
        return v;
    }
    throw Error("biquadratic gate row missing (unreachable)");
}

/// Weakly ramified ideals: free iff h = h' mod p^n with h' = 0, h' = 1, or
/// (p^n+1)/2 < h' < p^n. Requires v_0(p) >= 3 in characteristic 0.
inline Verdict freeness_weak_ideal(long long p, int n, ExtInt v0p, long long h) {
    if (v0p.is_finite() && v0p.value() < 3)
        throw FamilyPreconditionViolation("weak_ideal needs v_0(p) >= 3");
    Verdict v;
    v.criterion = "weak_ideal";
    long long pn = ipow(p, n);
    long long hr = mod_pos(h, pn);
    bool free = hr == 0 || hr == 1 || (2 * hr > pn + 1 && hr < pn);
    v.status = free ? FreeStatus::Free : FreeStatus::NotFree;
    v.detail = "h' = " + std::to_string(hr);
    return v;
}

/// Abrashkin elementary extensions: with b the least nonnegative residue of
/// u mod p^n, the valuation ring is free over its associated order if b
/// divides p^m - 1 for some m <= n; for n = 2 this is an equivalence.
inline Verdict freeness_abrashkin(long long p, int n, ExtInt v0p, long long u) {
    if (u <= 0 || u % p == 0)
        throw FamilyPreconditionViolation("abrashkin needs u > 0 prime to p");
    long long pn = ipow(p, n);
    if (v0p.is_finite()) {
        // u < p^n v_0(p) / (p^n - 1) - 2
        if (Rational(u) >= Rational(pn * v0p.value(), pn - 1) - 2)
            throw FamilyPreconditionViolation(
                "abrashkin needs u < p^n v_0(p)/(p^n-1) - 2");
    }
    Verdict v;
    v.criterion = "abrashkin";
    long long b = mod_pos(u, pn);
    for (int m = 1; m <= n; ++m) {
        if ((ipow(p, m) - 1) % b == 0) {
            v.status = FreeStatus::Free;
            v.detail = "b = " + std::to_string(b) + " divides p^" +
                       std::to_string(m) + " - 1";
            return v;
        }
    }
    if (n == 2) {
        v.status = FreeStatus::NotFree;
        v.detail = "b = " + std::to_string(b) + " divides no p^m - 1, m <= 2";
    } else {
        v.status = FreeStatus::Undetermined;
        v.detail = "divisor criterion is sufficient only for n > 2";
    }
    return v;
}

// ---------------------------------------------------------------------------
// different and trace
// ---------------------------------------------------------------------------

struct DifferentTrace {
    long long m;   // exponent of the different of K_n/K_j
    long long s_r; // Tr_{n,j}(P_n^r) = P_j^{s_r}
    bool simplified_applicable = false;
    bool simplified_agrees = false;
};

/// Hilbert's formula for the different of K_n/K_j and the resulting trace
/// valuation s_r = floor((m + r)/p^(n-j)). When p^(i+1) | b_{i+1} - b_i the
/// expanded form of s_r is checked as well.
inline DifferentTrace different_and_trace(long long p, int n,
                                          const std::vector<long long>& b, int j,
                                          long long r) {
    detail::require_order(b, "lower");
    if (static_cast<int>(b.size()) != n || j < 0 || j >= n)
        throw OrderViolation("need breaks b_1..b_n and 0 <= j < n");
    DifferentTrace out{};
    long long m = (b[j] + 1) * (ipow(p, n - j) - 1);
    for (int i = j + 1; i <= n - 1; ++i)
        m += (b[i] - b[i - 1]) * (ipow(p, n - i) - 1);
    out.m = m;
    out.s_r = floordiv(m + r, ipow(p, n - j));

    bool applies = true;
    for (int i = j + 1; i <= n - 1 && applies; ++i)
        if ((b[i] - b[i - 1]) % ipow(p, i + 1) != 0) applies = false;
    out.simplified_applicable = applies;
    if (applies) {
        long long s = b[j] + 1;
        for (int i = j + 1; i <= n - 1; ++i)
            s += (b[i] - b[i - 1]) / ipow(p, i - j);
        s += floordiv(-1 - b[n - 1] + r, ipow(p, n - j));
        out.simplified_agrees = (s == out.s_r);
    }
    return out;
}

} // namespace scaffold

#endif
