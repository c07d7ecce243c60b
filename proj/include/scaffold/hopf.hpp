#ifndef SCAFFOLD_HOPF_HPP
#define SCAFFOLD_HOPF_HPP

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "scaffold/ramification.hpp"
#include "scaffold/scaffold.hpp"

namespace scaffold {

/// Hopf-order parameter set M_1..M_n for K[C_p^n].
struct HopfParams {
    long long p = 2;
    int n = 2;
    CharMode char_mode = CharMode::char_p;
    ExtInt vKp = ExtInt::infinity();
    std::vector<long long> M;
    bool strict = true; // enforce the example-specific conditions
};

struct HopfConstraintReport {
    bool m_inequality = false;  // p^r M_r <= p^s M_s for r <= s
    bool m_congruence = false;  // p^{n-i} | M_i, so b_i = -1 mod p^n
    bool m_nonnegative = false;
    std::optional<bool> char0_bound_M; // v_K(p) >= (p-1) sum M_i
    std::optional<bool> char0_bound_m; // v_K(p) >= m_1(p^n-1) + sum (p^{n-1}-p^{k-2}) m_k
    bool strict_ok = true;             // n=2: p | M_1; n=3: p | M_3
    std::vector<long long> derived_b;  // b_i = p^i M_i - 1
    std::vector<Rational> derived_m;   // m_1..m_n of the Hopf parametrization

    bool valid(bool strict) const {
        bool core = m_inequality && m_congruence && m_nonnegative;
        if (char0_bound_M) core = core && *char0_bound_M && *char0_bound_m;
        if (strict) core = core && strict_ok;
        return core;
    }
};

/// Evaluate the parameter constraints; never throws on determinate input.
inline HopfConstraintReport validate_M(const HopfParams& hp) {
    HopfConstraintReport rep;
    const long long p = hp.p;
    const int n = hp.n;
    long long pn = ipow(p, n);
    rep.m_nonnegative = true;
    for (long long Mi : hp.M)
        if (Mi < 0) rep.m_nonnegative = false;
    rep.m_inequality = true;
    for (int r = 1; r <= n; ++r)
        for (int s = r; s <= n; ++s)
            if (ipow(p, r) * hp.M[static_cast<size_t>(r - 1)] >
                ipow(p, s) * hp.M[static_cast<size_t>(s - 1)])
                rep.m_inequality = false;
    rep.m_congruence = true;
    for (int i = 1; i <= n; ++i)
        if (hp.M[static_cast<size_t>(i - 1)] % ipow(p, n - i) != 0)
            rep.m_congruence = false;
    for (int i = 1; i <= n; ++i)
        rep.derived_b.push_back(ipow(p, i) * hp.M[static_cast<size_t>(i - 1)] - 1);
    // m_1 = (b_1+1)/p^n; p^i M_i - p^{i-1} M_{i-1} = p^{n+i-2} m_i for i >= 2
    rep.derived_m.push_back(Rational(rep.derived_b[0] + 1, pn));
    for (int i = 2; i <= n; ++i)
        rep.derived_m.push_back(
            Rational(ipow(p, i) * hp.M[static_cast<size_t>(i - 1)] -
                         ipow(p, i - 1) * hp.M[static_cast<size_t>(i - 2)],
                     ipow(p, n + i - 2)));
    if (hp.char_mode == CharMode::char_0) {
        if (hp.vKp.is_infinite()) {
            rep.char0_bound_M = true;
            rep.char0_bound_m = true;
        } else {
            long long sumM = 0;
            for (long long Mi : hp.M) sumM += Mi;
            rep.char0_bound_M = Rational(hp.vKp.value()) >= Rational((p - 1) * sumM);
            Rational rhs = rep.derived_m[0] * Rational(pn - 1);
            for (int k = 2; k <= n; ++k)
                rhs += rep.derived_m[static_cast<size_t>(k - 1)] *
                       Rational(ipow(p, n - 1) - ipow(p, k - 2));
            rep.char0_bound_m = Rational(hp.vKp.value()) >= rhs;
        }
    }
    if (n == 2) rep.strict_ok = hp.M[0] % p == 0;
    if (n == 3) rep.strict_ok = hp.M[2] % p == 0;
    return rep;
}

struct HopfGenerator {
    int i = 0;
    long long M = 0;
    std::string symbolic;
    GroupAlgebraElem concrete; // attached only for tower-sourced descriptions
    bool has_concrete = false;
};

struct HopfOrderDescription {
    long long p = 2;
    int n = 1;
    std::vector<long long> M;
    std::vector<HopfGenerator> generators; // index i = 1..n
    // (i, j, v_K(mu_{i,j})) for i < j
    std::vector<std::tuple<int, int, long long>> mu_valuations;
    HopfConstraintReport validation;
    bool from_tower = false;
    /// n = 3 only: the mu table matches the closed-form expressions in the
    /// omegas exactly
    std::optional<bool> intertwining_ok;
};

namespace detail {

inline std::string theta_symbol(int i, int n) {
    if (i == n) return "sigma" + std::to_string(n);
    std::string s = "sigma" + std::to_string(i);
    for (int j = n; j > i; --j) {
        std::string inner = theta_symbol(j, n);
        if (j < n) inner = "(" + inner + ")";
        s += " " + inner + "^[-mu(" + std::to_string(i) + "," + std::to_string(j) + ")]";
    }
    return s;
}

inline std::string generator_symbol(int i, int n, long long M) {
    return "(" + theta_symbol(i, n) + " - 1)/pi^" + std::to_string(M);
}

} // namespace detail

/// Symbolic description from a validated parameter set.
inline HopfOrderDescription hopf_generators(const HopfParams& hp) {
    HopfOrderDescription d;
    d.p = hp.p;
    d.n = hp.n;
    d.M = hp.M;
    d.validation = validate_M(hp);
    if (!d.validation.valid(hp.strict))
        throw ValidationFailed("parameter constraints fail; see validate_M");
    for (int i = 1; i <= hp.n; ++i) {
        HopfGenerator g;
        g.i = i;
        g.M = hp.M[static_cast<size_t>(i - 1)];
        g.symbolic = detail::generator_symbol(i, hp.n, g.M);
        d.generators.push_back(std::move(g));
    }
    for (int i = 1; i <= hp.n; ++i)
        for (int j = i + 1; j <= hp.n; ++j) {
            // v_K(mu_{i,j}) = p^{i-j} M_i - M_j, an integer since p^{n-i} | M_i
            long long v = hp.M[static_cast<size_t>(i - 1)] / ipow(hp.p, j - i) -
                          hp.M[static_cast<size_t>(j - 1)];
            d.mu_valuations.emplace_back(i, j, v);
        }
    return d;
}

/// Concrete description from a characteristic-p tower with b_i = -1 mod p^n:
/// generators (Theta_i - 1)/pi^{M_i} with Theta_i from the scaffold.
inline HopfOrderDescription hopf_generators(const Scaffold& sc) {
    const Tower& tw = *sc.tower;
    const int n = tw.n();
    HopfOrderDescription d;
    d.p = tw.p();
    d.n = n;
    d.from_tower = true;
    for (int i = 1; i <= n; ++i) {
        long long bi = tw.lower_breaks()[static_cast<size_t>(i - 1)];
        if (mod_pos(bi + 1, tw.pn()) != 0) throw NotMinusOneResidue(i, bi);
        d.M.push_back((bi + 1) / ipow(tw.p(), i));
    }
    HopfParams hp;
    hp.p = tw.p();
    hp.n = n;
    hp.char_mode = CharMode::char_p;
    hp.M = d.M;
    d.validation = validate_M(hp);
    for (int i = 1; i <= n; ++i) {
        HopfGenerator g;
        g.i = i;
        g.M = d.M[static_cast<size_t>(i - 1)];
        g.symbolic = detail::generator_symbol(i, n, g.M);
        g.concrete = sc.Psi(i) * Series::monomial_int(tw.field(), 1, -g.M);
        g.has_concrete = true;
        d.generators.push_back(std::move(g));
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            ExtInt v = tw.mu(i, j).valuation();
            long long expect = d.M[static_cast<size_t>(i - 1)] / ipow(tw.p(), j - i) -
                               d.M[static_cast<size_t>(j - 1)];
            if (v != ExtInt(expect))
                throw ValidationFailed("v_K(mu_{i,j}) != p^{i-j} M_i - M_j");
            d.mu_valuations.emplace_back(i, j, v.value());
        }
    if (n == 3) {
        // intertwining expressions for the mu in terms of the omegas
        const Series& w2 = tw.spec().omegas[1];
        const Series& w3 = tw.spec().omegas[2];
        Series den = wp(w2);
        Series mu12 = -w2.frobenius_pow();
        Series mu23 = -div(wp(w3), den, tw.rel_prec());
        Series mu13 = -div(w3 * w2.frobenius_pow() - w2 * w3.frobenius_pow(), den,
                           tw.rel_prec());
        bool ok = (tw.mu(1, 2) - mu12).is_zero_to_precision() &&
                  (tw.mu(2, 3) - mu23).is_zero_to_precision() &&
                  (tw.mu(1, 3) - mu13).is_zero_to_precision();
        d.intertwining_ok = ok;
    }
    return d;
}

// ---------------------------------------------------------------------------
// verification on the tower
// ---------------------------------------------------------------------------

struct HopfWitness {
    int gen_i = 0;
    long long t = 0;
    long long basis_index = 0;
    long long coeff_valuation = 0; // v_0 of the offending lambda coefficient
};

struct FreenessWitness {
    std::vector<long long> exponents; // j_1..j_n
    long long expected = 0;
    ExtInt observed;
};

struct HopfVerifyReport {
    bool stabilization = false;
    bool freeness = false;
    std::vector<HopfWitness> stabilization_witnesses;
    std::vector<FreenessWitness> freeness_witnesses;
    bool passed() const { return stabilization && freeness; }
};

namespace detail {

/// Check g lambda_t in O_n for all 0 <= t < p^n by expanding in the lambda
/// basis: the coefficient of lambda_a is y_{afrak(a)} pi^{-f(a)}.
inline bool stabilization_check(const Tower& tw, const GroupAlgebraElem& g, int gen_i,
                                std::vector<HopfWitness>* witnesses) {
    bool ok = true;
    for (long long t = 0; t < tw.pn(); ++t) {
        TowerElem moved = g.apply(tw.lambda(t));
        auto y = tw.rho_coordinates(moved);
        for (long long a = 0; a < tw.pn(); ++a) {
            const Series& c = y[static_cast<size_t>(tw.digits().afrak(a))];
            long long fa = tw.digits().f(a);
            if (c.is_exact_zero()) continue;
            if (c.has_leading()) {
                if (c.val() - fa < 0) {
                    ok = false;
                    if (witnesses)
                        witnesses->push_back({gen_i, t, a, c.val() - fa});
                }
            } else if (c.prec_raw() - fa < 0) {
                throw PrecisionInsufficient("hopf stabilization coefficient window");
            }
        }
    }
    return ok;
}

} // namespace detail

/// (a) stabilization: every generator maps {lambda_t : 0 <= t < p^n} into the
/// O_0-span of the lambda basis; (b) freeness: with rho = lambda_{p^n-1} the
/// p^n products (prod G_i^{j_i}) rho have the exact valuations
/// p^n - 1 - sum j_i p^{n-i}, pairwise distinct mod p^n.
inline HopfVerifyReport verify_hopf(const Tower& tw, const HopfOrderDescription& desc) {
    if (!desc.from_tower)
        throw ValidationFailed("verify_hopf needs a tower-sourced description");
    HopfVerifyReport rep;
    rep.stabilization = true;
    for (const auto& g : desc.generators)
        if (!detail::stabilization_check(tw, g.concrete, g.i, &rep.stabilization_witnesses))
            rep.stabilization = false;

    rep.freeness = true;
    const int n = tw.n();
    TowerElem rho = tw.lambda(tw.pn() - 1);
    std::vector<long long> expnt(static_cast<size_t>(n), 0);
    for (long long code = 0; code < tw.pn(); ++code) {
        long long expected = tw.pn() - 1;
        TowerElem cur = rho;
        for (int i = 1; i <= n; ++i) {
            long long ji = digit(code, i - 1, tw.p());
            expnt[static_cast<size_t>(i - 1)] = ji;
            expected -= ji * ipow(tw.p(), n - i);
            for (long long k = 0; k < ji; ++k)
                cur = desc.generators[static_cast<size_t>(i - 1)].concrete.apply(cur);
        }
        ExtInt got = tw.valuation(cur);
        if (got != ExtInt(expected)) {
            rep.freeness = false;
            rep.freeness_witnesses.push_back({expnt, expected, got});
        }
    }
    return rep;
}

/// Sharpness probe: the same generators with M_i replaced by M_i + 1 must
/// fail stabilization. Returns the witnesses of the failure.
inline bool overdivision_breaks_stabilization(const Scaffold& sc,
                                              const HopfOrderDescription& desc,
                                              int which_i,
                                              std::vector<HopfWitness>* witnesses) {
    const Tower& tw = *sc.tower;
    const auto& g = desc.generators[static_cast<size_t>(which_i - 1)];
    GroupAlgebraElem over = g.concrete * Series::monomial_int(tw.field(), 1, -1);
    return !detail::stabilization_check(tw, over, which_i, witnesses);
}

/// Weakly ramified group-ring structure: for a tower with all breaks equal 1
/// and any pi of valuation 1, the products Psi^{(s)} pi, s in [0, p^n), have
/// valuations exactly 1 + s (so O_0[G] pi = P_n). Uses the undivided Psi_i.
inline bool weak_ideal_stabilization(const Scaffold& sc, const TowerElem& pi_elem) {
    const Tower& tw = *sc.tower;
    const int n = tw.n();
    if (tw.valuation(pi_elem) != ExtInt(1))
        throw PreconditionViolation("generator must have valuation 1");
    for (long long s = 0; s < tw.pn(); ++s) {
        TowerElem cur = pi_elem;
        for (int i = 1; i <= n; ++i) {
            long long ji = digit(s, n - i, tw.p());
            for (long long k = 0; k < ji; ++k) cur = sc.Psi(i).apply(cur);
        }
        if (tw.valuation(cur) != ExtInt(1 + s)) return false;
    }
    return true;
}

} // namespace scaffold

#endif
