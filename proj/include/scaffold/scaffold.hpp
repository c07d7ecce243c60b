#ifndef SCAFFOLD_SCAFFOLD_HPP
#define SCAFFOLD_SCAFFOLD_HPP

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "scaffold/group_algebra.hpp"
#include "scaffold/tower.hpp"

namespace scaffold {

/// The scaffold attached to a tower: the lambda basis, the operators
/// Theta_i / Psi_i = Theta_i - 1 built by descending truncated-exponent
/// recursion, and the shift parameters b_1 <= ... <= b_n.
struct Scaffold {
    const Tower* tower = nullptr;
    std::vector<long long> shifts;  // b_i
    long long residue_b = 0;        // Assumption-2 residue
    ExtInt tolerance = ExtInt::infinity();
    std::vector<GroupAlgebraElem> theta; // 1-based: theta[i-1]
    std::vector<GroupAlgebraElem> psi;
    std::map<long long, TowerElem> lambda_window; // t in [-p^n, 2 p^n)

    const GroupAlgebraElem& Theta(int i) const { return theta[static_cast<size_t>(i - 1)]; }
    const GroupAlgebraElem& Psi(int i) const { return psi[static_cast<size_t>(i - 1)]; }
    TowerElem lambda(long long t) const { return tower->lambda(t); }
};

/// Build Theta_i = sigma_i Theta_n^{[-mu_{i,n}]} ... Theta_{i+1}^{[-mu_{i,i+1}]}
/// from an explicit upper-triangular mu table (entries (i,j), 1 <= i <= j <= n,
/// indexed as in Tower::mu).
inline Scaffold theta_psi_build_with_mu(
    const Tower& tw,
    const std::function<const Series&(int, int)>& mu) {
    Scaffold sc;
    sc.tower = &tw;
    sc.shifts = tw.lower_breaks();
    sc.residue_b = tw.digits().residue();
    sc.tolerance = ExtInt::infinity();
    const int n = tw.n();
    sc.theta.assign(static_cast<size_t>(n), GroupAlgebraElem(tw));
    sc.psi.assign(static_cast<size_t>(n), GroupAlgebraElem(tw));
    for (int i = n; i >= 1; --i) {
        GroupAlgebraElem th = GroupAlgebraElem::sigma(tw, i);
        for (int j = n; j > i; --j)
            th = th * trunc_exp(sc.theta[static_cast<size_t>(j - 1)], -mu(i, j));
        sc.theta[static_cast<size_t>(i - 1)] = th;
        sc.psi[static_cast<size_t>(i - 1)] = th - GroupAlgebraElem::identity(tw);
    }
    for (long long t = -tw.pn(); t < 2 * tw.pn(); ++t)
        sc.lambda_window.emplace(t, tw.lambda(t));
    return sc;
}

inline Scaffold theta_psi_build(const Tower& tw) {
    return theta_psi_build_with_mu(
        tw, [&tw](int i, int j) -> const Series& { return tw.mu(i, j); });
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

struct VerifyFailure {
    int i = 0;       // Psi index
    long long j = 0; // lambda index (tolerance mode) or unused (exact mode)
    long long a = 0; // digit vector
    ExtInt expected_valuation;
    ExtInt observed_valuation;
};

struct VerifyReport {
    std::string mode;
    std::string criterion; // identifier of the identity being checked
    ExtInt tolerance = ExtInt::infinity();
    long long cases_total = 0;
    long long cases_failed = 0;
    std::vector<VerifyFailure> failures;
    /// smallest precision margin (in v_n units) backing the zero checks
    ExtInt margin = ExtInt::infinity();

    bool passed() const { return cases_failed == 0; }
};

namespace detail {

/// Valuation floor guaranteed for a tower element that printed as zero:
/// p^n * min coefficient precision.
inline ExtInt known_zero_through(const Tower& tw, const TowerElem& x) {
    ExtInt best = ExtInt::infinity();
    for (long long e = 0; e < tw.pn(); ++e) {
        const Series& s = x.entry(e);
        if (s.is_exact_zero()) continue;
        ExtInt bound = s.prec_raw() >= kPrecInf ? ExtInt::infinity()
                                                : ExtInt(s.prec_raw() * tw.pn());
        if (bound < best) best = bound;
    }
    return best;
}

} // namespace detail

/// Exact mode: Psi_j rho_a must equal rho_{a'} with the a_(n-j) digit
/// decremented (zero when the digit is zero), as an exact identity of
/// coefficient tables.
inline VerifyReport verify_scaffold_exact(const Scaffold& sc) {
    const Tower& tw = *sc.tower;
    VerifyReport rep;
    rep.mode = "exact";
    rep.criterion = "scaffold_exact_identity";
    const int n = tw.n();
    for (int j = 1; j <= n; ++j) {
        long long step = ipow(tw.p(), n - j);
        for (long long a = 0; a < tw.pn(); ++a) {
            ++rep.cases_total;
            TowerElem lhs = sc.Psi(j).apply(tw.rho(a));
            long long dj = digit(a, n - j, tw.p());
            TowerElem diff =
                dj >= 1 ? TowerElem(lhs - tw.rho(a - step)) : lhs;
            if (diff.is_zero_to_precision()) {
                ExtInt m = detail::known_zero_through(tw, diff);
                if (m < rep.margin) rep.margin = m;
            } else {
                ++rep.cases_failed;
                VerifyFailure f;
                f.i = j;
                f.a = a;
                f.expected_valuation = ExtInt::infinity();
                try {
                    f.observed_valuation = tw.valuation(diff);
                } catch (const Error&) {
                    f.observed_valuation = ExtInt(0);
                }
                rep.failures.push_back(f);
            }
        }
    }
    return rep;
}

/// Tolerance mode: for all i and all j in one period, the scaffold
/// congruence v_n(Psi_i lambda_j - expected) >= j + p^{n-i} b_i + T.
inline VerifyReport verify_scaffold_tolerance(const Scaffold& sc, long long T) {
    const Tower& tw = *sc.tower;
    VerifyReport rep;
    rep.mode = "tolerance";
    rep.criterion = "scaffold_congruence";
    rep.tolerance = ExtInt(T);
    const int n = tw.n();
    for (int i = 1; i <= n; ++i) {
        long long shift = ipow(tw.p(), n - i) * sc.shifts[static_cast<size_t>(i - 1)];
        for (long long j = 0; j < tw.pn(); ++j) {
            ++rep.cases_total;
            long long a = tw.digits().afrak(j);
            TowerElem lhs = sc.Psi(i).apply(tw.lambda(j));
            if (digit(a, n - i, tw.p()) >= 1) lhs = lhs - tw.lambda(j + shift);
            long long threshold = j + shift + T;
            bool ok = tw.valuation_at_least(lhs, threshold);
            if (!ok) {
                ++rep.cases_failed;
                VerifyFailure f;
                f.i = i;
                f.j = j;
                f.a = a;
                f.expected_valuation = ExtInt(threshold);
                try {
                    f.observed_valuation = tw.valuation(lhs);
                } catch (const Error&) {
                    f.observed_valuation = ExtInt(0);
                }
                rep.failures.push_back(f);
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// perturbation harness
// ---------------------------------------------------------------------------

struct PerturbReport {
    long long gap = 0;
    /// v_0 of the perturbation eta_{i,j} per pair (i, j), i < j
    std::vector<std::tuple<int, int, long long>> eta_valuations;
    VerifyReport at_gap;
    VerifyReport at_next; // informational: tolerance gap+1 may or may not hold
    bool passed() const { return at_gap.passed(); }
};

/// Assumption-3 right-hand side for the pair (i, j) at tolerance T, in v_n
/// units: (p-1) sum_{k<i} p^{n-k-1} b_k + (p^{n-i} - p^{n-j}) b_i + T.
inline long long assumption3_floor(const Tower& tw, int i, int j, long long T) {
    long long s = 0;
    for (int k = 1; k < i; ++k)
        s += (tw.p() - 1) * ipow(tw.p(), tw.n() - k - 1) *
             tw.lower_breaks()[static_cast<size_t>(k - 1)];
    s += (ipow(tw.p(), tw.n() - i) - ipow(tw.p(), tw.n() - j)) *
         tw.lower_breaks()[static_cast<size_t>(i - 1)];
    return s + T;
}

/// Replace each mu_{i,j} (i < j) by mu_{i,j} (1 + eta) with eta the monomial
/// of least valuation representable in K_0 meeting the Assumption-3 floor at
/// tolerance `gap`, rebuild Theta/Psi, and verify the congruence at that
/// tolerance.
inline PerturbReport perturb_and_verify(const Tower& tw, long long gap) {
    if (gap < 1) throw PreconditionViolation("perturbation gap must be >= 1");
    PerturbReport rep;
    rep.gap = gap;
    const int n = tw.n();
    std::vector<Series> mu_p(static_cast<size_t>(n * n), Series::zero(tw.field()));
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const Series& base = tw.mu(i, j);
            size_t at = static_cast<size_t>((i - 1) * n + (j - 1));
            if (j == i) {
                mu_p[at] = base;
                continue;
            }
            long long floor_vn = assumption3_floor(tw, i, j, gap);
            long long e = floor_vn / tw.pn() + (floor_vn % tw.pn() != 0 ? 1 : 0);
            rep.eta_valuations.emplace_back(i, j, e);
            Series eta = Series::monomial_int(tw.field(), 1, e);
            mu_p[at] = base + base * eta;
        }
    Scaffold sc = theta_psi_build_with_mu(
        tw, [&mu_p, n](int i, int j) -> const Series& {
            return mu_p[static_cast<size_t>((i - 1) * n + (j - 1))];
        });
    rep.at_gap = verify_scaffold_tolerance(sc, gap);
    rep.at_next = verify_scaffold_tolerance(sc, gap + 1);
    return rep;
}

// ---------------------------------------------------------------------------
// upper-bound proposition
// ---------------------------------------------------------------------------

struct UpBoundReport {
    int j = 0;
    long long rho_valuation = 0;
    long long bound = 0; // v_n(rho) + p^{n-j} b_j
    ExtInt observed;
    bool bounded = false;  // observed <= bound
    bool equality = false; // observed == bound
};

/// Check v_n(Psi_j rho) <= v_n(rho) + p^{n-j} b_j for rho meeting the residue
/// preconditions v_n(rho) = b_n mod p^{n-j} and
/// v_n(rho) != b_n (1 - p^{n-j}) mod p^{n-j+1}.
inline UpBoundReport up_bound_check(const Scaffold& sc, int j, const TowerElem& rho) {
    const Tower& tw = *sc.tower;
    const int n = tw.n();
    ExtInt vr = tw.valuation(rho);
    if (vr.is_infinite()) throw PreconditionViolation("rho must be nonzero");
    long long r = vr.value();
    long long bn = tw.lower_breaks().back();
    long long q = ipow(tw.p(), n - j);
    if (mod_pos(r, q) != mod_pos(bn, q))
        throw PreconditionViolation("v_n(rho) = b_n mod p^(n-j) fails");
    if (mod_pos(r, q * tw.p()) == mod_pos(bn * (1 - q), q * tw.p()))
        throw PreconditionViolation(
            "v_n(rho) != b_n (1 - p^(n-j)) mod p^(n-j+1) fails");
    UpBoundReport rep;
    rep.j = j;
    rep.rho_valuation = r;
    rep.bound = r + q * tw.lower_breaks()[static_cast<size_t>(j - 1)];
    TowerElem moved = sc.Psi(j).apply(rho);
    rep.observed = tw.valuation(moved);
    rep.bounded = rep.observed <= ExtInt(rep.bound);
    rep.equality = rep.observed == ExtInt(rep.bound);
    return rep;
}

} // namespace scaffold

#endif
