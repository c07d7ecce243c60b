#ifndef SCAFFOLD_GROUP_ALGEBRA_HPP
#define SCAFFOLD_GROUP_ALGEBRA_HPP

#include <vector>

#include "scaffold/tower.hpp"

namespace scaffold {

/// Element of K_0[G], G = (Z/p)^n generated by sigma_1..sigma_n with
/// sigma_i(x_j) = x_j + delta_ij. Group elements are encoded as integers
/// g in [0, p^n) whose base-p digit i-1 is the exponent of sigma_i.
class GroupAlgebraElem {
public:
    GroupAlgebraElem() : tower_(nullptr) {}
    explicit GroupAlgebraElem(const Tower& tw)
        : tower_(&tw), coef_(static_cast<size_t>(tw.pn()), Series::zero(tw.field())) {}

    static GroupAlgebraElem identity(const Tower& tw) {
        GroupAlgebraElem e(tw);
        e.coef_[0] = Series::constant_int(tw.field(), 1);
        return e;
    }

    /// The generator sigma_i, 1-based.
    static GroupAlgebraElem sigma(const Tower& tw, int i) {
        GroupAlgebraElem e(tw);
        e.coef_[static_cast<size_t>(ipow(tw.p(), i - 1))] =
            Series::constant_int(tw.field(), 1);
        return e;
    }

    /// Tr_{n,j} = sum of the subgroup generated by sigma_{j+1}, ..., sigma_n.
    static GroupAlgebraElem trace(const Tower& tw, int j) {
        GroupAlgebraElem e(tw);
        for (long long g = 0; g < tw.pn(); ++g) {
            bool in_subgroup = true;
            for (int i = 1; i <= j && in_subgroup; ++i)
                if (digit(g, i - 1, tw.p()) != 0) in_subgroup = false;
            if (in_subgroup) e.coef_[static_cast<size_t>(g)] =
                Series::constant_int(tw.field(), 1);
        }
        return e;
    }

    const Tower& tower() const { return *tower_; }
    const Series& entry(long long g) const { return coef_[static_cast<size_t>(g)]; }
    Series& entry(long long g) { return coef_[static_cast<size_t>(g)]; }

    bool is_zero_to_precision() const {
        for (const auto& s : coef_)
            if (!s.is_zero_to_precision()) return false;
        return true;
    }

    friend GroupAlgebraElem operator+(const GroupAlgebraElem& a,
                                      const GroupAlgebraElem& b) {
        check(a, b);
        GroupAlgebraElem r = a;
        for (size_t g = 0; g < r.coef_.size(); ++g) r.coef_[g] = r.coef_[g] + b.coef_[g];
        return r;
    }

    friend GroupAlgebraElem operator-(const GroupAlgebraElem& a) {
        GroupAlgebraElem r = a;
        for (auto& s : r.coef_) s = -s;
        return r;
    }

    friend GroupAlgebraElem operator-(const GroupAlgebraElem& a,
                                      const GroupAlgebraElem& b) {
        return a + (-b);
    }

    friend GroupAlgebraElem operator*(const GroupAlgebraElem& a, const Series& c) {
        GroupAlgebraElem r = a;
        for (auto& s : r.coef_) s = s * c;
        return r;
    }

    friend GroupAlgebraElem operator*(const Series& c, const GroupAlgebraElem& a) {
        return a * c;
    }

    /// Convolution product; exponent vectors add componentwise mod p.
    friend GroupAlgebraElem operator*(const GroupAlgebraElem& a,
                                      const GroupAlgebraElem& b) {
        check(a, b);
        const Tower& tw = *a.tower_;
        GroupAlgebraElem r(tw);
        for (long long g = 0; g < tw.pn(); ++g) {
            if (a.coef_[static_cast<size_t>(g)].is_exact_zero()) continue;
            for (long long h = 0; h < tw.pn(); ++h) {
                if (b.coef_[static_cast<size_t>(h)].is_exact_zero()) continue;
                long long s = group_add(tw, g, h);
                r.coef_[static_cast<size_t>(s)] =
                    r.coef_[static_cast<size_t>(s)] +
                    a.coef_[static_cast<size_t>(g)] * b.coef_[static_cast<size_t>(h)];
            }
        }
        return r;
    }

    /// Linear extension of the Galois action: (sum c_g g) x = sum c_g g(x).
    TowerElem apply(const TowerElem& x) const {
        if (&x.tower() != tower_) throw TowerMismatch();
        TowerElem out(*tower_);
        for (long long g = 0; g < tower_->pn(); ++g) {
            const Series& c = coef_[static_cast<size_t>(g)];
            if (c.is_exact_zero()) continue;
            out = out + tower_->galois_apply(g, x) * c;
        }
        return out;
    }

    static long long group_add(const Tower& tw, long long g, long long h) {
        long long s = 0, pw = 1;
        for (int i = 0; i < tw.n(); ++i) {
            long long dg = digit(g, i, tw.p()) + digit(h, i, tw.p());
            s += (dg % tw.p()) * pw;
            pw *= tw.p();
        }
        return s;
    }

private:
    static void check(const GroupAlgebraElem& a, const GroupAlgebraElem& b) {
        if (a.tower_ != b.tower_ || !a.tower_) throw TowerMismatch();
    }

    const Tower* tower_;
    std::vector<Series> coef_;
};

/// Truncated exponentiation A^{[mu]} = sum_{i=0}^{p-1} binom(mu, i) (A-1)^i.
inline GroupAlgebraElem trunc_exp(const GroupAlgebraElem& a, const Series& mu) {
    const Tower& tw = a.tower();
    GroupAlgebraElem am1 = a - GroupAlgebraElem::identity(tw);
    GroupAlgebraElem pw = GroupAlgebraElem::identity(tw);
    GroupAlgebraElem total(tw);
    for (long long i = 0; i < tw.p(); ++i) {
        total = total + pw * binom_series(mu, i);
        if (i + 1 < tw.p()) pw = pw * am1;
    }
    return total;
}

} // namespace scaffold

#endif
