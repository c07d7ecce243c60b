#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scaffold/series.hpp"
#include "helpers.hpp"

using namespace scaffold;
using testutil::random_exact_series;
using testutil::random_nonzero_exact_series;
using testutil::random_unit_series;

namespace {

Series t_pow(const Fq& f, long long e) { return Series::monomial_int(f, 1, e); }

} // namespace

TEST_CASE("series basics", "[series]") {
    const Fq& f2 = Fq::make(2, 1);

    SECTION("exact cancellation of leading terms") {
        Series a = t_pow(f2, -1) + Series::constant_int(f2, 1);
        Series b = -t_pow(f2, -1);
        Series s = a + b;
        REQUIRE(s.has_leading());
        REQUIRE(s.val() == 0);
        REQUIRE(s == Series::constant_int(f2, 1));
    }
    SECTION("monomial product") {
        Series s = t_pow(f2, -3) * t_pow(f2, 5);
        REQUIRE(s.valuation() == ExtInt(2));
        REQUIRE(s.is_exact());
    }
    SECTION("valuation of t^-7 + t") {
        Series s = t_pow(f2, -7) + t_pow(f2, 1);
        REQUIRE(s.valuation() == ExtInt(-7));
    }
    SECTION("exact zero has infinite valuation") {
        REQUIRE(Series::zero(f2).valuation().is_infinite());
    }
    SECTION("(1+t) - 1 - t is exactly zero via exact tracking") {
        Series one = Series::constant_int(f2, 1);
        Series s = (one + t_pow(f2, 1)) - one - t_pow(f2, 1);
        REQUIRE(s.is_exact_zero());
        REQUIRE(s.valuation().is_infinite());
    }
    SECTION("indeterminate window raises on valuation query") {
        Series ind = Series::indeterminate(f2, 10);
        REQUIRE_THROWS_AS(ind.valuation(), IndeterminateValuation);
        REQUIRE(ind.valuation_at_least(10));
        REQUIRE(ind.valuation_at_least(-3));
        REQUIRE_THROWS_AS(ind.valuation_at_least(11), PrecisionInsufficient);
    }
    SECTION("field mismatch") {
        const Fq& f3 = Fq::make(3, 1);
        REQUIRE_THROWS_AS(t_pow(f2, 0) + t_pow(f3, 0), FieldMismatch);
    }
}

TEST_CASE("precision propagation", "[series]") {
    const Fq& f2 = Fq::make(2, 1);
    Series a = Series::from_terms(f2, {{0, f2.one()}, {3, f2.one()}}, 10);
    Series b = Series::from_terms(f2, {{-2, f2.one()}}, 5);

    SECTION("add takes min precision") {
        REQUIRE((a + b).prec() == ExtInt(5));
    }
    SECTION("mul precision rule") {
        Series ab = a * b;
        // min(prec_a + val_b, prec_b + val_a) = min(10-2, 5+0) = 5
        REQUIRE(ab.prec() == ExtInt(5));
        REQUIRE(ab.val() == -2);
    }
    SECTION("inverse mirrors mul so a * inv(a) = 1 to reported precision") {
        Series ia = inv(a);
        REQUIRE(ia.prec() == ExtInt(10)); // prec - 2 val = 10
        Series prod = a * ia;
        REQUIRE(prod.coeff(0) == f2.one());
        for (long long e = 1; e < prod.prec_raw(); ++e)
            REQUIRE(f2.is_zero(prod.coeff(e)));
    }
    SECTION("truncation") {
        Series tr = a.truncated(2);
        REQUIRE(tr.prec() == ExtInt(2));
        REQUIRE(tr.coeff(0) == f2.one());
    }
}

TEST_CASE("inverse of 1+t over F2 is the full geometric series", "[series]") {
    const Fq& f2 = Fq::make(2, 1);
    Series a = Series::constant_int(f2, 1) + t_pow(f2, 1);
    Series ia = inv(a, 32);
    REQUIRE(ia.prec() == ExtInt(32));
    for (long long e = 0; e < 32; ++e)
        REQUIRE(ia.coeff(e) == f2.one()); // 1/(1+t) = 1+t+t^2+... mod 2
    Series prod = a * ia;
    REQUIRE(prod.coeff(0) == f2.one());
    for (long long e = 1; e < prod.prec_raw(); ++e)
        REQUIRE(f2.is_zero(prod.coeff(e)));
    REQUIRE_THROWS_AS(inv(Series::zero(f2)), DivideByZero);
}

TEST_CASE("Artin-Schreier map", "[series]") {
    const Fq& f2 = Fq::make(2, 1);
    const Fq& f3 = Fq::make(3, 1);

    SECTION("wp(t^-1) over F2") {
        Series s = wp(t_pow(f2, -1));
        REQUIRE(s == t_pow(f2, -2) + t_pow(f2, -1));
    }
    SECTION("wp kills the prime field") {
        REQUIRE(wp(Series::constant_int(f3, 1)).is_exact_zero());
        REQUIRE(wp(Series::constant_int(f3, 2)).is_exact_zero());
    }
    SECTION("dominant p-th power: v(wp(a)) = p v(a) for v(a) < 0") {
        Series a = t_pow(f3, -3) + Series::constant_int(f3, 2);
        REQUIRE(wp(a).valuation() == ExtInt(-9));
    }
}

TEST_CASE("series properties on random samples", "[series][property]") {
    std::mt19937_64 rng(20240817);
    for (auto [p, d] : std::vector<std::pair<long long, int>>{{2, 1}, {3, 2}}) {
        const Fq& f = Fq::make(p, d);
        for (int i = 0; i < 100; ++i) {
            Series a = random_nonzero_exact_series(f, rng);
            Series b = random_nonzero_exact_series(f, rng);
            Series c = random_exact_series(f, rng);
            // valuation axioms
            REQUIRE((a * b).valuation() ==
                    ExtInt(a.val() + b.val()));
            ExtInt vsum = (a + b).valuation().is_infinite()
                              ? ExtInt::infinity()
                              : (a + b).valuation();
            REQUIRE(vsum >= ExtInt(std::min(a.val(), b.val())));
            if (a.val() != b.val())
                REQUIRE(vsum == ExtInt(std::min(a.val(), b.val())));
            // ring identities, exact
            REQUIRE((a * (b + c)) == (a * b + a * c));
            REQUIRE((a * b) == (b * a));
            // wp is additive in characteristic p
            REQUIRE(wp(a + b) == (wp(a) + wp(b)));
        }
        // inverse round trip on units
        for (int i = 0; i < 100; ++i) {
            Series u = random_unit_series(f, rng);
            Series prod = u * inv(u, 48);
            REQUIRE((prod - Series::constant_int(f, 1)).is_zero_to_precision());
        }
    }
}

TEST_CASE("powers", "[series]") {
    const Fq& f3 = Fq::make(3, 1);
    Series a = t_pow(f3, -1) + Series::constant_int(f3, 1);
    SECTION("repeated squaring matches naive products") {
        Series naive = Series::constant_int(f3, 1);
        for (int k = 0; k <= 5; ++k) {
            REQUIRE(pow(a, k) == naive);
            naive = naive * a;
        }
    }
    SECTION("negative exponents go through the inverse") {
        Series m = Series::monomial_int(f3, 2, 4);
        REQUIRE(pow(m, -3) == Series::monomial(f3, f3.inv(f3.from_int(8)), -12));
        Series r = pow(a, -2, 24) * pow(a, 2);
        REQUIRE((r - Series::constant_int(f3, 1)).is_zero_to_precision());
    }
}

TEST_CASE("binomial coefficients of series", "[series]") {
    const Fq& f3 = Fq::make(3, 1);
    Series mu = t_pow(f3, -1) + Series::constant_int(f3, 2);
    REQUIRE(binom_series(mu, 0) == Series::constant_int(f3, 1));
    REQUIRE(binom_series(mu, 1) == mu);
    // binom(mu,2) = mu(mu-1)/2; over F3, 1/2 = 2
    Series expect = (mu * (mu - Series::constant_int(f3, 1))).scalar_int(2);
    REQUIRE(binom_series(mu, 2) == expect);
    REQUIRE(binom_series(mu, -1).is_exact_zero());
    REQUIRE_THROWS_AS(binom_series(mu, 3), Error);
}
