#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scaffold/ramification.hpp"

using namespace scaffold;

TEST_CASE("break conversions", "[numeric]") {
    SECTION("lower to upper, p=2 n=2") {
        auto r = profile_from_lower(2, 2, CharMode::char_0, 5, {1, 9});
        REQUIRE(r.upper == std::vector<long long>{1, 5});
        REQUIRE(r.jumps.has_value());
        REQUIRE(*r.jumps == std::vector<long long>{2});
    }
    SECTION("jump form") {
        auto r = profile_from_jumps(2, 2, CharMode::char_p, ExtInt::infinity(), 3, {1});
        REQUIRE(r.lower == std::vector<long long>{3, 7});
        REQUIRE(r.upper == std::vector<long long>{3, 5});
    }
    SECTION("single-break tower") {
        auto r = profile_from_lower(3, 3, CharMode::char_0, 9, {1, 1, 1});
        REQUIRE(r.upper == std::vector<long long>{1, 1, 1});
    }
    SECTION("non-integral upper breaks") {
        REQUIRE_THROWS_AS(profile_from_lower(2, 2, CharMode::char_0, 5, {1, 2}),
                          NonIntegralUpperBreaks);
    }
    SECTION("order violations") {
        REQUIRE_THROWS_AS(profile_from_lower(2, 2, CharMode::char_0, 5, {9, 1}),
                          OrderViolation);
        REQUIRE_THROWS_AS(profile_from_lower(2, 2, CharMode::char_0, 5, {-1, 3}),
                          OrderViolation);
        REQUIRE_THROWS_AS(profile_from_jumps(2, 2, CharMode::char_0, 5, 3, {-1}),
                          OrderViolation);
    }
}

TEST_CASE("round trips on random admissible profiles", "[numeric][property]") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long long> pd(0, 2);
    const long long primes[] = {2, 3, 5};
    int checked = 0;
    while (checked < 1000) {
        long long p = primes[pd(rng)];
        int n = 1 + static_cast<int>(rng() % 3);
        std::uniform_int_distribution<long long> b1d(1, 40);
        long long b1 = b1d(rng);
        if (b1 % p == 0) continue;
        // increments divisible by p^i keep the upper breaks integral
        std::vector<long long> lower{b1};
        for (int i = 1; i < n; ++i)
            lower.push_back(lower.back() + ipow(p, i) * static_cast<long long>(rng() % 5));
        auto r = profile_from_lower(p, n, CharMode::char_0, 50, lower);
        auto r2 = profile_from_upper(p, n, CharMode::char_0, 50, r.upper);
        REQUIRE(r2.lower == r.lower);
        if (r.jumps) {
            auto r3 = profile_from_jumps(p, n, CharMode::char_0, 50, r.lower[0], *r.jumps);
            REQUIRE(r3.lower == r.lower);
            REQUIRE(r3.upper == r.upper);
        }
        // the sequence C_0 < C_1 < ... < C_n is strictly increasing
        for (int i = 0; i < n; ++i) REQUIRE(r.C[i] < r.C[i + 1]);
        // C_i = u_{i+1} - b_{i+1}/p^i for i < n
        for (int i = 0; i < n; ++i)
            REQUIRE(r.C[i] == Rational(r.upper[i]) - Rational(r.lower[i], ipow(p, i)));
        if (r.a2()) {
            // Hasse-Arf plus: integers pairwise congruent mod p
            for (int i = 1; i < n; ++i)
                REQUIRE(mod_pos(r.upper[i] - r.upper[0], p) == 0);
        }
        ++checked;
    }
}

TEST_CASE("assumption checks", "[numeric]") {
    SECTION("b=(3,7), p=2, n=2") {
        auto r = profile_from_lower(2, 2, CharMode::char_0, 4, {3, 7});
        auto rep = check_assumptions(r, nullptr, 3);
        REQUIRE(rep.a1);
        REQUIRE(rep.a2);
        REQUIRE(r.C == std::vector<Rational>{Rational(0), Rational(3, 2), Rational(13, 4)});
        REQUIRE(rep.a6); // v_0(2) = 4 >= 13/4 + 3/4
        auto r2 = profile_from_lower(2, 2, CharMode::char_0, 3, {3, 7});
        REQUIRE_FALSE(check_assumptions(r2, nullptr, 3).a6);
        // gap table at T=3: g(1,2) = 2*3 - 1*3 + 3 = 6
        bool found = false;
        for (auto& [i, j, g] : rep.a3_gap)
            if (i == 1 && j == 2) {
                REQUIRE(g == 6);
                found = true;
            }
        REQUIRE(found);
    }
    SECTION("weakly ramified profile") {
        auto r = profile_from_lower(3, 2, CharMode::char_0, 3, {1, 1});
        std::vector<ExtInt> eps{ExtInt(0), ExtInt(0)};
        auto rep = check_assumptions(r, &eps, 1);
        REQUIRE(rep.a1);
        REQUIRE(rep.a2);
        REQUIRE(rep.a4);
        REQUIRE(rep.a5.has_value());
        REQUIRE(*rep.a5);
    }
    SECTION("A1 failure") {
        auto r = profile_from_lower(2, 1, CharMode::char_0, 3, {2});
        REQUIRE_FALSE(check_assumptions(r).a1);
    }
}

TEST_CASE("tolerances", "[numeric]") {
    SECTION("degree p") {
        auto t = tolerance_degree_p(3, 1, 1);
        REQUIRE(t.available);
        REQUIRE(t.value == ExtInt(1));
        REQUIRE_FALSE(tolerance_degree_p(3, 1, 2).available);
        REQUIRE(tolerance_degree_p(3, ExtInt::infinity(), 1).value.is_infinite());
        REQUIRE_THROWS_AS(tolerance_degree_p(3, 1, 3), FamilyPreconditionViolation);
    }
    SECTION("weakly ramified") {
        auto t = tolerance_weakly_ramified(2, 2, 1);
        REQUIRE(t.available);
        REQUIRE(t.value == ExtInt(1));
        REQUIRE(tolerance_weakly_ramified(3, 2, 2).value == ExtInt(10));
    }
    SECTION("biquadratic") {
        auto t = tolerance_biquadratic(3, 7, 4);
        REQUIRE(t.available);
        REQUIRE(t.value == ExtInt(3));
        REQUIRE_FALSE(tolerance_biquadratic(3, 7, 3).available);
    }
    SECTION("elem_ab matches biquadratic on b=(3,7)") {
        auto r = profile_from_lower(2, 2, CharMode::char_0, 4, {3, 7});
        auto t = tolerance_elem_ab(r);
        REQUIRE(t.available);
        REQUIRE(t.value == ExtInt(3));
    }
    SECTION("abrashkin") {
        auto t = tolerance_abrashkin(2, 2, 3, 1);
        REQUIRE(t.available);
        REQUIRE(t.value == ExtInt(9));
    }
}

TEST_CASE("freeness verdicts", "[numeric]") {
    SECTION("martel") {
        auto v = freeness_martel(1, 1, 1);
        REQUIRE(v.status == FreeStatus::Free); // 3 <= 7
        REQUIRE(freeness_martel(3, 3, 2).status == FreeStatus::NotFree); // 9 > 5
        REQUIRE_THROWS_AS(freeness_martel(1, 3, 5), FamilyPreconditionViolation);
    }
    SECTION("biquadratic ideal: spec example") {
        // b1 = 3 mod 4, h = 1 mod 4, 2b1+b2 = 13, v = 5: T = 7 >= L1 = 6
        auto v = freeness_biquadratic_ideal(3, 7, 1, 5);
        REQUIRE(v.status == FreeStatus::NotFree);
    }
    SECTION("biquadratic ideal: T below gate is undetermined") {
        auto v = freeness_biquadratic_ideal(3, 7, 1, 4); // T = 3 < 6
        REQUIRE(v.status == FreeStatus::Undetermined);
    }
    SECTION("martel agreement except the documented boundary") {
        for (long long v02 = 2; v02 <= 8; ++v02)
            for (long long b1 = 1; b1 <= 11; b1 += 2)
                for (long long b2 = b1; b2 <= b1 + 16; b2 += 4) {
                    if (2 * b1 + b2 > 6 * v02 - 3) continue;
                    auto m = freeness_martel(b1, b2, v02);
                    auto q = freeness_biquadratic_ideal(b1, b2, 0, v02);
                    if (2 * b1 + b2 == 4 * v02 + 3 && mod_pos(b1, 4) == 1) {
                        REQUIRE(m.status == FreeStatus::Free);
                        REQUIRE(q.status == FreeStatus::Undetermined);
                    } else if (q.status != FreeStatus::Undetermined) {
                        REQUIRE(m.status == q.status);
                    }
                }
    }
    SECTION("weak ideal, p=3 n=2") {
        std::vector<long long> free_h;
        for (long long h = 0; h < 9; ++h)
            if (freeness_weak_ideal(3, 2, 3, h).status == FreeStatus::Free)
                free_h.push_back(h);
        REQUIRE(free_h == std::vector<long long>{0, 1, 6, 7, 8});
        REQUIRE_THROWS_AS(freeness_weak_ideal(3, 2, 2, 0), FamilyPreconditionViolation);
    }
    SECTION("abrashkin") {
        REQUIRE(freeness_abrashkin(2, 2, 9, 1).status == FreeStatus::Free);
        REQUIRE(freeness_abrashkin(2, 2, 9, 3).status == FreeStatus::Free);
        for (long long u : {1, 2, 4, 8})
            REQUIRE(freeness_abrashkin(3, 2, 9, u).status == FreeStatus::Free);
        for (long long u : {5, 7})
            REQUIRE(freeness_abrashkin(3, 2, 9, u).status == FreeStatus::NotFree);
        // n = 3, residue dividing no p^m-1: only a sufficient criterion
        REQUIRE(freeness_abrashkin(3, 3, 20, 5).status == FreeStatus::Undetermined);
        REQUIRE_THROWS_AS(freeness_abrashkin(3, 2, 1, 7), FamilyPreconditionViolation);
    }
}

TEST_CASE("different and trace valuations", "[numeric]") {
    SECTION("constant breaks, j = 0") {
        auto dt = different_and_trace(2, 2, {3, 3}, 0, 0);
        REQUIRE(dt.m == 12);
    }
    SECTION("j = 1 subextension") {
        auto dt = different_and_trace(2, 2, {3, 3}, 1, 5);
        REQUIRE(dt.m == 4);
        REQUIRE(dt.s_r == (4 + 5) / 2);
    }
    SECTION("degree p different") {
        auto dt = different_and_trace(2, 1, {1}, 0, 0);
        REQUIRE(dt.m == 2);
    }
    SECTION("simplified expansion agrees under Assumption 2") {
        for (long long r = -9; r <= 9; ++r) {
            auto dt = different_and_trace(2, 3, {3, 11, 27}, 0, r);
            REQUIRE(dt.simplified_applicable);
            REQUIRE(dt.simplified_agrees);
            auto dt1 = different_and_trace(2, 3, {3, 11, 27}, 1, r);
            REQUIRE(dt1.simplified_agrees);
        }
    }
}
