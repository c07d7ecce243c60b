#ifndef SCAFFOLD_RANDOM_TOWERS_HPP
#define SCAFFOLD_RANDOM_TOWERS_HPP

#include <random>
#include <vector>

#include "scaffold/tower.hpp"

namespace scaffold {

struct RandomTowerOptions {
    long long p = 2;
    int n = 2;
    long long max_b1 = 7; // b_1 drawn from [1, max_b1], coprime to p
    long long max_m = 1;  // m_k in [0, max_m]
    int tail_terms = 2;   // extra random tail terms per input series
};

/// Random admissible tower data (beta, omegas, eps = 0): b_1 coprime to p,
/// omega valuations nonincreasing, residues within an equal-valuation block
/// F_p-independent. The residue degree d is the least one admitting the
/// longest block.
inline TowerSpec random_admissible_spec(const RandomTowerOptions& opt,
                                        std::mt19937_64& rng) {
    const long long p = opt.p;
    const int n = opt.n;
    std::uniform_int_distribution<long long> b1d(1, opt.max_b1);
    long long b1 = 0;
    do {
        b1 = b1d(rng);
    } while (b1 % p == 0);
    std::uniform_int_distribution<long long> md(0, opt.max_m);
    std::vector<long long> m;
    for (int k = 2; k <= n; ++k) m.push_back(md(rng));

    // omega valuations and block structure
    std::vector<long long> wval(static_cast<size_t>(n), 0);
    for (int i = 1; i < n; ++i)
        wval[static_cast<size_t>(i)] = wval[static_cast<size_t>(i - 1)] - m[static_cast<size_t>(i - 1)];
    int longest_block = 1, cur = 1;
    for (int i = 1; i < n; ++i) {
        cur = wval[static_cast<size_t>(i)] == wval[static_cast<size_t>(i - 1)] ? cur + 1 : 1;
        longest_block = std::max(longest_block, cur);
    }
    const Fq& f = Fq::make(p, longest_block);

    std::uniform_int_distribution<long long> coeffd(0, f.q() - 1);
    std::uniform_int_distribution<long long> unitd(1, p - 1);
    std::uniform_int_distribution<int> taild(0, opt.tail_terms);
    auto random_tail = [&](Series s, long long from_exp) {
        int extra = taild(rng);
        std::vector<std::pair<long long, FqElem>> terms = s.terms();
        for (int k = 0; k < extra; ++k)
            terms.emplace_back(from_exp + 1 + k, f.from_index(coeffd(rng)));
        return Series::from_terms(f, terms);
    };

    TowerSpec sp;
    sp.p = p;
    sp.d = longest_block;
    sp.n = n;
    sp.beta = random_tail(
        Series::monomial(f, f.scalar_mul(f.one(), unitd(rng)), -b1), -b1);

    sp.omegas.push_back(Series::constant_int(f, 1));
    int block_pos = 1; // omega_1 occupies w^0 = 1 in its block
    for (int i = 1; i < n; ++i) {
        if (wval[static_cast<size_t>(i)] == wval[static_cast<size_t>(i - 1)])
            ++block_pos;
        else
            block_pos = 1;
        // within a block take scalar multiples of distinct powers of the
        // generator: independent over F_p by construction
        FqElem lead = f.scalar_mul(f.pow(f.gen(), block_pos - 1), unitd(rng));
        if (f.d() == 1) lead = f.from_int(unitd(rng));
        sp.omegas.push_back(random_tail(
            Series::monomial(f, lead, wval[static_cast<size_t>(i)]),
            wval[static_cast<size_t>(i)]));
    }
    for (int i = 0; i < n; ++i) sp.epsilons.push_back(Series::zero(f));
    return sp;
}

} // namespace scaffold

#endif
