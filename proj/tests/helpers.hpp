#ifndef SCAFFOLD_TEST_HELPERS_HPP
#define SCAFFOLD_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "scaffold/residue_field.hpp"
#include "scaffold/series.hpp"

namespace testutil {

using scaffold::Fq;
using scaffold::FqElem;
using scaffold::Series;

inline FqElem random_elem(const Fq& f, std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> dist(0, f.p() - 1);
    FqElem e = f.zero();
    for (int i = 0; i < f.d(); ++i) e[i] = static_cast<int32_t>(dist(rng));
    return e;
}

inline FqElem random_nonzero_elem(const Fq& f, std::mt19937_64& rng) {
    for (;;) {
        FqElem e = random_elem(f, rng);
        if (!f.is_zero(e)) return e;
    }
}

/// Random exact (finitely supported) series with valuation in [vmin, vmax]
/// and up to max_terms nonzero terms.
inline Series random_exact_series(const Fq& f, std::mt19937_64& rng,
                                  long long vmin = -8, long long vmax = 8,
                                  int max_terms = 5) {
    std::uniform_int_distribution<long long> vdist(vmin, vmax);
    std::uniform_int_distribution<int> tdist(1, max_terms);
    std::uniform_int_distribution<long long> gap(0, 4);
    long long e = vdist(rng);
    std::vector<std::pair<long long, FqElem>> terms;
    int nterms = tdist(rng);
    terms.emplace_back(e, random_nonzero_elem(f, rng));
    for (int i = 1; i < nterms; ++i) {
        e += 1 + gap(rng);
        terms.emplace_back(e, random_elem(f, rng));
    }
    return Series::from_terms(f, terms);
}

inline Series random_nonzero_exact_series(const Fq& f, std::mt19937_64& rng,
                                          long long vmin = -8, long long vmax = 8,
                                          int max_terms = 5) {
    for (;;) {
        Series s = random_exact_series(f, rng, vmin, vmax, max_terms);
        if (!s.is_exact_zero()) return s;
    }
}

/// Random unit of the valuation ring (valuation 0).
inline Series random_unit_series(const Fq& f, std::mt19937_64& rng,
                                 int max_terms = 5) {
    std::vector<std::pair<long long, FqElem>> terms;
    terms.emplace_back(0, random_nonzero_elem(f, rng));
    std::uniform_int_distribution<int> tdist(0, max_terms - 1);
    std::uniform_int_distribution<long long> gap(1, 3);
    long long e = 0;
    int extra = tdist(rng);
    for (int i = 0; i < extra; ++i) {
        e += gap(rng);
        terms.emplace_back(e, random_elem(f, rng));
    }
    return Series::from_terms(f, terms);
}

} // namespace testutil

#endif
