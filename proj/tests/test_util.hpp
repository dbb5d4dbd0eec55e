#pragma once

#include <random>
#include <vector>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/operator_core.hpp"

namespace jacobiwvn::testutil {

inline PeriodicOperator random_operator(std::mt19937_64& rng, int max_period) {
    std::uniform_int_distribution<int> period(1, max_period);
    std::uniform_real_distribution<double> off(0.3, 2.5);
    std::uniform_real_distribution<double> diag(-1.5, 1.5);
    const int t = period(rng);
    std::vector<double> a(t), b(t);
    for (int i = 0; i < t; ++i) a[i] = off(rng);
    for (int i = 0; i < t; ++i) b[i] = diag(rng);
    return PeriodicOperator(a, b);
}

// A point well inside the widest band (quarter of the way from lo).
inline double interior_lambda(const PeriodicOperator& op) {
    const std::vector<Band> bands = find_bands(op);
    const Band* widest = &bands.front();
    for (const Band& band : bands)
        if (band.hi - band.lo > widest->hi - widest->lo) widest = &band;
    return widest->lo + 0.25 * (widest->hi - widest->lo);
}

}  // namespace jacobiwvn::testutil
