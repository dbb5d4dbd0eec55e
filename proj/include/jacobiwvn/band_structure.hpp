#pragma once

#include <vector>

#include "jacobiwvn/operator_core.hpp"

namespace jacobiwvn {

enum class ThetaDirection { Increasing, Decreasing };

// Closed elliptic interval [lo, hi]; the quasi-momentum runs monotonically over
// (0, pi) on its interior.  Interior parabolic touching points split a band into
// two records sharing an endpoint.
struct Band {
    int index{};
    double lo{}, hi{};
    ThetaDirection theta_direction{ThetaDirection::Increasing};
};

// Scan [lo, hi] on `grid` points for |tr M| <= 2 regions; edges refined by
// bisection to 1e-12, tangential touch points by Newton on the trace derivative.
// The scan is re-run at doubled resolution until the edge set stabilises;
// failure to stabilise raises NumericalError("bands unresolved at grid N").
std::vector<Band> find_bands(const PeriodicOperator& op, double lo, double hi,
                             int grid = 4096);

// Default search interval [min b - 1 - 2 max a, max b + 1 + 2 max a].
std::vector<Band> find_bands(const PeriodicOperator& op, int grid = 4096);

// theta(lambda) = arccos(tr M / 2) in [0, pi], clamped at the band edges.
// Non-elliptic interior points raise DomainError.
double quasi_momentum(const PeriodicOperator& op, double lambda);

// Solve theta(lambda) = theta_target inside `band` by bisection (|theta - target|
// < 1e-12).  target must lie in (0, pi).
double invert_theta(const PeriodicOperator& op, const Band& band, double theta_target);

// Edge-proximity guard shared by downstream resonance work: requires
// min(theta, pi - theta) >= guard, else DomainError.
void require_interior(const PeriodicOperator& op, const SpectralPoint& pt,
                      double guard = 1e-4);

}  // namespace jacobiwvn
