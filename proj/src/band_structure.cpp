#include "jacobiwvn/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

namespace {

constexpr double kEdgeTol = 1e-12;

double trace_at(const PeriodicOperator& op, double lambda) {
    return monodromy(op, lambda).trace;
}

// Bisect f(lambda) = tr M -+ 2 on a sign-change bracket.
double bisect_edge(const PeriodicOperator& op, double lo, double hi, double level) {
    double flo = trace_at(op, lo) - level;
    for (int it = 0; it < 200 && hi - lo > kEdgeTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = trace_at(op, mid) - level;
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Newton on tr' for an extremum bracketed by a derivative sign change; returns
// the refined location, or the bisection answer if Newton wanders.
double refine_extremum(const PeriodicOperator& op, double lo, double hi) {
    double dlo = trace_derivative(op, lo);
    for (int it = 0; it < 200 && hi - lo > kEdgeTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dmid = trace_derivative(op, mid);
        if ((dlo <= 0.0) == (dmid <= 0.0)) {
            lo = mid;
            dlo = dmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct EdgeSet {
    std::vector<double> points;  // sorted |tr| = 2 locations (tangencies repeated once)
};

EdgeSet scan_edges(const PeriodicOperator& op, double lo, double hi, int grid) {
    EdgeSet edges;
    std::vector<double> x(grid + 1), tr(grid + 1);
    const double h = (hi - lo) / grid;
    for (int i = 0; i <= grid; ++i) {
        x[i] = lo + h * i;
        tr[i] = trace_at(op, x[i]);
    }
    for (int i = 0; i < grid; ++i) {
        for (const double level : {-2.0, 2.0}) {
            const double f0 = tr[i] - level, f1 = tr[i + 1] - level;
            if (f0 == 0.0) edges.points.push_back(x[i]);
            if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0))
                edges.points.push_back(bisect_edge(op, x[i], x[i + 1], level));
        }
    }
    if (trace_at(op, hi) == 2.0 || trace_at(op, hi) == -2.0) edges.points.push_back(hi);
    // Tangential touch points: interior extrema of tr whose value sits on +-2
    // produce no sign change, catch them through the derivative.
    for (int i = 1; i < grid; ++i) {
        const double d0 = trace_derivative(op, x[i - 1]);
        const double d1 = trace_derivative(op, x[i]);
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
            const double ext = refine_extremum(op, x[i - 1], x[i]);
            const double val = trace_at(op, ext);
            if (std::abs(std::abs(val) - 2.0) < 1e-9) {
                // Keep only genuine tangencies (no crossing already recorded nearby).
                bool near_existing = false;
                for (const double p : edges.points)
                    if (std::abs(p - ext) < 1e-7) near_existing = true;
                if (!near_existing) edges.points.push_back(ext);
            }
        }
    }
    std::sort(edges.points.begin(), edges.points.end());
    edges.points.erase(std::unique(edges.points.begin(), edges.points.end(),
                                   [](double u, double v) { return std::abs(u - v) < 1e-10; }),
                       edges.points.end());
    return edges;
}

bool same_edges(const EdgeSet& a, const EdgeSet& b) {
    if (a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (std::abs(a.points[i] - b.points[i]) > 1e-9) return false;
    return true;
}

}  // namespace

std::vector<Band> find_bands(const PeriodicOperator& op, double lo, double hi, int grid) {
    if (!(lo < hi)) throw ValidationError("find_bands: need lo < hi");
    if (grid < 16) throw ValidationError("find_bands: grid too small");

    // Stabilise the edge set under grid refinement before trusting it.
    EdgeSet edges = scan_edges(op, lo, hi, grid);
    int g = grid;
    for (int round = 0; round < 4; ++round) {
        const EdgeSet finer = scan_edges(op, lo, hi, g * 2);
        if (same_edges(edges, finer)) break;
        edges = finer;
        g *= 2;
        if (round == 3)
            throw NumericalError("bands unresolved at grid " + std::to_string(g));
    }

    // Segment midpoints decide ellipticity; closed elliptic runs become bands.
    std::vector<double> cuts;
    cuts.push_back(lo);
    cuts.insert(cuts.end(), edges.points.begin(), edges.points.end());
    cuts.push_back(hi);
    std::vector<Band> bands;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a < 1e-11) continue;
        const double mid = 0.5 * (a + b);
        if (std::abs(trace_at(op, mid)) < 2.0) {
            Band band;
            band.index = static_cast<int>(bands.size());
            band.lo = a;
            band.hi = b;
            const double t1 = quasi_momentum(op, a + 0.25 * (b - a));
            const double t3 = quasi_momentum(op, a + 0.75 * (b - a));
            band.theta_direction =
                t3 > t1 ? ThetaDirection::Increasing : ThetaDirection::Decreasing;
            bands.push_back(band);
        }
    }
    return bands;
}

std::vector<Band> find_bands(const PeriodicOperator& op, int grid) {
    const double lo = op.min_b() - 1.0 - 2.0 * op.max_a();
    const double hi = op.max_b() + 1.0 + 2.0 * op.max_a();
    return find_bands(op, lo, hi, grid);
}

double quasi_momentum(const PeriodicOperator& op, double lambda) {
    const double tr = trace_at(op, lambda);
    if (std::abs(tr) > 2.0 + 1e-9)
        throw DomainError("quasi_momentum: lambda = " + std::to_string(lambda) +
                          " is outside the bands (|tr| = " + std::to_string(std::abs(tr)) + ")");
    return std::acos(std::clamp(tr / 2.0, -1.0, 1.0));
}

double invert_theta(const PeriodicOperator& op, const Band& band, double theta_target) {
    if (!(theta_target > 0.0 && theta_target < M_PI))
        throw DomainError("invert_theta: target must lie in (0, pi)");
    double lo = band.lo, hi = band.hi;
    const bool increasing = band.theta_direction == ThetaDirection::Increasing;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double th = quasi_momentum(op, mid);
        if (std::abs(th - theta_target) < 1e-12 || hi - lo < 1e-15 * std::max(1.0, std::abs(mid)))
            return mid;
        const bool go_right = increasing ? (th < theta_target) : (th > theta_target);
        if (go_right)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void require_interior(const PeriodicOperator& op, const SpectralPoint& pt, double guard) {
    if (pt.cls != PointClass::Elliptic || !pt.theta)
        throw DomainError("lambda = " + std::to_string(pt.lambda) +
                          " is not an interior band point");
    const double th = *pt.theta;
    if (std::min(th, M_PI - th) < guard)
        throw DomainError("lambda = " + std::to_string(pt.lambda) +
                          " is too close to a band edge (theta margin " +
                          std::to_string(std::min(th, M_PI - th)) + " < " +
                          std::to_string(guard) + ")");
    (void)op;
}

}  // namespace jacobiwvn
