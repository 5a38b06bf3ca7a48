#pragma once

#include <cmath>
#include <vector>

namespace mts {

// Positions and velocities at time t. The mass matrix is the identity, so v is also the momentum.
struct PhaseState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> v;

    std::size_t dimension() const { return x.size(); }

    bool is_finite() const
    {
        for (double q : x)
            if (!std::isfinite(q))
                return false;
        for (double p : v)
            if (!std::isfinite(p))
                return false;
        return std::isfinite(t);
    }

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

using Trajectory = std::vector<PhaseState>;

} // namespace mts
