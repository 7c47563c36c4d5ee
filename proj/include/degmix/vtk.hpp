#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "degmix/fe_space.hpp"

namespace degmix {

/// Legacy ASCII snapshot of a primal field and its multiplier. The primal
/// field is written per vertex (P1 part) for the MINI space and per cell
/// (centroid value and rot) for edge elements; multipliers per vertex.
void write_snapshot(std::ostream& out, const FeSpace& primal, const Eigen::VectorXd& primal_full,
                    const FeSpace& multiplier, const Eigen::VectorXd& multiplier_full,
                    double time);

}  // namespace degmix
