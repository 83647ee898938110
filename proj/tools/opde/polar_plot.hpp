#pragma once

#include <string>

#include "opde/dist/distribution.hpp"

namespace opde::cli {

/// Polar plot of a pose distribution: one closed curve per reflection (solid
/// red for 0, dashed green for 1), radius proportional to probability.
std::string polar_plot_svg(const dist::PoseDistribution& d, const std::string& title = {});

}  // namespace opde::cli
