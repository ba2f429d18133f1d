#pragma once

#include <string>

#include "drfb/bounds.hpp"
#include "drfb/synthesis.hpp"

namespace drfb {

std::string gains_to_json(const GainSolution& sol);
void save_gains(const GainSolution& sol, const std::string& path);
GainSolution load_gains(const std::string& path);

std::string bounds_to_json(const BoundReport& rep);
void save_bounds(const BoundReport& rep, const std::string& path);

} // namespace drfb
