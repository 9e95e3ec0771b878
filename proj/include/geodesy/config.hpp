#pragma once

// Plain-text key=value configuration for the experiment harness.

#include <iosfwd>
#include <map>
#include <string>

#include "geodesy/experiments.hpp"

namespace geodesy {

using KeyValues = std::map<std::string, std::string>;

/// One `key = value` per line; blank lines and lines starting with '#' are ignored.
/// Throws InvalidInput on a line without '='.
KeyValues read_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

/// Applies recognised keys on top of `base` and validates the result; unknown keys are rejected.
/// Keys: surface, mode, sizes, radii, repeats, pairs, landmarks, landmark_margin, seed, output,
/// tangent_scale, net_scale, max_edge_scale, perturb_radius, repair_rounds, mesh_seed, timing.
ExperimentConfig experiment_config(const KeyValues& values, ExperimentConfig base = {});

/// Later entries win: merge(file, flags) lets command-line flags override the file.
KeyValues merge(KeyValues low, const KeyValues& high);

}  // namespace geodesy
