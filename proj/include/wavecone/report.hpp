#pragma once

#include <string>

#include "wavecone/experiments.hpp"

namespace wavecone {

/// Shortest round-trip decimal representation; reports built from these are
/// byte-identical across runs with the same configuration.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

/// CSV with the fixed column set
/// scale,lp_norm,tv_mu,tv_sigma,ratio,cone_max_dist,M_inf.
std::string experiment_csv(const ExperimentReport& rep);

/// JSON mirror of the CSV plus metadata (seed, grid, operator hash, flags).
std::string experiment_json(const ExperimentReport& rep);

} // namespace wavecone
