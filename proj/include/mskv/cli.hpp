#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mskv/model.hpp"

namespace mskv::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string subcommand;
  std::string model_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  std::vector<std::string> overrides;

  std::optional<double> sigma_scale;
  double sigma_from = 0.2;
  double sigma_to = 2.0;
  int steps = 46;
  std::optional<double> sigma;  // linstab: single sigma instead of a scan
  bool scan = false;            // linstab: --sigma-from/--sigma-to given

  std::vector<int> N;
  int reps = 64;
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 100;
  bool pairwise = false;
  double bandwidth = 0.0;
  double checkpoint = 0.5;  // free-energy sampling interval

  std::optional<double> grid_halfwidth;
  std::optional<int> grid_n;
  std::optional<std::vector<double>> pqr;
};

const std::vector<std::string>& subcommands();

/// FNV-1a 64 of the canonical model JSON.
std::uint64_t model_hash(const ModelSpec& spec);

/// "# meta: ..." line (no trailing newline).
std::string meta_line(const RunConfig& cfg, const ModelSpec* spec, const std::string& extra = "");

/// Executes one subcommand; returns 0, 2 (validation) or 3 (numerical).
int run(const RunConfig& cfg);

/// Parses argv with CLI11 and calls run.
int main(int argc, char** argv);

}  // namespace mskv::cli
