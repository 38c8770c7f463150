#ifndef MPETDG_CONFIG_HPP
#define MPETDG_CONFIG_HPP

#include <string>
#include <vector>

#include "mpetdg/assembly.hpp"
#include "mpetdg/timestepper.hpp"

namespace mpetdg {

/// Fully parsed and validated run description.
struct RunConfig {
  std::string test_case; // tc1_3d | tc2_2d | custom

  // mesh: either a structured divisions sweep or a mesh file, optionally
  // agglomerated into polytopic elements
  std::vector<int> divisions;
  std::string mesh_file;
  int agglomerate = 0;
  unsigned seed = 1;

  int degree_u = 1;
  int degree_p = 1;
  std::vector<int> degree_sweep; // p-refinement mode when non-empty

  PenaltyConfig penalty;
  MpetParameters params;
  TimeConfig time;

  std::string output_dir = ".";
  std::string csv_name = "rates.csv";
  int observer_stride = 1;
  int fields_stride = 0; // 0 disables field dumps
};

/// Parses the key-value configuration file. Unknown sections or keys, missing
/// required keys and invalid values are reported with line context.
RunConfig parse_config(const std::string& path);

} // namespace mpetdg

#endif
