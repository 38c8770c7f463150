#ifndef MPETDG_STUDY_HPP
#define MPETDG_STUDY_HPP

#include "mpetdg/analysis.hpp"
#include "mpetdg/config.hpp"
#include "mpetdg/mesh_io.hpp"

namespace mpetdg {

struct RunResult {
  double h = 0.0;
  ErrorReport errors;
  TransientState state; // at t_end
};

/// Full pipeline on one mesh: spaces, assembly, transient run, error report
/// against the manufactured solution of the case. The mesh is tagged
/// all-Dirichlet for every field.
RunResult run_manufactured(PolyMesh& mesh, const ManufacturedCase& mcase, int degree_u,
                           int degree_p, const PenaltyConfig& pc, const TimeConfig& tc,
                           const std::function<void(const TransientState&)>& observer = {});

/// Builds the mesh described by the config (structured divisions entry or
/// file, optionally agglomerated).
PolyMesh build_config_mesh(const RunConfig& cfg, int divisions);

/// h-refinement mode (divisions list, fixed degrees) or p-refinement mode
/// (degree_sweep on a fixed mesh). Writes the CSV artifact and returns the
/// rows. Failed sweep points are recorded with NaN errors and the sweep
/// continues.
std::vector<ConvergenceRow> run_convergence_study(const RunConfig& cfg);

} // namespace mpetdg

#endif
