#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "mpetdg/study.hpp"

namespace fs = std::filesystem;
using namespace mpetdg;

namespace {

struct GlobalOpts {
  std::string output_dir;
  int threads = 0;
  int seed = -1;
  bool dump_matrices = false;
};

void apply_overrides(RunConfig& cfg, const GlobalOpts& g) {
  if (!g.output_dir.empty()) cfg.output_dir = g.output_dir;
  if (g.seed >= 0) cfg.seed = static_cast<unsigned>(g.seed);
  if (g.threads > 0) Eigen::setNbThreads(g.threads);
}

int cmd_run(const std::string& config_path, const GlobalOpts& g) {
  RunConfig cfg = parse_config(config_path);
  apply_overrides(cfg, g);
  if (cfg.test_case == "custom") {
    std::cerr << "run requires a manufactured test case (tc1_3d or tc2_2d)\n";
    return 1;
  }
  CaseId which = (cfg.params.dim == 3) ? CaseId::TC1_3D : CaseId::TC2_2D;
  ManufacturedCase mcase = manufactured_case(which, cfg.params);
  PolyMesh mesh = build_config_mesh(cfg, cfg.divisions.empty() ? 2 : cfg.divisions.front());

  fs::create_directories(cfg.output_dir);
  const int J = cfg.params.n_networks();
  mesh.classify_all_dirichlet(J);
  DgSpace space_u(mesh, cfg.degree_u, mesh.dim);
  DgSpace space_q(mesh, cfg.degree_p, 1);

  long step_count = 0;
  std::function<void(const TransientState&)> observer;
  if (cfg.fields_stride > 0) {
    observer = [&](const TransientState& s) {
      if (step_count % cfg.fields_stride == 0) {
        auto name = fs::path(cfg.output_dir) / ("fields_" + std::to_string(step_count) + ".vtk");
        write_fields(mesh, space_u, space_q, s.U, s.P, name.string());
      }
      ++step_count;
    };
  }

  RunResult res = run_manufactured(mesh, mcase, cfg.degree_u, cfg.degree_p, cfg.penalty,
                                   cfg.time, observer);
  if (g.dump_matrices) {
    BlockSystem sys = assemble_system(space_u, space_q, cfg.params, cfg.penalty);
    dump_matrix(sys.M_u, (fs::path(cfg.output_dir) / "M_u.txt").string());
    dump_matrix(sys.K_u, (fs::path(cfg.output_dir) / "K_u.txt").string());
    dump_matrix(sys.B, (fs::path(cfg.output_dir) / "B.txt").string());
    dump_matrix(sys.M_p, (fs::path(cfg.output_dir) / "M_p.txt").string());
    dump_matrix(sys.K_p, (fs::path(cfg.output_dir) / "K_p.txt").string());
  }
  write_fields(mesh, space_u, space_q, res.state.U, res.state.P,
               (fs::path(cfg.output_dir) / "fields_final.vtk").string());

  std::cout << "h = " << res.h << "  t = " << res.state.t << "\n";
  std::cout << "err_u_dg = " << res.errors.err_u_dg << "\n";
  std::cout << "err_u_l2 = " << res.errors.err_u_l2 << "\n";
  std::cout << "err_p_l2 = " << res.errors.err_p_l2 << "\n";
  std::cout << "err_p_dg = " << res.errors.err_p_dg << "\n";
  return 0;
}

int cmd_study(const std::string& config_path, const GlobalOpts& g) {
  RunConfig cfg = parse_config(config_path);
  apply_overrides(cfg, g);
  auto rows = run_convergence_study(cfg);
  std::cout << format_rate_table(rows);
  std::cout << "wrote " << (fs::path(cfg.output_dir) / cfg.csv_name).string() << "\n";
  return 0;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  return ok;
}

int cmd_check() {
  bool all = true;
  {
    PolyMesh mesh = build_unit_mesh(3, 2);
    mesh.validate();
    all &= report("2d structured mesh valid", std::abs(mesh.total_measure() - 1.0) < 1e-12);
  }
  {
    PolyMesh mesh = build_unit_mesh(2, 3);
    mesh.validate();
    all &= report("3d structured mesh valid", std::abs(mesh.total_measure() - 1.0) < 1e-12);
  }
  {
    PolyMesh fine = build_unit_mesh(6, 2);
    PolyMesh agg = agglomerate_mesh(fine, 12, 3);
    agg.validate();
    all &= report("agglomeration preserves measure",
                  std::abs(agg.total_measure() - 1.0) < 1e-12);
  }
  {
    PolyMesh mesh = build_unit_mesh(2, 2);
    DgSpace space(mesh, 3, 1);
    SpMat m = assemble_mass(space, 1.0);
    Eigen::MatrixXd dense = Eigen::MatrixXd(m);
    double dev = (dense - Eigen::MatrixXd::Identity(dense.rows(), dense.cols()))
                     .cwiseAbs()
                     .maxCoeff();
    all &= report("basis orthonormality", dev < 1e-10);
  }
  {
    MpetParameters params = tc1_parameters();
    PolyMesh mesh = build_unit_mesh(1, 3);
    mesh.classify_all_dirichlet(params.n_networks());
    DgSpace su(mesh, 1, 3), sq(mesh, 1, 1);
    PenaltyConfig pc;
    BlockSystem sys = assemble_system(su, sq, params, pc);
    auto sym = [](const SpMat& a) {
      return (Eigen::MatrixXd(a) - Eigen::MatrixXd(a).transpose()).cwiseAbs().maxCoeff();
    };
    all &= report("K_u symmetric", sym(sys.K_u) < 1e-10);
    all &= report("M_u symmetric", sym(sys.M_u) < 1e-12);
    Eigen::VectorXd v = Eigen::VectorXd::Random(sys.n_u);
    all &= report("K_u positive semidefinite sample", v.dot(sys.K_u * v) > -1e-10);
  }
  return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"polytopic DG solver for dynamic multi-network poroelasticity"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--output-dir", g.output_dir, "override the configured output directory");
  app.add_option("--threads", g.threads, "internal linear-algebra threads");
  app.add_option("--seed", g.seed, "override the agglomeration seed");
  app.add_flag("--dump-matrices", g.dump_matrices, "write assembled matrices as text");

  std::string run_cfg, study_cfg;
  auto* run = app.add_subcommand("run", "single transient run");
  run->add_option("config", run_cfg, "configuration file")->required();
  auto* study = app.add_subcommand("study", "convergence study sweep");
  study->add_option("config", study_cfg, "configuration file")->required();
  auto* check = app.add_subcommand("check", "run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_cfg, g);
    if (study->parsed()) return cmd_study(study_cfg, g);
    if (check->parsed()) return cmd_check();
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
