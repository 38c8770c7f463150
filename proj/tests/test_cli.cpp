#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpetdg/study.hpp"

using namespace mpetdg;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "mpetdg_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("reference config parses") {
  fs::path p = temp_file("tc1.ini");
  write_text(p, R"(# 3D four-network convergence setup
[case]
test_case = tc1_3d

[mesh]
divisions = 2 4
seed = 3

[space]
degree_u = 2
degree_p = 1

[penalty]
eta0 = 10

[time]
dt = 1e-5
t_end = 5e-3

[output]
dir = /tmp
csv = table.csv
)");
  RunConfig cfg = parse_config(p.string());
  CHECK(cfg.test_case == "tc1_3d");
  CHECK(cfg.divisions == std::vector<int>{2, 4});
  CHECK(cfg.degree_u == 2);
  CHECK(cfg.degree_p == 1);
  CHECK(cfg.params.n_networks() == 4);
  CHECK(cfg.params.lambda == 1.0);
  CHECK(cfg.time.dt == 1e-5);
  CHECK(cfg.time.t_end == 5e-3);
  CHECK(cfg.penalty.eta0 == 10.0);
  CHECK(cfg.csv_name == "table.csv");
  CHECK(cfg.seed == 3u);
}

TEST_CASE("custom physics with zero storage is rejected") {
  fs::path p = temp_file("bad_storage.ini");
  write_text(p, R"([case]
test_case = custom

[physics]
dim = 2
rho = 1
lambda = 1
mu = 1
networks = 2
alpha = 0.25
c = 0
k = 1
nu = 1
beta_1_2 = 1

[mesh]
divisions = 2

[space]
degree_u = 1
degree_p = 1

[time]
dt = 1e-3
t_end = 1e-2
)");
  CHECK_THROWS_WITH_AS(parse_config(p.string()), doctest::Contains("c_j"),
                       std::invalid_argument);
}

TEST_CASE("missing dt is reported by name") {
  fs::path p = temp_file("no_dt.ini");
  write_text(p, R"([case]
test_case = tc1_3d

[mesh]
divisions = 2

[space]
degree_u = 1
degree_p = 1

[time]
t_end = 1e-2
)");
  CHECK_THROWS_WITH_AS(parse_config(p.string()), doctest::Contains("dt"), std::runtime_error);
}

TEST_CASE("unknown keys are rejected with line context") {
  fs::path p = temp_file("unknown_key.ini");
  write_text(p, R"([case]
test_case = tc1_3d

[mesh]
divisions = 2
typo_key = 5

[space]
degree_u = 1
degree_p = 1

[time]
dt = 1e-3
t_end = 1e-2
)");
  try {
    parse_config(p.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("typo_key") != std::string::npos);
    CHECK(msg.find(":6") != std::string::npos); // the offending line
  }
}

TEST_CASE("duplicate keys and missing mesh spec are rejected") {
  fs::path p = temp_file("dup.ini");
  write_text(p, R"([case]
test_case = tc1_3d
test_case = tc2_2d
)");
  CHECK_THROWS_WITH_AS(parse_config(p.string()), doctest::Contains("duplicate"),
                       std::runtime_error);

  fs::path q = temp_file("nomesh.ini");
  write_text(q, R"([case]
test_case = tc1_3d

[mesh]

[space]
degree_u = 1
degree_p = 1

[time]
dt = 1e-3
t_end = 1e-2
)");
  CHECK_THROWS_WITH_AS(parse_config(q.string()), doctest::Contains("divisions"),
                       std::runtime_error);
}

TEST_CASE("mesh file round trip") {
  PolyMesh fine = build_unit_mesh(3, 2);
  PolyMesh m = agglomerate_mesh(fine, 4, 9);
  fs::path p = temp_file("round.mesh");
  write_mesh(m, p.string());
  PolyMesh back = read_mesh(p.string());
  REQUIRE(back.n_vertices() == m.n_vertices());
  REQUIRE(back.n_elements() == m.n_elements());
  for (int v = 0; v < m.n_vertices(); ++v)
    CHECK((back.vertices[v] - m.vertices[v]).norm() < 1e-12);
  CHECK(back.total_measure() == doctest::Approx(m.total_measure()).epsilon(1e-12));
  CHECK(back.n_faces() == m.n_faces());
  back.validate();
}

TEST_CASE("field file cell law and zero state") {
  PolyMesh m = build_unit_mesh(2, 2);
  m.classify_all_dirichlet(2);
  DgSpace su(m, 1, 2);
  DgSpace sq(m, 1, 1);
  Eigen::VectorXd U = Eigen::VectorXd::Zero(su.n_dofs());
  Eigen::VectorXd P = Eigen::VectorXd::Zero(2 * sq.n_dofs());
  fs::path p = temp_file("fields.vtk");
  write_fields(m, su, sq, U, P, p.string());

  std::string text = read_text(p);
  int n_cells_expected = 0;
  for (const auto& e : m.elements) n_cells_expected += static_cast<int>(e.sub_simplices.size());

  std::istringstream iss(text);
  std::string tok;
  int n_cells = -1;
  bool in_scalars = false;
  bool all_zero = true;
  std::string line;
  while (std::getline(iss, line)) {
    std::istringstream ls(line);
    ls >> tok;
    if (tok == "CELLS") {
      ls >> n_cells;
    } else if (tok == "SCALARS") {
      in_scalars = true;
    } else if (tok == "LOOKUP_TABLE") {
      continue;
    } else if (in_scalars && !line.empty() && (isdigit(line[0]) || line[0] == '-')) {
      std::istringstream vs(line);
      double v;
      while (vs >> v)
        if (v != 0.0) all_zero = false;
    }
  }
  CHECK(n_cells == n_cells_expected);
  CHECK(all_zero);
}

TEST_CASE("convergence study CSV is deterministic") {
  RunConfig cfg;
  cfg.test_case = "tc2_2d"; // 2D manufactured case with hand-set parameters
  cfg.divisions = {1, 2};
  cfg.degree_u = 1;
  cfg.degree_p = 1;
  cfg.params.dim = 2;
  cfg.params.rho = 1.0;
  cfg.params.lambda = 1.0;
  cfg.params.mu = 1.0;
  cfg.params.networks.resize(2);
  for (auto& n : cfg.params.networks) {
    n.alpha = 0.25;
    n.storage = 0.1;
    n.permeability = Eigen::Matrix3d::Identity();
    n.viscosity = 1.0;
  }
  cfg.params.beta = Eigen::MatrixXd::Zero(2, 2);
  cfg.params.beta(0, 1) = cfg.params.beta(1, 0) = 1.0;
  cfg.time.dt = 0.05;
  cfg.time.t_end = 0.1;
  fs::path dir = temp_file("study_out");
  fs::create_directories(dir);
  cfg.output_dir = dir.string();
  cfg.csv_name = "rates.csv";

  run_convergence_study(cfg);
  std::string first = read_text(dir / "rates.csv");
  run_convergence_study(cfg);
  std::string second = read_text(dir / "rates.csv");
  CHECK(!first.empty());
  CHECK(first == second);
  CHECK(first.rfind("h,err_u_dg,roc_u,err_p_l2,roc_p", 0) == 0);
}

TEST_CASE("empty mesh description fails before assembly") {
  RunConfig cfg;
  cfg.test_case = "tc2_2d";
  cfg.params.dim = 2;
  cfg.params.rho = 1.0;
  cfg.params.lambda = 1.0;
  cfg.params.mu = 1.0;
  cfg.params.networks.resize(2);
  for (auto& n : cfg.params.networks) {
    n.alpha = 0.25;
    n.storage = 0.1;
    n.permeability = Eigen::Matrix3d::Identity();
    n.viscosity = 1.0;
  }
  cfg.params.beta = Eigen::MatrixXd::Zero(2, 2);
  cfg.time.dt = 0.05;
  cfg.time.t_end = 0.1;
  cfg.divisions = {};
  CHECK_THROWS(run_convergence_study(cfg));
}
