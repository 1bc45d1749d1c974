#include <gtest/gtest.h>

#include "goafem/lagrange.hpp"
#include "support.hpp"

using namespace goafem;
using goafem::testing::h1_error;
using goafem::testing::laplace;
using goafem::testing::random_vector;
using goafem::testing::share;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

} // namespace

TEST(Quadrature, TriangleRuleExactness)
{
  for (int degree = 1; degree <= 8; ++degree) {
    const auto& rule = triangle_rule(degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (const auto& q : rule)
          sum += q.weight * std::pow(q.ref.x(), a) * std::pow(q.ref.y(), b);
        EXPECT_NEAR(sum, factorial(a) * factorial(b) / factorial(a + b + 2), 1e-14)
          << "degree " << degree << " monomial " << a << "," << b;
      }
  }
}

TEST(Quadrature, IntervalRuleExactness)
{
  for (int degree = 0; degree <= 10; ++degree)
    for (int a = 0; a <= degree; ++a) {
      double sum = 0.0;
      for (const auto& q : interval_rule(degree))
        sum += q.weight * std::pow(q.ref.x(), a);
      EXPECT_NEAR(sum, 1.0 / (a + 1), 1e-14);
    }
}

class Lagrange : public ::testing::TestWithParam<int> {};

TEST_P(Lagrange, NodalBasisProperties)
{
  const auto& ref = reference_element(GetParam());
  const int p = GetParam();
  EXPECT_EQ(ref.num_basis(), (p + 1) * (p + 2) / 2);
  for (int j = 0; j < ref.num_basis(); ++j) {
    const auto phi = ref.values(ref.nodes()[j]);
    for (int i = 0; i < ref.num_basis(); ++i)
      EXPECT_NEAR(phi(i), i == j ? 1.0 : 0.0, 1e-12);
  }
  const Point x(0.21, 0.33);
  EXPECT_NEAR(ref.values(x).sum(), 1.0, 1e-13);
  EXPECT_NEAR(ref.gradients(x).colwise().sum().norm(), 0.0, 1e-12);

  // derivatives against central differences
  const double h = 1e-5;
  const Eigen::MatrixX2d g = ref.gradients(x);
  const Eigen::MatrixX3d H = ref.hessians(x);
  const Point ex(h, 0), ey(0, h);
  const Eigen::VectorXd dx = (ref.values(x + ex) - ref.values(x - ex)) / (2 * h);
  const Eigen::VectorXd dy = (ref.values(x + ey) - ref.values(x - ey)) / (2 * h);
  EXPECT_LT((g.col(0) - dx).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((g.col(1) - dy).cwiseAbs().maxCoeff(), 1e-8);
  const Eigen::MatrixX2d gxp = ref.gradients(x + ex), gxm = ref.gradients(x - ex);
  const Eigen::MatrixX2d gyp = ref.gradients(x + ey), gym = ref.gradients(x - ey);
  EXPECT_LT((H.col(0) - (gxp.col(0) - gxm.col(0)) / (2 * h)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((H.col(1) - (gxp.col(1) - gxm.col(1)) / (2 * h)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((H.col(2) - (gyp.col(1) - gym.col(1)) / (2 * h)).cwiseAbs().maxCoeff(), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Degrees, Lagrange, ::testing::Values(1, 2, 3));

TEST(FeSpace, DimensionsOnTheSquare)
{
  const auto square = share(initial_mesh(Domain::UnitSquare));
  EXPECT_EQ(build_space(square, 1)->dim(), 0u);
  EXPECT_EQ(build_space(square, 2)->dim(), 1u);
  // p=3: two nodes on the diagonal, one interior node per triangle
  EXPECT_EQ(build_space(square, 3)->dim(), 4u);
  const auto refined = share(refine_uniform(*square, 1));
  EXPECT_EQ(build_space(refined, 1)->dim(), 1u);
  EXPECT_THROW(build_space(square, 4), std::invalid_argument);
  EXPECT_THROW(build_space(square, 0), std::invalid_argument);
}

TEST(FeSpace, NeumannNodesAreFree)
{
  const auto z = share(initial_mesh(Domain::ZShape));
  const auto space = build_space(z, 1);
  // the Dirichlet part holds the vertices on y = 0 and y = x with x <= 0
  std::size_t dirichlet = 0;
  for (const auto& v : z->vertices())
    if ((std::abs(v.y()) < 1e-14 && v.x() <= 1e-14) || (std::abs(v.x() - v.y()) < 1e-14 && v.x() <= 1e-14))
      ++dirichlet;
  EXPECT_EQ(dirichlet, 5u);
  EXPECT_EQ(space->dim(), z->num_vertices() - dirichlet);
}

TEST(FeSpace, SharedEdgeNodesAgree)
{
  // p=3 edge nodes must sit at the same physical points from both sides
  const auto m = share(refine_uniform(initial_mesh(Domain::ZShape), 1));
  const auto space = build_space(m, 3);
  const auto& ref = space->reference();
  for (int t = 0; t < static_cast<int>(m->num_elements()); ++t) {
    const ElementMap map(*m, t);
    const auto nodes = space->element_nodes(t);
    for (int i = 0; i < ref.num_basis(); ++i)
      EXPECT_NEAR((map.to_physical(ref.nodes()[i]) - space->node_point(nodes[i])).norm(), 0.0, 1e-14);
  }
}

TEST(Assemble, LaplaceIsSymmetricAndEqualsStiffness)
{
  const auto m = share(refine_uniform(initial_mesh(Domain::ZShape), 2));
  for (int p = 1; p <= 3; ++p) {
    const auto sys = assemble(build_space(m, p), laplace());
    EXPECT_LT(Eigen::MatrixXd(sys.B - sys.A_sym).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(Eigen::MatrixXd(sys.A_sym - SparseMatrix(sys.A_sym.transpose())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Assemble, HatFunctionEnergy)
{
  // 8 right triangles with legs 1/2 around the only free vertex: |grad phi| = 2
  const auto m = share(refine_uniform(initial_mesh(Domain::UnitSquare), 2));
  const auto sys = assemble(build_space(m, 1), laplace());
  ASSERT_EQ(sys.dim(), 1u);
  Vector phi(1);
  phi << 1.0;
  EXPECT_NEAR(energy_norm(sys, phi) * energy_norm(sys, phi), 4.0, 1e-13);
  EXPECT_EQ(energy_norm(sys, Vector(Vector::Zero(1))), 0.0);
}

TEST(Assemble, OneDofGalerkinValue)
{
  // 4 triangles around the centre: a(phi,phi) = 4, F(phi) = pyramid volume 1/3
  const auto m = share(refine_uniform(initial_mesh(Domain::UnitSquare), 1));
  const auto sys = assemble(build_space(m, 1), laplace());
  ASSERT_EQ(sys.dim(), 1u);
  EXPECT_NEAR(sys.A_sym.coeff(0, 0), 4.0, 1e-13);
  EXPECT_NEAR(sys.F(0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(solve_direct(sys, Problem::Primal)(0), 1.0 / 12.0, 1e-14);
}

TEST(Assemble, EmptySystem)
{
  const auto sys = assemble(build_space(share(initial_mesh(Domain::UnitSquare)), 1), laplace());
  EXPECT_EQ(sys.dim(), 0u);
  EXPECT_EQ(solve_direct(sys, Problem::Primal).size(), 0);
  EXPECT_EQ(goal_value(sys, Vector(0), Vector(0)), 0.0);
}

TEST(Assemble, BenchmarkOneIsNonsymmetric)
{
  const auto spec = make_benchmark(BenchmarkId::GoalSingularity);
  const auto sys = assemble(build_space(share(refine_uniform(benchmark_mesh(spec), 2)), 1), spec.data);
  EXPECT_GT(Eigen::MatrixXd(sys.B - SparseMatrix(sys.B.transpose())).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(Eigen::MatrixXd(sys.A_sym - SparseMatrix(sys.A_sym.transpose())).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(sys.A_sym)};
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(Assemble, ConvectionReactionEntries)
{
  // b = (1, 0), c = 2 on the 1-dof mesh: int phi d_x phi = 0 by symmetry
  auto data = laplace();
  data.convection = [](const Point&) { return Vec2(1.0, 0.0); };
  data.reaction = [](const Point&) { return 2.0; };
  const auto m = share(refine_uniform(initial_mesh(Domain::UnitSquare), 1));
  const auto sys = assemble(build_space(m, 1), data);
  // int phi^2 over the pyramid: 4 * |T| / 6 with |T| = 1/4
  EXPECT_NEAR(sys.B.coeff(0, 0), 4.0 + 2.0 * (1.0 / 6.0), 1e-13);
}

TEST(DirectSolve, ResidualAndOrthogonality)
{
  const auto spec = make_benchmark(BenchmarkId::GoalSingularity);
  const auto sys = assemble(build_space(share(refine_uniform(benchmark_mesh(spec), 3)), 2), spec.data);
  const Vector u = solve_direct(sys, Problem::Primal);
  const Vector z = solve_direct(sys, Problem::Dual);
  EXPECT_LE((sys.B * u - sys.F).norm(), 1e-12 * sys.F.norm());
  EXPECT_LE((sys.B.transpose() * z - sys.G).norm(), 1e-12 * sys.G.norm());
  EXPECT_LE((sys.B * u - sys.F).cwiseAbs().maxCoeff(), 1e-10 * sys.F.norm());
}

TEST(GoalValue, ExactPrimalMakesDualIrrelevant)
{
  const auto spec = make_benchmark(BenchmarkId::ZShapeConvection);
  const auto sys = assemble(build_space(share(refine_uniform(benchmark_mesh(spec), 1)), 1), spec.data);
  const Vector u = solve_direct(sys, Problem::Primal);
  const double reference = sys.G.dot(u);
  std::mt19937 rng(3);
  for (int i = 0; i < 5; ++i) {
    const Vector z = random_vector(sys.dim(), rng);
    EXPECT_NEAR(goal_value(sys, u, z), reference, 1e-10 * std::abs(reference));
  }
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.dim()));
  EXPECT_EQ(goal_value(sys, zero, zero), 0.0);
  EXPECT_THROW(goal_value(sys, Vector(2), zero), std::invalid_argument);
}

TEST(EnergyNorm, Homogeneity)
{
  const auto sys = assemble(build_space(share(refine_uniform(initial_mesh(Domain::ZShape), 1)), 2), laplace());
  std::mt19937 rng(11);
  const Vector v = random_vector(sys.dim(), rng);
  EXPECT_NEAR(energy_norm(sys, Vector(2.0 * v)), 2.0 * energy_norm(sys, v), 1e-12 * energy_norm(sys, v));
  EXPECT_THROW(energy_norm(sys, Vector(3)), std::invalid_argument);
}

TEST(Prolongation, ExactEmbedding)
{
  const auto coarse = share(refine_uniform(initial_mesh(Domain::ZShape), 1));
  std::mt19937 rng(5);
  std::vector<int> marked;
  for (int t = 0; t < static_cast<int>(coarse->num_elements()); t += 3)
    marked.push_back(t);
  const auto fine = share(refine(*coarse, marked));
  for (int p = 1; p <= 3; ++p) {
    const auto cs = build_space(coarse, p), fs = build_space(fine, p);
    const auto csys = assemble(cs, laplace()), fsys = assemble(fs, laplace());
    const Vector v = random_vector(cs->dim(), rng);
    const Vector w = prolongation(*cs, *fs) * v;
    EXPECT_NEAR(energy_norm(fsys, w), energy_norm(csys, v), 1e-10 * energy_norm(csys, v));
    // pointwise agreement at random points of fine elements
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int t = 0; t < static_cast<int>(fine->num_elements()); t += 7) {
      double a = u01(rng), b = u01(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      const Point x = ElementMap(*fine, t).to_physical(Point(a, b));
      EXPECT_NEAR(evaluate(*fs, w, t, x), evaluate(*cs, v, fine->parent()[t], x), 1e-12);
    }
  }
}

TEST(Convergence, UniformRefinementReducesErrorMonotonically)
{
  const auto spec = make_benchmark(BenchmarkId::GoalSingularity);
  auto mesh = benchmark_mesh(spec);
  double previous = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 5; ++level) {
    const auto space = build_space(share(mesh), 1);
    const auto sys = assemble(space, spec.data);
    const double err = h1_error(*space, solve_direct(sys, Problem::Primal), spec.exact_gradient);
    EXPECT_LE(err, previous * 1.05);
    if (level > 0)
      EXPECT_LT(err, previous);
    previous = err;
    mesh = refine_uniform(mesh, 2);
  }
  // first-order rate: four uniform bisection rounds reached h/4
  EXPECT_LT(previous, 0.05);
}
