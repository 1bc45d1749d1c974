#include "goafem/symmetrize.hpp"

#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace goafem {

Vector zarantonello_rhs(const AssembledSystem& system, Problem which, const Vector& w, double delta)
{
  if (delta < 0.0)
    throw std::invalid_argument("zarantonello_rhs: delta must be non-negative");
  if (static_cast<std::size_t>(w.size()) != system.dim())
    throw std::invalid_argument("zarantonello_rhs: dimension mismatch");
  if (which == Problem::Primal)
    return system.A_sym * w + delta * (system.F - system.B * w);
  return system.A_sym * w + delta * (system.G - system.B.transpose() * w);
}

Vector exact_phi(const AssembledSystem& system, Problem which, const Vector& w, double delta)
{
  const Vector rhs = zarantonello_rhs(system, which, w, delta);
  if (rhs.size() == 0)
    return rhs;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Eigen::SparseMatrix<double>(system.A_sym));
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("exact_phi: factorization failed");
  return ldlt.solve(rhs);
}

} // namespace goafem
