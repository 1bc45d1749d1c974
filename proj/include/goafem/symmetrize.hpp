#pragma once

#include "goafem/fem.hpp"

namespace goafem {

/// Right-hand side of the Zarantonello correction problem
///   a(Phi(w), v) = a(w, v) + delta [F(v) - b(w, v)]        (primal)
///   a(v, Phi(w)) = a(v, w) + delta [G(v) - b(v, w)]        (dual)
/// as a load vector: A w + delta (F - B w), resp. A w + delta (G - B^T w).
/// Throws std::invalid_argument if delta < 0 or on dimension mismatch.
Vector zarantonello_rhs(const AssembledSystem& system, Problem which, const Vector& w, double delta);

/// Phi(delta; w) by a direct SPD solve. Test oracle and diagnostics only.
Vector exact_phi(const AssembledSystem& system, Problem which, const Vector& w, double delta);

} // namespace goafem
