#pragma once

#include "omaxcones/cones.hpp"
#include "omaxcones/matcore.hpp"

namespace omaxcones {

enum class NormMethod { Spectral, NumericalRadius, Bisection };

const char* to_string(NormMethod m);

struct NormReport {
  double value = 0.0;
  NormMethod method = NormMethod::Spectral;
  int iterations = 0;
  double lower = 0.0;
  double upper = 0.0;
  int undetermined_steps = 0;  // cone tests that could not decide (bisection only)
};

/// Order norm of (M_n, M_n^+, I): the spectral norm of a hermitian matrix.
NormReport order_norm(const ComplexMatrix& h);

/// Minimal norm sup{|s(v)| : s a state}, i.e. the numerical radius. The
/// bracket is certified: lower from points of the numerical range, upper from
/// a polygon of support lines enclosing it.
NormReport min_norm(const ComplexMatrix& v, double tol = 1e-10);

/// [[I, v/t], [v^*/t, I]] as an element of M_2(M_n).
BlockElement dec_norm_element(const ComplexMatrix& v, double t);

/// Decomposition norm by bisection on t with the maximal-cone test of
/// dec_norm_element(v, t). Undetermined verdicts never move the bracket.
NormReport dec_norm(const ComplexMatrix& v, double tol = 1e-10, SearchBudget budget = {});

}  // namespace omaxcones
