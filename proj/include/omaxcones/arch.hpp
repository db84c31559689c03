#pragma once
// Archimedeanization of finite-dimensional ordered spaces presented in real
// coordinates, either by a generator list or by a membership oracle.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omaxcones/matcore.hpp"

namespace omaxcones {

using RealVector = std::vector<double>;
using ConeOracle = std::function<bool(std::span<const double>)>;

struct GeneratedCone {
  std::size_t dim = 0;
  std::vector<RealVector> generators;  // conic hull presentation
  ConeOracle oracle;                   // membership presentation; preferred when set
  std::string oracle_name;             // "lexicographic2", "psd<n>" or empty
  RealVector unit;

  bool has_oracle() const { return static_cast<bool>(oracle); }
};

/// {(x, y): y > 0} u {(x, 0): x >= 0} with unit (0, 1); not closed.
GeneratedCone lexicographic_cone();

/// PSD cone of n x n hermitians in orthonormal coordinates with unit I.
/// With as_oracle the cone is presented by is_psd, otherwise by pure states.
GeneratedCone psd_cone(std::size_t n, bool as_oracle);

/// "lexicographic2" or "psd<n>"; throws InvalidInput otherwise.
GeneratedCone builtin_cone(const std::string& name);

/// Orthonormal real coordinates of an n x n hermitian (Hilbert-Schmidt).
RealVector hermitian_coords(const ComplexMatrix& h);
ComplexMatrix from_hermitian_coords(std::span<const double> c, std::size_t n);

/// Pure states e_i, (e_i + e_j)/sqrt2, (e_i + i e_j)/sqrt2 and their minus
/// variants; their projectors span the n x n hermitians.
std::vector<std::vector<cplx>> spanning_pure_states(std::size_t n);

bool cone_contains(const GeneratedCone& c, std::span<const double> x, double tol = 1e-9);

/// cone n -cone = {0}, checked on the generators (oracle cones: on sampled boundary points).
bool is_pointed(const GeneratedCone& c);

/// Spot-check that every sampled v has some r with r e - v in the cone.
bool order_unit_check(const GeneratedCone& c, int samples, std::uint64_t seed);

/// Generators for the LPs: the list itself, or boundary points u + r* e of an
/// oracle cone with r* found by bisection.
std::vector<RealVector> working_generators(const GeneratedCone& c, std::uint64_t seed);

/// Sampled extreme states s(e) = 1, s(g) >= 0; samples = 0 means 64 dim.
/// Throws EmptyStateSpace when infeasible.
std::vector<RealVector> compute_states(const GeneratedCone& c, std::size_t samples = 0, std::uint64_t seed = 0);

/// Orthonormal basis of the common kernel of the rows.
std::vector<RealVector> null_space(const std::vector<RealVector>& rows, std::size_t dim, double rel_tol = 1e-12);

/// Common kernel of the sampled states.
std::vector<RealVector> compute_N(const GeneratedCone& c, std::size_t samples = 0, std::uint64_t seed = 0);

/// Level-n cone on M_n(V)_h = (M_n)_h (x) V_h generated by p p^* (x) g.
GeneratedCone level_cone(const GeneratedCone& c, std::size_t n, std::uint64_t seed = 0);

/// Coordinates of a (x) v in M_n(V)_h for hermitian coordinates a and v.
RealVector level_vector(std::span<const double> a, std::span<const double> v);

struct LevelCheck {
  std::size_t level = 1;
  std::size_t null_dim = 0;
  std::size_t expected_dim = 0;
  double max_annihilation = 0.0;  // max |s(x)| over level states and M_n(N) basis elements
  bool ok = false;
};

/// Level-n kernel check: dim N_n = n^2 dim N and M_n(N) is annihilated.
LevelCheck check_level(const GeneratedCone& c, const std::vector<RealVector>& n_basis, std::size_t level,
                       std::uint64_t seed = 0);

struct ClosureTest {
  bool passed = false;
  std::optional<double> first_failure;
};

/// 1, 1/2, ..., 2^-20.
std::vector<double> default_r_schedule();

/// r e + a in the cone for every r in the schedule. At finite precision this
/// is a semi-decision for the Archimedean closure.
ClosureTest arch_closure_test(std::span<const double> a, const GeneratedCone& c, std::span<const double> schedule = {});

struct ArchResult {
  std::vector<RealVector> n_basis;
  std::size_t quotient_dim = 0;
  GeneratedCone quotient_cone;
  RealVector quotient_unit;
  std::vector<RealVector> complement;  // orthonormal basis of N^perp; quotient coordinates
  std::vector<RealVector> states;
  double max_state_on_n = 0.0;
  double universal_deviation = 0.0;  // sampled unital positive maps into M_2 vs their quotient factorization
  std::vector<LevelCheck> levels;

  RealVector project(std::span<const double> x) const;
  RealVector lift(std::span<const double> y) const;
};

ArchResult archimedeanize(const GeneratedCone& c, std::uint64_t seed = 0, std::size_t samples = 0);

}  // namespace omaxcones
