#pragma once

// σ-models on SU(2)/U(1) ≅ S² in reduced form. Lie-algebra values are
// coordinates in 𝔰𝔲(2) ≅ ℝ³ with basis e₁, e₂, e₃ identified with the
// imaginary quaternion units i, j, k, so [a, b] = 2 a × b is the quaternion
// commutator. The subalgebra is 𝔥 = span(e₃) and 𝔪 = span(e₁, e₂).

#include <cstddef>
#include <functional>
#include <vector>

#include "unred/quaternion.hpp"
#include "unred/vec.hpp"

namespace unred {

struct LieValue {
  Vec3 c;

  LieValue m_part() const noexcept { return {{c.x, c.y, 0.0}}; }
  LieValue h_part() const noexcept { return {{0.0, 0.0, c.z}}; }

  friend constexpr bool operator==(const LieValue&, const LieValue&) = default;
};

inline LieValue operator+(const LieValue& a, const LieValue& b) noexcept { return {a.c + b.c}; }
inline LieValue operator-(const LieValue& a, const LieValue& b) noexcept { return {a.c - b.c}; }
inline LieValue operator*(double s, const LieValue& a) noexcept { return {s * a.c}; }
inline LieValue bracket(const LieValue& a, const LieValue& b) noexcept { return {2.0 * cross(a.c, b.c)}; }
inline double norm(const LieValue& a) noexcept { return norm(a.c); }

/// The two components ς_t, ς_x of a 𝔤-valued 1-form on the unit square,
/// sampled on an (M_x+1)×(M_t+1) grid. Node (i, j) sits at x = i/M_x, t = j/M_t.
class LieField {
 public:
  /// Throws ShapeMismatch unless both arrays have (M_x+1)(M_t+1) entries and M_x, M_t ≥ 2.
  LieField(std::size_t mx, std::size_t mt, std::vector<LieValue> sigma_t, std::vector<LieValue> sigma_x);

  std::size_t mx() const noexcept { return mx_; }
  std::size_t mt() const noexcept { return mt_; }
  double dx() const noexcept { return 1.0 / static_cast<double>(mx_); }
  double dt() const noexcept { return 1.0 / static_cast<double>(mt_); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * (mt_ + 1) + j; }

  const LieValue& t(std::size_t i, std::size_t j) const noexcept { return sigma_t_[index(i, j)]; }
  const LieValue& x(std::size_t i, std::size_t j) const noexcept { return sigma_x_[index(i, j)]; }

  static LieField constant(std::size_t mx, std::size_t mt, const LieValue& st, const LieValue& sx);
  static LieField sample(std::size_t mx, std::size_t mt, const std::function<LieValue(double x, double t)>& st,
                         const std::function<LieValue(double x, double t)>& sx);

 private:
  std::size_t mx_;
  std::size_t mt_;
  std::vector<LieValue> sigma_t_;
  std::vector<LieValue> sigma_x_;
};

/// Node array matching a LieField; boundary entries are zero.
struct LieArray {
  std::size_t mx = 0;
  std::size_t mt = 0;
  std::vector<LieValue> values;

  const LieValue& at(std::size_t i, std::size_t j) const noexcept { return values[i * (mt + 1) + j]; }
  double max_norm() const noexcept;
};

/// ∂_t(ς_t)_𝔪 + ∂_x(ς_x)_𝔪 + [(ς_t)_𝔥, (ς_t)_𝔪] + [(ς_x)_𝔥, (ς_x)_𝔪] at interior nodes.
LieArray ep_residual(const LieField& field);

/// ∂_t ς_x − ∂_x ς_t + [ς_t, ς_x] at interior nodes.
LieArray flatness_residual(const LieField& field);

/// Grid of g with g⁻¹ dg = ς and g(0, 0) = g0, by RK4 along grid lines.
struct Reconstruction {
  std::size_t mx = 0;
  std::size_t mt = 0;
  std::vector<UnitQuaternion> g;        // x-line from the origin, then t-lines
  double path_disagreement = 0.0;       // max |g − g'| against t-line, then x-lines

  const UnitQuaternion& at(std::size_t i, std::size_t j) const noexcept { return g[i * (mt + 1) + j]; }
};

/// Throws FlatnessError if the two path orders disagree by more than `tolerance`.
Reconstruction reconstruct(const LieField& field, const UnitQuaternion& g0, double tolerance = 1e-6);

/// Projection G → G/H ≅ S² constant on left cosets gH, H = exp(𝔥):
/// hopf_project(g·u) with u = (1 − j)/√2, which carries e₃ to the fibre direction i.
Vec3 coset_project(const UnitQuaternion& g);

/// max_j |(p_{j+1} − 2p_j + p_{j−1})/Δ² + |ṗ_j|² p_j| over interior samples,
/// ṗ by central differences. Zero for a uniformly sampled great circle up to O(Δ²).
double geodesic_residual(const std::vector<Vec3>& points, double spacing);

/// True when [e₃, 𝔪] ⊆ 𝔪 for the structure constants in use.
bool reductive_identity_holds() noexcept;

}  // namespace unred
