#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "aicc/linalg.hpp"
#include "aicc/random.hpp"

namespace aicc {

/// The four target matrix functions.
enum class Problem { eigenvalues, eigenvector, exponential, determinant };

/// Short CLI names: eig, eigvec, expm, det.
std::string_view to_string(Problem p);
Problem parse_problem(std::string_view name);

/// Training cost applied to (prediction, target).
enum class CostKind {
  euclidean,          ///< ||f_hat - f||
  unit_norm_penalty,  ///< ||f_hat - f|| + 5 (||f_hat|| - 1)^2
};

/// Binds a problem to its input sampler, exact oracle and cost.
class ProblemSpec {
 public:
  ProblemSpec(Problem id, std::size_t m);

  Problem id() const noexcept { return id_; }
  std::size_t m() const noexcept { return m_; }
  /// M for eigenvalues/eigenvector, M^2 for the exponential, 1 for the determinant.
  std::size_t output_dim() const noexcept;
  CostKind cost_kind() const noexcept;

  Matrix sample(Rng& rng) const;
  /// vec(f(X)); eigenvalues ascending, eigenvector sign-normalized.
  Vector target(const Matrix& x) const;

 private:
  Problem id_;
  std::size_t m_;
};

/// X = (A + A^T)/2, A uniform on [-1,1]^{MxM}.
Matrix sample_p1(Rng& rng, std::size_t m);
/// X = (A + A^T)/2, A uniform on [0,1]^{MxM}.
Matrix sample_p2(Rng& rng, std::size_t m);
/// X = A / ||A||_op, A uniform on [0,1]^{MxM}.
Matrix sample_p3(Rng& rng, std::size_t m);
/// X = I - E, E zero-diagonal with off-diagonals uniform on [-2/M, 2/M].
Matrix sample_p4(Rng& rng, std::size_t m);

/// Where an instance's random stream comes from.
struct SeedCoords {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t batch = 0;
  std::uint64_t instance = 0;

  friend bool operator==(const SeedCoords&, const SeedCoords&) = default;
};

/// One K-tuple of inputs with exact targets attached.
struct Instance {
  std::vector<Matrix> inputs;
  std::vector<Vector> targets;
  SeedCoords coords;
};

inline constexpr int kMaxResampleAttempts = 100;

/// Draws one instance from its own substream. Inputs whose oracle is
/// degenerate are redrawn up to kMaxResampleAttempts times before
/// DegenerateInput propagates.
Instance make_instance(const ProblemSpec& problem, std::size_t k, const SeedCoords& coords);

/// batch_size independent instances for (seed, epoch, batch).
std::vector<Instance> make_batch(const ProblemSpec& problem, std::size_t k,
                                 std::size_t batch_size, std::uint64_t seed,
                                 std::uint64_t epoch, std::uint64_t batch);

/// CSV dump: one row per instance with seed coordinates, then the
/// column-major inputs and targets of each of the K slots.
void write_dataset_csv(std::ostream& out, std::span<const Instance> instances);

}  // namespace aicc
