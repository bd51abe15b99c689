#include "aicc/datagen.hpp"

#include <ostream>
#include <string>

#include "aicc/errors.hpp"

namespace aicc {

namespace {

Matrix symmetrized_uniform(Rng& rng, std::size_t m, double lo, double hi) {
  Matrix a(m, m);
  for (double& v : a.data()) v = rng.uniform(lo, hi);
  Matrix x(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) x(i, j) = 0.5 * (a(i, j) + a(j, i));
  return x;
}

}  // namespace

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::eigenvalues:
      return "eig";
    case Problem::eigenvector:
      return "eigvec";
    case Problem::exponential:
      return "expm";
    case Problem::determinant:
      return "det";
  }
  return "?";
}

Problem parse_problem(std::string_view name) {
  if (name == "eig") return Problem::eigenvalues;
  if (name == "eigvec") return Problem::eigenvector;
  if (name == "expm") return Problem::exponential;
  if (name == "det") return Problem::determinant;
  throw FormatError("unknown problem '" + std::string(name) + "' (expected eig|eigvec|expm|det)");
}

ProblemSpec::ProblemSpec(Problem id, std::size_t m) : id_(id), m_(m) {
  if (m == 0) throw DimensionError("matrix dimension must be positive");
}

std::size_t ProblemSpec::output_dim() const noexcept {
  switch (id_) {
    case Problem::eigenvalues:
    case Problem::eigenvector:
      return m_;
    case Problem::exponential:
      return m_ * m_;
    case Problem::determinant:
      return 1;
  }
  return 0;
}

CostKind ProblemSpec::cost_kind() const noexcept {
  return id_ == Problem::eigenvector ? CostKind::unit_norm_penalty : CostKind::euclidean;
}

Matrix ProblemSpec::sample(Rng& rng) const {
  switch (id_) {
    case Problem::eigenvalues:
      return sample_p1(rng, m_);
    case Problem::eigenvector:
      return sample_p2(rng, m_);
    case Problem::exponential:
      return sample_p3(rng, m_);
    case Problem::determinant:
      return sample_p4(rng, m_);
  }
  return {};
}

Vector ProblemSpec::target(const Matrix& x) const {
  if (x.rows() != m_ || x.cols() != m_) throw DimensionError("target: input is not MxM");
  switch (id_) {
    case Problem::eigenvalues:
      return sym_eigenvalues(x);
    case Problem::eigenvector:
      return dominant_eigenvector(x);
    case Problem::exponential:
      return vec(matrix_exp(x));
    case Problem::determinant:
      return {lu_determinant(x)};
  }
  return {};
}

Matrix sample_p1(Rng& rng, std::size_t m) { return symmetrized_uniform(rng, m, -1.0, 1.0); }

Matrix sample_p2(Rng& rng, std::size_t m) { return symmetrized_uniform(rng, m, 0.0, 1.0); }

Matrix sample_p3(Rng& rng, std::size_t m) {
  for (;;) {
    Matrix a(m, m);
    for (double& v : a.data()) v = rng.uniform(0.0, 1.0);
    const double norm = operator_norm(a);
    if (norm > 0.0) return a * (1.0 / norm);
  }
}

Matrix sample_p4(Rng& rng, std::size_t m) {
  const double bound = 2.0 / static_cast<double>(m);
  Matrix x = Matrix::identity(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) x(i, j) = -rng.uniform(-bound, bound);
  return x;
}

Instance make_instance(const ProblemSpec& problem, std::size_t k, const SeedCoords& coords) {
  Rng rng = Rng::substream(coords.seed, coords.epoch, coords.batch, coords.instance);
  Instance inst;
  inst.coords = coords;
  inst.inputs.reserve(k);
  inst.targets.reserve(k);
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (int attempt = 0;; ++attempt) {
      Matrix x = problem.sample(rng);
      try {
        Vector f = problem.target(x);
        inst.inputs.push_back(std::move(x));
        inst.targets.push_back(std::move(f));
        break;
      } catch (const DegenerateInput&) {
        if (attempt + 1 >= kMaxResampleAttempts) throw;
      }
    }
  }
  return inst;
}

std::vector<Instance> make_batch(const ProblemSpec& problem, std::size_t k,
                                 std::size_t batch_size, std::uint64_t seed,
                                 std::uint64_t epoch, std::uint64_t batch) {
  std::vector<Instance> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out.push_back(make_instance(problem, k, SeedCoords{seed, epoch, batch, i}));
  }
  return out;
}

void write_dataset_csv(std::ostream& out, std::span<const Instance> instances) {
  if (instances.empty()) return;
  const auto& first = instances.front();
  out << "seed,epoch,batch,instance";
  for (std::size_t k = 0; k < first.inputs.size(); ++k) {
    for (std::size_t i = 0; i < first.inputs[k].size(); ++i) out << ",x" << k << '_' << i;
    for (std::size_t i = 0; i < first.targets[k].size(); ++i) out << ",f" << k << '_' << i;
  }
  out << '\n';
  out.precision(17);
  for (const auto& inst : instances) {
    out << inst.coords.seed << ',' << inst.coords.epoch << ',' << inst.coords.batch << ','
        << inst.coords.instance;
    for (std::size_t k = 0; k < inst.inputs.size(); ++k) {
      for (double v : inst.inputs[k].data()) out << ',' << v;
      for (double v : inst.targets[k]) out << ',' << v;
    }
    out << '\n';
  }
}

}  // namespace aicc
