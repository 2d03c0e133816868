// model.hpp: chain Hamiltonian, jump channels and the vectorized Liouvillian
// restricted to the single-excitation manifold.
//
// Basis state |k> (k = 1..N) is "excitation on site k"; the optional sink is
// |N+1>. The vacuum is never represented: site dissipation only removes
// population from the manifold and nothing feeds it back, so pure loss is
// exact there.
//
// Vectorization is column stacking, vec(A rho B) = (B^T kron A) vec(rho).
// This coincides with Eigen's default column-major storage, so vec(rho) is
// simply the raw coefficient array of rho.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eet/error.hpp"

namespace eet {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<cd>;

/// Unordered pair of 1-based site indices joined by coherent and incoherent
/// hopping.
struct Edge {
  int a = 0;
  int b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Full parameterization of a chain instance. Rates and energies are in
/// units of the coherent hopping v.
struct ChainSpec {
  int n_sites = 2;
  std::vector<Edge> edges{{1, 2}};
  std::vector<double> site_energies{0.0, 0.0};
  double v = 1.0;
  double gamma_diss = 0.02;
  double gamma_deph = 0.0;
  double gamma_hop = 0.0;
  double lambda_sink = 0.2;
  int init_site = 1;

  /// Nearest-neighbour line of n sites with zero energies and default rates.
  static ChainSpec line(int n) {
    ChainSpec s;
    s.n_sites = n;
    s.edges.clear();
    for (int k = 1; k < n; ++k) s.edges.push_back({k, k + 1});
    s.site_energies.assign(static_cast<std::size_t>(std::max(n, 0)), 0.0);
    return s;
  }

  /// Three sites, two arms (1 and 2) feeding site 3, which carries the sink.
  static ChainSpec lambda() {
    ChainSpec s = line(3);
    s.edges = {{1, 3}, {2, 3}};
    return s;
  }

  /// Sets omega_1 = delta and every other site energy to zero.
  ChainSpec& with_delta(double delta) {
    site_energies.assign(static_cast<std::size_t>(n_sites), 0.0);
    if (!site_energies.empty()) site_energies.front() = delta;
    return *this;
  }

  int sink_site() const { return n_sites; }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

inline void validate(const ChainSpec& spec) {
  if (spec.n_sites < 2) throw ValidationError("n_sites", "must be at least 2");
  const auto rate = [](const char* name, double value) {
    if (!std::isfinite(value)) throw ValidationError(name, "must be finite");
    if (value < 0.0) throw ValidationError(name, "must be nonnegative");
  };
  rate("v", spec.v);
  rate("gamma_diss", spec.gamma_diss);
  rate("gamma_deph", spec.gamma_deph);
  rate("gamma_hop", spec.gamma_hop);
  rate("lambda_sink", spec.lambda_sink);
  if (spec.site_energies.size() != static_cast<std::size_t>(spec.n_sites))
    throw ValidationError("site_energies", "expected " + std::to_string(spec.n_sites) +
                                               " entries, got " +
                                               std::to_string(spec.site_energies.size()));
  for (double w : spec.site_energies)
    if (!std::isfinite(w)) throw ValidationError("site_energies", "must be finite");
  if (spec.init_site < 1 || spec.init_site > spec.n_sites)
    throw ValidationError("init_site", "must lie in [1, " + std::to_string(spec.n_sites) + "]");
  if (spec.edges.empty()) throw ValidationError("edges", "graph has no edges");

  // Union-find for connectivity.
  std::vector<int> parent(static_cast<std::size_t>(spec.n_sites));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : spec.edges) {
    if (e.a < 1 || e.a > spec.n_sites || e.b < 1 || e.b > spec.n_sites)
      throw ValidationError("edges", "edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                         ") references a site outside [1, N]");
    if (e.a == e.b)
      throw ValidationError("edges", "self-loop on site " + std::to_string(e.a));
    parent[find(e.a - 1)] = find(e.b - 1);
  }
  for (int k = 1; k < spec.n_sites; ++k)
    if (find(k) != find(0)) throw ValidationError("edges", "graph is not connected");
}

/// Which state space a density matrix or generator lives on.
enum class Representation { ChainOnly, ChainWithSink };

inline Eigen::Index state_dim(const ChainSpec& spec, Representation rep) {
  return spec.n_sites + (rep == Representation::ChainWithSink ? 1 : 0);
}

/// Density matrix over the single-excitation basis, tagged with its
/// representation.
class DensityMatrix {
 public:
  DensityMatrix(CMatrix entries, Representation rep) : rho_(std::move(entries)), rep_(rep) {}

  const CMatrix& matrix() const { return rho_; }
  Representation representation() const { return rep_; }
  Eigen::Index dim() const { return rho_.rows(); }
  cd operator()(Eigen::Index j, Eigen::Index k) const { return rho_(j, k); }

  double trace() const { return rho_.trace().real(); }
  Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const {
    const CMatrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_physical(double herm_tol = 1e-12, double psd_tol = 1e-9) const {
    const double tr = trace();
    return hermiticity_error() <= herm_tol && min_eigenvalue() >= -psd_tol && tr >= -psd_tol &&
           tr <= 1.0 + psd_tol;
  }

 private:
  CMatrix rho_;
  Representation rep_;
};

inline CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CMatrix unvectorize(const CVector& v, Eigen::Index n) {
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

/// Chains up to this many sites keep a dense generator; larger ones sparse.
inline constexpr int kDenseSiteLimit = 64;

/// Vectorized master-equation generator G with d vec(rho)/dt = G vec(rho).
class Liouvillian {
 public:
  Liouvillian(SparseCMatrix generator, Eigen::Index dim, Representation rep, bool dense_storage)
      : dim_(dim), rep_(rep) {
    if (generator.rows() != dim * dim || generator.cols() != dim * dim)
      throw PreconditionError("generator size does not match state dimension");
    if (dense_storage)
      dense_ = CMatrix(generator);
    else
      sparse_ = std::move(generator);
    is_dense_ = dense_storage;
  }

  Eigen::Index dim() const { return dim_; }
  Representation representation() const { return rep_; }
  bool is_dense() const { return is_dense_; }

  CVector apply(const CVector& vec_rho) const {
    return is_dense_ ? CVector(dense_ * vec_rho) : CVector(sparse_ * vec_rho);
  }
  template <class Out>
  void apply_into(const CVector& vec_rho, Out& out) const {
    if (is_dense_)
      out.noalias() = dense_ * vec_rho;
    else
      out.noalias() = sparse_ * vec_rho;
  }
  CMatrix apply(const CMatrix& rho) const { return unvectorize(apply(vectorize(rho)), dim_); }

  CMatrix to_dense() const { return is_dense_ ? dense_ : CMatrix(sparse_); }
  SparseCMatrix to_sparse() const { return is_dense_ ? SparseCMatrix(dense_.sparseView()) : sparse_; }

  Liouvillian operator+(const Liouvillian& o) const { return combine(o, 1.0); }
  Liouvillian operator-(const Liouvillian& o) const { return combine(o, -1.0); }

 private:
  Liouvillian combine(const Liouvillian& o, double sign) const {
    if (o.dim_ != dim_ || o.rep_ != rep_) throw PreconditionError("generator shapes differ");
    SparseCMatrix sum = to_sparse() + sign * o.to_sparse();
    return Liouvillian(std::move(sum), dim_, rep_, is_dense_);
  }

  Eigen::Index dim_;
  Representation rep_;
  bool is_dense_ = true;
  CMatrix dense_;
  SparseCMatrix sparse_;
};

namespace detail {

struct OpEntry {
  Eigen::Index row;
  Eigen::Index col;
  cd value;
};
using SparseOp = std::vector<OpEntry>;

inline SparseOp ket_bra(Eigen::Index row, Eigen::Index col) { return {{row, col, 1.0}}; }

inline SparseOp identity(Eigen::Index n) {
  SparseOp id;
  for (Eigen::Index k = 0; k < n; ++k) id.push_back({k, k, 1.0});
  return id;
}

inline SparseOp adjoint(const SparseOp& a) {
  SparseOp out;
  for (const auto& e : a) out.push_back({e.col, e.row, std::conj(e.value)});
  return out;
}

inline SparseOp product(const SparseOp& a, const SparseOp& b) {
  SparseOp out;
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.col == y.row) out.push_back({x.row, y.col, x.value * y.value});
  return out;
}

/// Accumulates superoperator terms coeff * A rho B as triplets of
/// (B^T kron A).
class SuperopBuilder {
 public:
  explicit SuperopBuilder(Eigen::Index n) : n_(n), id_(identity(n)) {}

  void add(cd coeff, const SparseOp& a, const SparseOp& b) {
    for (const auto& x : a)
      for (const auto& y : b)
        triplets_.emplace_back(x.row + y.col * n_, x.col + y.row * n_, coeff * x.value * y.value);
  }

  void commutator(const SparseOp& h) {
    add(cd(0.0, -1.0), h, id_);
    add(cd(0.0, 1.0), id_, h);
  }

  /// rate * (L rho L^dag - 1/2 {L^dag L, rho})
  void dissipator(const SparseOp& jump, double rate) {
    if (rate == 0.0) return;
    const SparseOp jd = adjoint(jump);
    const SparseOp jdj = product(jd, jump);
    add(rate, jump, jd);
    anticommutator(jdj, -0.5 * rate);
  }

  /// coeff * {A, rho}
  void anticommutator(const SparseOp& a, double coeff) {
    if (coeff == 0.0) return;
    add(coeff, a, id_);
    add(coeff, id_, a);
  }

  SparseCMatrix build() const {
    SparseCMatrix g(n_ * n_, n_ * n_);
    g.setFromTriplets(triplets_.begin(), triplets_.end());
    g.makeCompressed();
    return g;
  }

 private:
  Eigen::Index n_;
  SparseOp id_;
  std::vector<Eigen::Triplet<cd>> triplets_;
};

inline SparseOp hamiltonian_op(const ChainSpec& spec) {
  SparseOp h;
  for (int k = 0; k < spec.n_sites; ++k)
    if (spec.site_energies[k] != 0.0) h.push_back({k, k, spec.site_energies[k]});
  if (spec.v != 0.0)
    for (const Edge& e : spec.edges) {
      h.push_back({e.a - 1, e.b - 1, spec.v});
      h.push_back({e.b - 1, e.a - 1, spec.v});
    }
  return h;
}

}  // namespace detail

/// N x N Hamiltonian: site energies on the diagonal, v on both orientations
/// of every edge.
inline CMatrix build_hamiltonian(const ChainSpec& spec) {
  validate(spec);
  CMatrix h = CMatrix::Zero(spec.n_sites, spec.n_sites);
  for (const auto& e : detail::hamiltonian_op(spec)) h(e.row, e.col) += e.value;
  return h;
}

/// Assembles -i[H, .] plus site dissipation, local dephasing, incoherent
/// hopping (both orientations per edge) and sink transfer from site N.
///
/// With include_sink the sink is the extra basis state |N+1> fed by the jump
/// |N+1><N| at rate lambda_sink. Without it the sink channel reduces to the
/// anticommutator loss -(Lambda/2){n_N, rho} on the chain-only space.
inline Liouvillian build_liouvillian(const ChainSpec& spec, bool include_sink) {
  using namespace detail;
  validate(spec);
  const Representation rep =
      include_sink ? Representation::ChainWithSink : Representation::ChainOnly;
  const Eigen::Index n = state_dim(spec, rep);
  const Eigen::Index last = spec.n_sites - 1;

  SuperopBuilder b(n);
  b.commutator(hamiltonian_op(spec));
  for (Eigen::Index k = 0; k < spec.n_sites; ++k) {
    b.anticommutator(ket_bra(k, k), -0.5 * spec.gamma_diss);
    b.dissipator(ket_bra(k, k), spec.gamma_deph);
  }
  for (const Edge& e : spec.edges) {
    b.dissipator(ket_bra(e.b - 1, e.a - 1), spec.gamma_hop);
    b.dissipator(ket_bra(e.a - 1, e.b - 1), spec.gamma_hop);
  }
  if (include_sink)
    b.dissipator(ket_bra(spec.n_sites, last), spec.lambda_sink);
  else
    b.anticommutator(ket_bra(last, last), -0.5 * spec.lambda_sink);

  return Liouvillian(b.build(), n, rep, spec.n_sites <= kDenseSiteLimit);
}

/// Pure state |init_site><init_site|.
inline DensityMatrix initial_state(const ChainSpec& spec, Representation rep) {
  validate(spec);
  const Eigen::Index n = state_dim(spec, rep);
  CMatrix rho = CMatrix::Zero(n, n);
  rho(spec.init_site - 1, spec.init_site - 1) = 1.0;
  return DensityMatrix(std::move(rho), rep);
}

}  // namespace eet
