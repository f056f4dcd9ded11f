#include "gep/deflation.hpp"

#include <cmath>
#include <string>

namespace gep {

namespace {

std::string stage_message(std::size_t stage, Status status) {
  return "deflation stage " + std::to_string(stage) + " ended with status " +
         std::string(to_string(status));
}

// Removes the B-components along accepted vectors (two passes), using the
// stored products Bu_j.
void b_orthogonalize(Vector& x, const std::vector<EigenPair>& accepted, const std::vector<Vector>& bus) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < accepted.size(); ++j) axpy(-dot(bus[j], x), accepted[j].u, x);
  }
}

}  // namespace

DeflatedOperator::DeflatedOperator(std::shared_ptr<const SymmetricOperator> a, Vector u, Vector bu)
    : a_(std::move(a)), u_(std::move(u)), bu_(std::move(bu)) {
  require_same_size(a_->size(), u_.size(), "deflation vector");
  require_same_size(bu_.size(), u_.size(), "deflation vector");
}

void DeflatedOperator::apply(ConstSpan x, MutSpan y) const {
  require_same_size(x.size(), u_.size(), "DeflatedOperator::apply");
  require_same_size(y.size(), u_.size(), "DeflatedOperator::apply");
  Vector t(x.begin(), x.end());
  axpy(-dot(bu_, x), u_, t);
  a_->apply(t, y);
  const double s = dot(u_, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= s * bu_[i];
}

std::uint64_t DeflatedOperator::apply_flops() const { return a_->apply_flops() + 8 * u_.size(); }

std::shared_ptr<const DeflatedOperator> deflate(std::shared_ptr<const SymmetricOperator> a,
                                                const SymmetricMatrix& b, ConstSpan u) {
  require_same_size(u.size(), b.size(), "deflate");
  Vector bu = matvec(b, u);
  const double ubu = dot(u, bu);
  if (!(std::fabs(ubu - 1.0) <= 1e-10)) throw NotNormalized(ubu);
  return std::make_shared<const DeflatedOperator>(std::move(a), Vector(u.begin(), u.end()), std::move(bu));
}

StageFailure::StageFailure(std::size_t stage, Status status, std::vector<EigenPair> partial)
    : Error(ErrorClass::numerical, stage_message(stage, status)),
      stage_(stage),
      status_(status),
      partial_(std::move(partial)) {}

std::vector<EigenPair> top_k(const MatrixPair& pair, std::size_t k, const SolverConfig& config) {
  const std::size_t n = pair.size();
  if (k < 1 || k > n) {
    throw InvalidArgument("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  SolverConfig cfg = config;
  cfg.reference.reset();
  std::mt19937_64 rng(config.seed);

  DeflationState state{pair.a_ptr(), {}, 0};
  std::vector<Vector> bus;
  for (; state.stage < k; ++state.stage) {
    const MatrixPair stage_pair(state.a, pair.b_ptr());
    Vector x0 = gaussian_vector(n, rng);
    b_orthogonalize(x0, state.accepted, bus);

    SolveTrace t = run_solver(stage_pair, cfg, x0);
    if (!t.converged()) throw StageFailure(state.stage, t.status, std::move(state.accepted));

    EigenPair ep;
    ep.lambda = t.lambda;
    ep.iterations = t.iterations;
    ep.counters = t.counters;
    ep.u = std::move(t.solution);
    b_orthogonalize(ep.u, state.accepted, bus);
    Vector bu = matvec(pair.b(), ep.u);
    const double norm = std::sqrt(dot(ep.u, bu));
    scale(1.0 / norm, ep.u);
    scale(1.0 / norm, bu);

    Vector r = matvec(pair.a(), ep.u);
    axpy(-ep.lambda, bu, r);
    ep.residual = norm2(r) / (ep.lambda * norm2(bu));

    if (state.stage + 1 < k) state.a = deflate(state.a, pair.b(), ep.u);
    bus.push_back(std::move(bu));
    state.accepted.push_back(std::move(ep));
  }
  return std::move(state.accepted);
}

}  // namespace gep
