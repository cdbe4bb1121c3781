#include <schwarzlab/formulations/augmented.hpp>

#include <algorithm>
#include <thread>

namespace schwarzlab::formulations {

void for_each_subdomain(int count, bool parallel, const std::function<void(int)>& body) {
  const int workers = parallel ? std::min<int>(count, std::max(1u, std::thread::hardware_concurrency())) : 1;
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

AugmentedLocal::AugmentedLocal(const decomp::LocalOperators& local, const traces::TraceOperator& trace,
                               const traces::ImpedanceOperator& impedance, Scalar alpha, bool parallel)
    : alpha_(alpha), parallel_(parallel) {
  const int n = trace.num_subdomains();
  if (static_cast<int>(local.A0.size()) != n) throw DimensionError("augmented: subdomain count mismatch");
  blocks_.resize(n);
  for_each_subdomain(n, parallel, [&](int i) {
    const SparseMatrix& t = trace.T(i);
    const SparseMatrix tmt = multiply(t.transpose(), multiply(impedance.M(i), t));
    blocks_[i] = add(local.A(i), tmt, 1.0, alpha);
  });
  factor_all();
}

AugmentedLocal::AugmentedLocal(std::vector<SparseMatrix> blocks, Scalar alpha, bool parallel)
    : alpha_(alpha), parallel_(parallel), blocks_(std::move(blocks)) {
  factor_all();
}

void AugmentedLocal::factor_all() {
  const int n = num_subdomains();
  factors_.assign(n, nullptr);
  offsets_.assign(1, 0);
  for (int i = 0; i < n; ++i) offsets_.push_back(offsets_.back() + blocks_[i].rows());
  std::vector<std::string> failures(n);
  for_each_subdomain(n, parallel_, [&](int i) {
    try {
      factors_[i] = std::make_shared<const DenseFactorization>(factorize(blocks_[i]));
    } catch (const SingularMatrixError& e) {
      failures[i] = "augmented operator A_i + alpha T_i^T M_i T_i of subdomain " + std::to_string(i) +
                    " is singular (pivot " + std::to_string(e.pivot) + "); it must have a bounded inverse";
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw AssumptionError(f);
}

Vector AugmentedLocal::solve_local(int i, std::span<const Scalar> b) const {
  if (b.empty()) return {};
  return factors_[i]->solve(b);
}

Vector AugmentedLocal::solve(std::span<const Scalar> b) const {
  if (b.size() != dimension()) throw DimensionError("augmented solve: vector has the wrong length");
  Vector out(b.size());
  for_each_subdomain(num_subdomains(), parallel_, [&](int i) {
    const Vector x = solve_local(i, traces::block(b, offsets_, i));
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
  });
  return out;
}

Vector AugmentedLocal::apply(std::span<const Scalar> u) const {
  if (u.size() != dimension()) throw DimensionError("augmented apply: vector has the wrong length");
  Vector out(u.size());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Vector y = blocks_[i].apply(traces::block(u, offsets_, i));
    std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
  }
  return out;
}

}  // namespace schwarzlab::formulations
