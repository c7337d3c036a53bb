#include "rcs/linop.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/dct.hpp"
#include "rcs/rng.hpp"

namespace rcs {

struct LinearMap::Impl {
  Kind kind;
  int rows = 0;
  int cols = 0;

  Vec entries;                         // Dense / GaussianOrthonormal, row-major
  std::vector<int> dct_rows;           // PartialDct
  std::shared_ptr<const DctPlan> dct;  // PartialDct
  std::shared_ptr<const Impl> outer, inner;  // Composed
  std::function<Vec(const Vec&)> fwd, adj;   // Custom
  std::string label;

  Vec run(const Vec& x) const {
    switch (kind) {
      case Kind::Identity:
        return x;
      case Kind::Dense:
      case Kind::GaussianOrthonormal: {
        Vec y(rows, 0.0);
        for (int i = 0; i < rows; ++i) {
          const double* row = entries.data() + static_cast<std::size_t>(i) * cols;
          double s = 0.0;
          for (int j = 0; j < cols; ++j) s += row[j] * x[j];
          y[i] = s;
        }
        return y;
      }
      case Kind::PartialDct: {
        const Vec t = dct->forward(x);
        Vec y(rows);
        for (int i = 0; i < rows; ++i) y[i] = t[dct_rows[i]];
        return y;
      }
      case Kind::Composed:
        return outer->run(inner->run(x));
      case Kind::Custom:
        return fwd(x);
    }
    throw SpecError("LinearMap: unknown kind");
  }

  Vec run_adjoint(const Vec& y) const {
    switch (kind) {
      case Kind::Identity:
        return y;
      case Kind::Dense:
      case Kind::GaussianOrthonormal: {
        Vec x(cols, 0.0);
        for (int i = 0; i < rows; ++i) {
          const double* row = entries.data() + static_cast<std::size_t>(i) * cols;
          const double yi = y[i];
          for (int j = 0; j < cols; ++j) x[j] += row[j] * yi;
        }
        return x;
      }
      case Kind::PartialDct: {
        Vec t(cols, 0.0);
        for (int i = 0; i < rows; ++i) t[dct_rows[i]] = y[i];
        return dct->inverse(t);
      }
      case Kind::Composed:
        return inner->run_adjoint(outer->run_adjoint(y));
      case Kind::Custom:
        return adj(y);
    }
    throw SpecError("LinearMap: unknown kind");
  }
};

int LinearMap::rows() const { return impl_->rows; }
int LinearMap::cols() const { return impl_->cols; }
LinearMap::Kind LinearMap::kind() const { return impl_->kind; }
std::string LinearMap::name() const { return impl_->label; }

Vec LinearMap::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != impl_->cols) {
    throw ShapeError("LinearMap::apply: expected length " + std::to_string(impl_->cols) +
                     ", got " + std::to_string(x.size()));
  }
  return impl_->run(x);
}

Vec LinearMap::adjoint_apply(const Vec& y) const {
  if (static_cast<int>(y.size()) != impl_->rows) {
    throw ShapeError("LinearMap::adjoint_apply: expected length " + std::to_string(impl_->rows) +
                     ", got " + std::to_string(y.size()));
  }
  return impl_->run_adjoint(y);
}

LinearMap LinearMap::identity(int n) {
  if (n <= 0) throw SpecError("identity: n must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Identity;
  impl->rows = impl->cols = n;
  impl->label = "identity";
  return LinearMap(std::move(impl));
}

LinearMap LinearMap::dense(int rows, int cols, Vec entries) {
  if (rows <= 0 || cols <= 0) throw SpecError("dense: dimensions must be positive");
  if (entries.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("dense: entries must have rows*cols elements");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Dense;
  impl->rows = rows;
  impl->cols = cols;
  impl->entries = std::move(entries);
  impl->label = "dense";
  return LinearMap(std::move(impl));
}

LinearMap LinearMap::gaussian_orthonormal(int m, int n, std::uint64_t seed) {
  if (m <= 0 || n <= 0 || m > n) {
    throw SpecError("gaussian_orthonormal: need 0 < m <= n");
  }
  Rng rng(derive_seed(seed, {stream_tag(Stream::Matrix)}));
  Vec a(static_cast<std::size_t>(m) * n);
  for (auto& e : a) e = rng.normal();

  // Modified Gram-Schmidt on the rows, two passes per row.
  auto row = [&](int i) { return a.data() + static_cast<std::size_t>(i) * n; };
  for (int i = 0; i < m; ++i) {
    double* ri = row(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double* rj = row(j);
        double proj = 0.0;
        for (int k = 0; k < n; ++k) proj += ri[k] * rj[k];
        for (int k = 0; k < n; ++k) ri[k] -= proj * rj[k];
      }
    }
    double nrm = 0.0;
    for (int k = 0; k < n; ++k) nrm += ri[k] * ri[k];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw SpecError("gaussian_orthonormal: degenerate draw");
    for (int k = 0; k < n; ++k) ri[k] /= nrm;
  }

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::GaussianOrthonormal;
  impl->rows = m;
  impl->cols = n;
  impl->entries = std::move(a);
  impl->label = "gaussian-orthonormal";
  return LinearMap(std::move(impl));
}

LinearMap LinearMap::partial_dct(int n, int m, std::uint64_t seed) {
  if (m <= 0 || n <= 0 || m > n) throw SpecError("partial_dct: need 0 < m <= n");
  if (!is_power_of_two(n)) throw SpecError("partial_dct: n must be a power of two");
  Rng rng(derive_seed(seed, {stream_tag(Stream::Matrix)}));
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::PartialDct;
  impl->rows = m;
  impl->cols = n;
  impl->dct_rows = std::move(idx);
  impl->dct = std::make_shared<DctPlan>(n);
  impl->label = "partial-dct";
  return LinearMap(std::move(impl));
}

LinearMap LinearMap::compose(LinearMap outer, LinearMap inner) {
  if (outer.cols() != inner.rows()) {
    throw ShapeError("compose: outer.cols (" + std::to_string(outer.cols()) +
                     ") != inner.rows (" + std::to_string(inner.rows()) + ")");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Composed;
  impl->rows = outer.rows();
  impl->cols = inner.cols();
  impl->outer = outer.impl_;
  impl->inner = inner.impl_;
  impl->label = outer.name() + "*" + inner.name();
  return LinearMap(std::move(impl));
}

LinearMap LinearMap::custom(int rows, int cols, std::function<Vec(const Vec&)> apply,
                            std::function<Vec(const Vec&)> adjoint, std::string name) {
  if (rows <= 0 || cols <= 0) throw SpecError("custom: dimensions must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Custom;
  impl->rows = rows;
  impl->cols = cols;
  impl->fwd = std::move(apply);
  impl->adj = std::move(adjoint);
  impl->label = std::move(name);
  return LinearMap(std::move(impl));
}

const std::vector<int>& LinearMap::dct_row_indices() const {
  if (impl_->kind != Kind::PartialDct) {
    throw SpecError("dct_row_indices: map is not partial-dct");
  }
  return impl_->dct_rows;
}

EigEstimate max_eig_gram(const LinearMap& map, double tol, int max_iter, std::uint64_t seed) {
  if (tol <= 0.0) throw SpecError("max_eig_gram: tol must be positive");
  Rng rng(derive_seed(seed, {stream_tag(Stream::PowerIteration)}));
  Vec x(map.cols());
  for (auto& e : x) e = rng.normal();
  double nx = nrm2(x);
  for (auto& e : x) e /= nx;

  EigEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec z = map.adjoint_apply(map.apply(x));
    const double lambda = dot(x, z);
    const double nz = nrm2(z);
    est.value = lambda;
    est.iterations = it;
    if (nz == 0.0) {  // x in the null space of A
      est.value = 0.0;
      est.converged = true;
      return est;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
    if (it > 1 && std::fabs(lambda - prev) <= tol * std::max(std::fabs(lambda), 1e-30)) {
      est.converged = true;
      return est;
    }
    prev = lambda;
  }
  est.converged = false;
  return est;
}

}  // namespace rcs
