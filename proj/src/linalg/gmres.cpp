#include <schwarzlab/linalg/gmres.hpp>

#include <schwarzlab/linalg/kernels.hpp>

#include <cmath>

namespace schwarzlab {

namespace {

// Complex Givens rotation [c s; -conj(s) c] with real c, zeroing b.
void make_rotation(Scalar a, Scalar b, double& c, Scalar& s) {
  if (b == Scalar(0.0)) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (a == Scalar(0.0)) {
    c = 0.0;
    s = 1.0;
    return;
  }
  const double aa = std::abs(a);
  const double r = std::hypot(aa, std::abs(b));
  c = aa / r;
  s = (a / aa) * std::conj(b) / r;
}

void apply_rotation(double c, Scalar s, Scalar& x, Scalar& y) {
  const Scalar t = c * x + s * y;
  y = -std::conj(s) * x + c * y;
  x = t;
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, std::span<const Scalar> b, const WeightedInnerProduct& ip,
                  double tol, Index maxit, std::optional<Vector> x0) {
  const Index n = b.size();
  if (ip.size() != n) throw DimensionError("gmres: inner product size does not match right-hand side");
  GmresResult res;
  res.x = x0 ? *x0 : Vector(n, Scalar(0.0));
  if (res.x.size() != n) throw DimensionError("gmres: initial guess has the wrong length");

  const double bnorm = ip.norm(b);
  if (bnorm == 0.0) {
    res.x.assign(n, Scalar(0.0));
    res.residuals.push_back(0.0);
    res.converged = true;
    return res;
  }

  Vector r(b.begin(), b.end());
  if (x0) {
    const Vector ax = apply(res.x);
    for (Index i = 0; i < n; ++i) r[i] -= ax[i];
  }
  const double beta = ip.norm(r);
  res.residuals.push_back(beta / bnorm);
  if (beta / bnorm <= tol) {
    res.converged = true;
    res.true_residual = beta / bnorm;
    return res;
  }

  const auto& k = kernels::active();
  std::vector<Vector> v;   // orthonormal basis
  std::vector<Vector> wv;  // W v_i, so that (w, v_i)_W = dotc(W v_i, w)
  std::vector<Vector> h;   // columns of the Hessenberg matrix, rotated in place
  std::vector<double> cs;
  std::vector<Scalar> sn;
  std::vector<Scalar> g{Scalar(beta)};

  v.push_back(scaled(r, 1.0 / beta));
  wv.push_back(ip.apply_weight(v.back()));

  Index j = 0;
  for (; j < maxit; ++j) {
    Vector w = apply(v[j]);
    if (w.size() != n) throw DimensionError("gmres: operator output has the wrong length");
    const double wnorm0 = ip.norm(w);
    Vector hj(j + 2, Scalar(0.0));
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i <= j; ++i) {
        const Scalar hij = k.dotc(wv[i].data(), w.data(), n);
        hj[i] += hij;
        k.axpy(-hij, v[i].data(), w.data(), n);
      }
    }
    const double hnext = ip.norm(w);
    hj[j + 1] = hnext;

    for (Index i = 0; i < j; ++i) apply_rotation(cs[i], sn[i], hj[i], hj[i + 1]);
    double c;
    Scalar s;
    make_rotation(hj[j], hj[j + 1], c, s);
    cs.push_back(c);
    sn.push_back(s);
    apply_rotation(c, s, hj[j], hj[j + 1]);
    g.push_back(-std::conj(s) * g[j]);
    g[j] = c * g[j];
    h.push_back(std::move(hj));

    const double rel = std::abs(g[j + 1]) / bnorm;
    res.residuals.push_back(rel);
    res.iterations = j + 1;

    const bool lucky = hnext <= 1e-14 * std::max(wnorm0, 1e-300);
    if (rel <= tol || lucky) {
      res.converged = rel <= tol;
      if (lucky) {
        res.breakdown = true;
        res.breakdown_iteration = j + 1;
        res.converged = true;
      }
      ++j;
      break;
    }
    v.push_back(scaled(w, 1.0 / hnext));
    wv.push_back(ip.apply_weight(v.back()));
  }

  // back substitution on the rotated upper triangle
  const Index m = h.size();
  Vector y(m);
  for (Index i = m; i-- > 0;) {
    Scalar s = g[i];
    for (Index l = i + 1; l < m; ++l) s -= h[l][i] * y[l];
    y[i] = s / h[i][i];
  }
  for (Index i = 0; i < m; ++i) k.axpy(y[i], v[i].data(), res.x.data(), n);

  const Vector ax = apply(res.x);
  Vector rr(b.begin(), b.end());
  for (Index i = 0; i < n; ++i) rr[i] -= ax[i];
  res.true_residual = ip.norm(rr) / bnorm;
  return res;
}

}  // namespace schwarzlab
