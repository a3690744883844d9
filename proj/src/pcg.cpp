#include "alone/pcg.hpp"

#include <cmath>
#include <string>

#include "alone/error.hpp"

namespace alone {

namespace {

void require_finite(double v, const char* what, std::size_t iteration) {
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string("PCG: non-finite ") + what + " at iteration " + std::to_string(iteration));
  }
}

}  // namespace

PcgResult pcg_solve(const LinearMap& H, const ComplexVolume& c, const ComplexVolume& x0, const PcgOptions& options) {
  require_same_dims(c.dims(), x0.dims(), "pcg_solve");
  if (options.tolerance < 0.0) throw ConfigError("PCG tolerance must be >= 0");
  const auto precondition = [&](const ComplexVolume& r) { return options.preconditioner ? options.preconditioner(r) : r; };

  PcgResult out;
  out.x = x0;
  ComplexVolume r = c - H(out.x);
  double r_norm = norm(r);
  require_finite(r_norm, "residual", 0);
  out.residual_history.push_back(r_norm);
  const double target = options.tolerance * norm(c);
  if (r_norm == 0.0 || r_norm <= target) {
    out.residual_norm = r_norm;
    out.converged = true;
    return out;
  }

  ComplexVolume z = precondition(r);
  ComplexVolume p = z;
  double rz = inner_product(z, r).real();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const ComplexVolume hp = H(p);
    const double curvature = inner_product(hp, p).real();
    require_finite(curvature, "curvature", it);
    if (curvature <= 0.0) throw DivergenceError("PCG: operator is not positive definite (p^H H p <= 0)");
    const double alpha = rz / curvature;
    axpy(alpha, p.data(), out.x.data());
    axpy(-alpha, hp.data(), r.data());
    r_norm = norm(r);
    require_finite(r_norm, "residual", it);
    out.residual_history.push_back(r_norm);
    out.iterations = it;
    if (r_norm == 0.0 || r_norm <= target) {
      out.converged = true;
      break;
    }
    z = precondition(r);
    const double rz_next = inner_product(z, r).real();
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  out.residual_norm = r_norm;
  if (!out.x.all_finite()) throw DivergenceError("PCG: iterate became non-finite");
  return out;
}

double quadratic_energy(const LinearMap& H, const ComplexVolume& c, const ComplexVolume& x) {
  return 0.5 * inner_product(H(x), x).real() - inner_product(c, x).real();
}

}  // namespace alone
