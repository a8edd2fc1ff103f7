#include "patchpot/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace patchpot {

void Geometry::validate() const {
  if (!(R > 0.0)) throw std::invalid_argument("Geometry: R must be positive");
  if (!(Rm > 0.0)) throw std::invalid_argument("Geometry: Rm must be positive");
  if (!(Rm <= R))
    throw std::invalid_argument("Geometry: Rm must not exceed R (Rm=" +
                                std::to_string(Rm) + ", R=" + std::to_string(R) +
                                ")");
}

namespace {
void check_domain(const Geometry& g, double d, double r) {
  g.validate();
  if (!(d > 0.0)) throw std::domain_error("distance d must be positive");
  if (!(r >= 0.0) || !(r <= g.Rm))
    throw std::domain_error("radius r must lie in [0, Rm]");
}
}  // namespace

double gap(const Geometry& g, double d, double r) {
  check_domain(g, d, r);
  return d + r * r / (2.0 * g.R);
}

double energy_kernel(const Geometry& g, double d, double r) {
  check_domain(g, d, r);
  return r / (d + r * r / (2.0 * g.R));
}

double force_kernel(const Geometry& g, double d, double r) {
  check_domain(g, d, r);
  const double h = d + r * r / (2.0 * g.R);
  return r / (h * h);
}

KernelNorms kernel_norms(const Geometry& g, double d) {
  g.validate();
  if (!(d > 0.0)) throw std::domain_error("distance d must be positive");
  const double u = g.edge_gap_term();
  return {g.R * std::log1p(u / d), g.R * u / (d * (d + u))};
}

ValidityReport validity(const Geometry& g, double d, double r0) {
  g.validate();
  if (!(d > 0.0)) throw std::domain_error("distance d must be positive");
  if (!(r0 > 0.0)) throw std::domain_error("patch radius r0 must be positive");
  return {d < g.edge_gap_term(), r0 > std::sqrt(2.0 * g.R * d)};
}

}  // namespace patchpot
