#pragma once

namespace gcops {

// Standard normal CDF, via erfc so both tails keep full relative precision.
double phi(double x);

// Upper tail 1 - phi(x) without cancellation.
double phi_upper(double x);

// Quantile function; throws DomainError unless 0 < q < 1.
double phi_inv(double q);

}  // namespace gcops
