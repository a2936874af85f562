#pragma once

#include <cmath>
#include <sstream>

#include "hill4bp/errors.hpp"

namespace hill4bp {

/// Constants of the Hill four-body Hamiltonian derived from the mass ratio mu
/// of the two primaries at infinity.
///
///   d       = sqrt(1 - 3 mu + 3 mu^2)
///   lambda1 = 3/2 (1 - d),   lambda2 = 3/2 (1 + d)
///   a       = (1 - lambda2)/2,   b = (1 - lambda1)/2
///
/// lambda1, lambda2 are the eigenvalues of the planar tidal quadratic form; a, b
/// are the coefficients of x^2, y^2 in the Hamiltonian after diagonalization.
template <typename Scalar>
struct Parameters {
  Scalar mu{};
  Scalar d{};
  Scalar lambda1{};
  Scalar lambda2{};
  Scalar a{};
  Scalar b{};

  template <typename Other>
  Parameters<Other> cast() const {
    return {static_cast<Other>(mu),      static_cast<Other>(d),
            static_cast<Other>(lambda1), static_cast<Other>(lambda2),
            static_cast<Other>(a),       static_cast<Other>(b)};
  }
};

using ParameterSet = Parameters<double>;
using ParameterSetLD = Parameters<long double>;

/// Derives the model constants for mu in [0, 1/2].
///
/// The library does not fold mu -> 1 - mu; callers must do that themselves.
/// 1 - d is evaluated as 3 mu (1 - mu) / (1 + d), which keeps lambda1 accurate
/// to full relative precision as mu -> 0.
template <typename Scalar = double>
Parameters<Scalar> derive_parameters(Scalar mu) {
  if (!(mu >= Scalar(0) && mu <= Scalar(0.5))) {
    std::ostringstream msg;
    msg << "mass ratio mu = " << static_cast<double>(mu) << " outside [0, 1/2]";
    throw DomainError(msg.str());
  }
  using std::sqrt;
  Parameters<Scalar> p;
  p.mu = mu;
  const Scalar one_minus_mu = Scalar(1) - mu;
  p.d = sqrt(Scalar(1) - Scalar(3) * mu * one_minus_mu);
  const Scalar one_minus_d = Scalar(3) * mu * one_minus_mu / (Scalar(1) + p.d);
  p.lambda1 = Scalar(1.5) * one_minus_d;
  p.lambda2 = Scalar(1.5) * (Scalar(1) + p.d);
  p.a = (Scalar(1) - p.lambda2) / Scalar(2);
  p.b = (Scalar(1) - p.lambda1) / Scalar(2);
  return p;
}

}  // namespace hill4bp
