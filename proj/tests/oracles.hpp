#pragma once

// Reference computations that share no code with the library.

#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Density of R given (r, K) for kernel dimension m. With tau = 1 + r^2 the
// component along the data vector is tau * Gamma(1 + N, 1), N ~ Poisson(K r^2
// / tau), and the m - 2 orthogonal directions add Gamma(m - 2, 1). Writing the
// first term at unit scale as a NegBin(1 + N, 1/tau) mixture of Gamma shapes
// gives R ~ Gamma(m - 1 + N + M, 1).
inline double density(int m, double r, double K, double R) {
  const double tau = 1.0 + r * r;
  const double lam = K * r * r / tau;
  if (R <= 0.0) return m == 2 ? std::exp(-K * r * r / tau) / tau : 0.0;
  auto log_gamma_pdf = [&](double shape) { return (shape - 1.0) * std::log(R) - R - std::lgamma(shape); };
  const double q = 1.0 - 1.0 / tau;
  // Far tail: every mixture component decays at least like exp(-R / tau).
  const double mu = (1.0 + K) * r * r + m - 1.0;
  const double sd = std::sqrt(tau * tau + 2.0 * K * r * r * tau + (m - 2.0));
  if (R > mu + 80.0 * sd + 80.0 * tau) return 0.0;
  // Poisson weights start from the Boost pmf at the mode and recur outward.
  const int mode = static_cast<int>(lam);
  const int nlo = std::max(0, static_cast<int>(mode - 12.0 * std::sqrt(lam) - 10.0));
  const int nhi = static_cast<int>(mode + 12.0 * std::sqrt(lam) + 10.0);
  double pn = lam > 0.0 ? boost::math::pdf(boost::math::poisson_distribution<double>(lam), nlo) : 1.0;
  double total = 0.0;
  for (int n = nlo; n <= (lam > 0.0 ? nhi : 0); ++n) {
    if (n > nlo) pn *= lam / n;
    // NegBin(1 + n, 1/tau) weights by recurrence, each paired with the
    // gamma density of shape m - 1 + n + k, also by recurrence.
    // NegBin(1 + n, 1/tau) weights paired with gamma densities of shape
    // m - 1 + n + k, both advanced by recurrence in the log domain.
    const boost::math::negative_binomial_distribution<double> nb(1.0 + n, 1.0 / tau);
    double lw = std::log(boost::math::pdf(nb, 0));
    double lg = log_gamma_pdf(m - 1.0 + n);
    double s = 0.0, peak = 0.0;
    for (int k = 0; k < 1000000; ++k) {
      if (k > 0) {
        lw += std::log((n + k) * q / k);
        lg += std::log(R / (m - 2.0 + n + k));
      }
      const double term = std::exp(lw + lg);
      s += term;
      peak = std::max(peak, term);
      if (term <= 1e-18 * peak && (n + k) * q * R < k * (m - 2.0 + n + k)) break;
    }
    total += pn * s;
  }
  return total;
}

// int_0^inf h(R) dR by Boost exp-sinh.
template <class F>
double integrate_half_line(F&& h, double tol = 1e-12) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(h, tol);
}

// Per-block mutual information for a discrete magnitude law, written
// directly as the output entropy of the radial law minus the entropy of
// the magnitude-conditional law, plus the isotropy term:
//   I = E_K[h(R)] + (m-2) E log R - lgamma(m-1) - E log(1+r^2) - (m-1),
// where h(R) = -int f_F log f_F dR and f_F = sum_j p_j f(.|r_j, K).
inline double mutual_info(int m, double mean_k, const std::vector<double>& pts, const std::vector<double>& probs,
                          double tol = 1e-9) {
  auto inner = [&](double K) {
    auto fmix = [&](double R) {
      double s = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) s += probs[j] * density(m, pts[j], K, R);
      return s;
    };
    auto integrand = [&](double R) {
      const double f = fmix(R);
      if (f <= 0.0) return 0.0;
      double v = -f * std::log(f);
      if (m > 2) v += (m - 2.0) * f * std::log(R);
      return v;
    };
    return integrate_half_line(integrand, tol);
  };
  double ek;
  if (mean_k == 0.0) {
    ek = inner(0.0);
  } else {
    // K = mean_k * t with t ~ Exp(1); beyond t = 60 the weight is below 1e-26.
    ek = integrate_half_line([&](double t) { return t > 60.0 ? 0.0 : std::exp(-t) * inner(mean_k * t); }, tol);
  }
  double elog = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) elog += probs[j] * std::log1p(pts[j] * pts[j]);
  const double lg = m > 2 ? std::lgamma(m - 1.0) : 0.0;
  return ek - lg - elog - (m - 1.0);
}

}  // namespace oracle
