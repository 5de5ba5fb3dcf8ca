#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnge/error.hpp"
#include "vnge/purity.hpp"
#include "vnge/spectral.hpp"

namespace vnge {

enum class Method { Exact, Finger, Taylor, ModifiedTaylor, RadialProjection, Mixture };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Finger: return "finger";
    case Method::Taylor: return "taylor";
    case Method::ModifiedTaylor: return "modified_taylor";
    case Method::RadialProjection: return "radial";
    case Method::Mixture: return "mixture";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::Exact, Method::Finger, Method::Taylor, Method::ModifiedTaylor,
                 Method::RadialProjection, Method::Mixture}) {
    if (name == to_string(m)) return m;
  }
  if (name == "radial_projection") return Method::RadialProjection;
  return std::nullopt;
}

/// Inputs an estimate was computed from, kept for auditing.
struct EstimateInputs {
  std::size_t n = 0;
  double purity = 0.0;
  std::optional<double> lambda_max;
  std::optional<double> sigma;  // Modified Taylor curvature
};

struct EntropyEstimate {
  Method method = Method::Exact;
  std::string name;  // method label; preset or mixture name for Method::Mixture
  double value = 0.0;
  EstimateInputs inputs;
};

inline constexpr double kDomainSlack = 1e-12;

namespace detail {

inline void check_n(std::size_t n, std::size_t minimum) {
  if (n < minimum) {
    throw Error(ErrorCode::DomainError, "n = " + std::to_string(n) + " below " + std::to_string(minimum));
  }
}

inline void check_unit_range(const char* what, double x, std::size_t n) {
  const double lower = 1.0 / static_cast<double>(n);
  if (!(x >= lower - kDomainSlack && x <= 1.0 + kDomainSlack)) {
    throw Error(ErrorCode::DomainError, std::string(what) + " = " + std::to_string(x) +
                                            " outside [1/n, 1] for n = " + std::to_string(n));
  }
}

inline EntropyEstimate make_estimate(Method m, double value, std::size_t n, double purity,
                                     std::optional<double> lambda_max = std::nullopt,
                                     std::optional<double> sigma = std::nullopt) {
  return {m, to_string(m), value, {n, purity, lambda_max, sigma}};
}

}  // namespace detail

/// FINGER: sum of q(lambda_i) with q(x) = -ln(lambda_max) x (1 - x),
/// i.e. -ln(lambda_max) (1 - purity). Never exceeds the exact entropy.
inline EntropyEstimate finger(std::size_t n, double purity, double lambda_max) {
  detail::check_n(n, 1);
  detail::check_unit_range("purity", purity, n);
  detail::check_unit_range("lambda_max", lambda_max, n);
  const double value = -std::log(std::min(lambda_max, 1.0)) * (1.0 - std::min(purity, 1.0));
  return detail::make_estimate(Method::Finger, value, n, purity, lambda_max);
}

/// Second-order expansion of -x ln x at x = 1/n summed over the spectrum:
/// -(n/2) purity + ln n - 1/2. Not clamped unless requested; it goes negative
/// as lambda_max approaches 1.
inline EntropyEstimate taylor(std::size_t n, double purity, bool clamped = false) {
  detail::check_n(n, 1);
  detail::check_unit_range("purity", purity, n);
  const double dn = static_cast<double>(n);
  double value = -0.5 * dn * purity + std::log(dn) - 0.5;
  if (clamped) value = std::clamp(value, 0.0, std::log(dn));
  return detail::make_estimate(Method::Taylor, value, n, purity);
}

/// Curvature of the quadratic matching -x ln x in value and slope at 1/n and
/// in value at lambda_max:
///   sigma = (-t ln t + t - 1) / (n (lambda_max - 1/n)^2),  t = n lambda_max.
/// Near t = 1 the numerator cancels, so a series in u = t - 1 is used there.
inline double modified_taylor_sigma(std::size_t n, double lambda_max) {
  const double dn = static_cast<double>(n);
  const double u = dn * lambda_max - 1.0;
  if (std::abs(u) < 1e-2) {
    // sigma = -n * sum_{k>=2} (-1)^k u^(k-2) / (k (k-1))
    double sum = 0.0;
    double power = 1.0;
    for (int k = 2; k < 16; ++k) {
      const double term = power / (static_cast<double>(k) * static_cast<double>(k - 1));
      sum += (k % 2 == 0) ? term : -term;
      power *= u;
    }
    return -dn * sum;
  }
  const double numerator = u - (1.0 + u) * std::log1p(u);
  const double gap = lambda_max - 1.0 / dn;
  return numerator / (dn * gap * gap);
}

/// Modified Taylor: sigma (purity - 1/n) + ln n. Never below the exact entropy.
inline EntropyEstimate modified_taylor(std::size_t n, double purity, double lambda_max) {
  detail::check_n(n, 1);
  detail::check_unit_range("purity", purity, n);
  detail::check_unit_range("lambda_max", lambda_max, n);
  const double dn = static_cast<double>(n);
  if (std::abs(lambda_max - 1.0 / dn) <= kDomainSlack) {
    // Uniform spectrum: the entropy is ln n and sigma is 0/0.
    return detail::make_estimate(Method::ModifiedTaylor, std::log(dn), n, purity, lambda_max);
  }
  const double sigma = modified_taylor_sigma(n, lambda_max);
  const double value = sigma * (purity - 1.0 / dn) + std::log(dn);
  return detail::make_estimate(Method::ModifiedTaylor, value, n, purity, lambda_max, sigma);
}

/// Two-level distribution (a, b, ..., b) on the probability simplex at the
/// same Euclidean distance kappa = sqrt(purity - 1/n) from the uniform point.
struct RadialSurrogate {
  double a = 0.0;
  double b = 0.0;
};

inline RadialSurrogate radial_surrogate(std::size_t n, double purity) {
  const double dn = static_cast<double>(n);
  const double kappa = std::sqrt(std::max(purity - 1.0 / dn, 0.0));
  RadialSurrogate s;
  s.a = std::sqrt((dn - 1.0) / dn) * kappa + 1.0 / dn;
  s.b = -kappa / std::sqrt((dn - 1.0) * dn) + 1.0 / dn;
  if (s.b < 0.0) s.b = 0.0;
  return s;
}

/// Radial Projection: Shannon entropy of the radial surrogate. Needs no
/// lambda_max.
inline EntropyEstimate radial_projection(std::size_t n, double purity) {
  detail::check_n(n, 2);
  detail::check_unit_range("purity", purity, n);
  const auto s = radial_surrogate(n, purity);
  const double a_term = s.a > 0.0 ? -s.a * std::log(s.a) : 0.0;
  const double b_term = s.b > 0.0 ? -s.b * std::log(s.b) : 0.0;
  const double value = a_term + static_cast<double>(n - 1) * b_term;
  return detail::make_estimate(Method::RadialProjection, value, n, purity);
}

/// Every estimator the summary supports: finger and modified Taylor are
/// skipped when lambda_max is absent.
inline std::vector<EntropyEstimate> evaluate_all(const SpectralSummary& s) {
  std::vector<EntropyEstimate> out;
  if (s.lambda_max) out.push_back(finger(s.n, s.purity, *s.lambda_max));
  out.push_back(taylor(s.n, s.purity));
  if (s.lambda_max) out.push_back(modified_taylor(s.n, s.purity, *s.lambda_max));
  if (s.n >= 2) out.push_back(radial_projection(s.n, s.purity));
  return out;
}

}  // namespace vnge
