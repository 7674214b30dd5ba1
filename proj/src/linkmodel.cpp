// Copyright 2026 The adablock Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adablock/linkmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adablock/errors.hpp"

namespace adablock {
namespace {

constexpr double kLog2e = std::numbers::log2e;
constexpr double kLn2 = std::numbers::ln2;

// Rational approximation of the standard normal quantile (P. J. Acklam),
// relative error about 1.2e-9 before refinement.
double NormalQuantileGuess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void RequirePositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

}  // namespace

double DbmToWatts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double WattsToDbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

void RadioConstants::Validate() const {
  RequirePositive(power_threshold_w, "power threshold");
  RequirePositive(noise_power_w, "noise power");
  RequirePositive(reference_gain, "reference gain");
  if (!(pathloss_exponent >= 2.0)) {
    throw DomainError("path-loss exponent must be >= 2");
  }
}

double QFunction(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double QInverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("QInverse requires 0 < p < 1, got " + std::to_string(p));
  }
  // Solve Phi(z) = p, then Q^-1(p) = -z. Two Halley steps polish the guess.
  double z = NormalQuantileGuess(p);
  for (int i = 0; i < 2; ++i) {
    const double e = 0.5 * std::erfc(-z / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
    z -= u / (1.0 + 0.5 * z * u);
  }
  return -z;
}

double ChannelDispersion(double snr) {
  if (!(snr >= 0.0)) throw DomainError("SNR must be non-negative");
  const double g = 1.0 + snr;
  return 1.0 - 1.0 / (g * g);
}

double AchievableRate(double snr, double n, double eps) {
  if (!(n > 0.0)) throw DomainError("blocklength must be positive");
  const double v = ChannelDispersion(snr);
  const double qi = QInverse(eps);
  if (std::isinf(n)) return std::log2(1.0 + snr);
  return std::log2(1.0 + snr) - std::sqrt(v / n) * qi * kLog2e;
}

double ErrorProbabilityExact(double snr, double n, double rate) {
  RequirePositive(snr, "SNR");
  RequirePositive(n, "blocklength");
  const double v = ChannelDispersion(snr);
  return QFunction(std::sqrt(n / v) * (std::log2(1.0 + snr) - rate) / kLog2e);
}

FbcPoint EvaluateFbc(double snr, double n, double eps) {
  FbcPoint pt;
  pt.snr = snr;
  pt.blocklength = n;
  pt.dispersion = ChannelDispersion(snr);
  pt.rate = AchievableRate(snr, n, eps);
  pt.error_prob = eps;
  return pt;
}

LinearizedError LinearizationParams(double n, double bits) {
  RequirePositive(n, "blocklength");
  if (!(bits >= 1.0)) throw DomainError("bits per packet must be >= 1");
  LinearizedError lin;
  lin.bits_per_packet = bits;
  const double x = bits * kLn2 / n;
  lin.xi = std::expm1(x);
  if (std::isinf(lin.xi)) {
    // Far beyond capacity at any SNR a double can hold.
    lin.mu = 0.0;
    lin.tau1 = lin.tau2 = lin.xi;
    return lin;
  }
  lin.mu = std::sqrt(n / std::expm1(2.0 * x)) / (2.0 * std::numbers::pi);
  const double half_width = 0.5 / lin.mu;
  lin.tau1 = lin.xi - half_width;
  lin.tau2 = lin.xi + half_width;
  return lin;
}

double LinearizedErrorAt(const LinearizedError& lin, double snr) {
  if (snr <= lin.tau1) return 1.0;
  if (snr > lin.tau2) return 0.0;
  return 0.5 - lin.mu * (snr - lin.xi);
}

double ExpectedErrorProbability(double n, double bits,
                                const RadioConstants& constants) {
  const LinearizedError lin = LinearizationParams(n, bits);
  const double c = constants.mean_snr();
  if (!(c > 0.0)) throw DomainError("mean SNR must be positive");
  if (std::isinf(lin.tau1)) return 1.0;
  if (std::isinf(c)) return 0.0;
  double p;
  if (lin.tau1 >= 0.0) {
    // exp(-t1/c) - exp(-t2/c), factored to survive c >> t2.
    const double diff =
        std::exp(-lin.tau1 / c) * -std::expm1(-(lin.tau2 - lin.tau1) / c);
    p = 1.0 - lin.mu * c * diff;
  } else {
    // The saturated region [0, tau1] is empty; integrate the ramp from 0.
    p = 0.5 + lin.mu * lin.xi - lin.mu * c * -std::expm1(-lin.tau2 / c);
  }
  return std::clamp(p, 0.0, 1.0);
}

double TransmitPower(double distance_m, double fading_power,
                     const RadioConstants& constants) {
  RequirePositive(distance_m, "distance");
  RequirePositive(fading_power, "fading power");
  return std::pow(distance_m, constants.pathloss_exponent) /
         (constants.reference_gain * fading_power) *
         constants.power_threshold_w;
}

}  // namespace adablock
