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

// Finite-blocklength link mathematics: the normal approximation of the
// achievable rate, its inverse (packet error probability), and the error
// probability averaged over an exponentially distributed SNR using the
// three-piece linear surrogate of the Q-function.

#ifndef ADABLOCK_LINKMODEL_HPP_
#define ADABLOCK_LINKMODEL_HPP_

namespace adablock {

double DbmToWatts(double dbm);
double WattsToDbm(double watts);

struct RadioConstants {
  double power_threshold_w = 1e-11;  // P0, -80 dBm
  double noise_power_w = 1e-12;      // sigma^2, -90 dBm
  double pathloss_exponent = 3.0;
  double reference_gain = 1e-3;

  // Mean received SNR under full path-loss inversion.
  double mean_snr() const { return power_threshold_w / noise_power_w; }

  // Throws DomainError if any invariant is violated.
  void Validate() const;
};

struct FbcPoint {
  double snr = 0;
  double blocklength = 0;
  double dispersion = 0;
  double rate = 0;  // bits/symbol; may be negative for very short blocks
  double error_prob = 0;
};

struct LinearizedError {
  double mu = 0;
  double xi = 0;  // SNR threshold 2^(B/n) - 1
  double tau1 = 0;
  double tau2 = 0;
  double bits_per_packet = 0;
};

// Upper tail of the standard normal distribution.
double QFunction(double x);

// Inverse of QFunction on (0, 1).
double QInverse(double p);

double ChannelDispersion(double snr);

// Normal approximation of the achievable rate in bits per channel use.
// The result is returned unclamped and can be negative when n is small.
double AchievableRate(double snr, double n, double eps);

// Packet error probability at the given coding rate; the inverse of
// AchievableRate in its eps argument.
double ErrorProbabilityExact(double snr, double n, double rate);

// Convenience: evaluates rate and dispersion at (snr, n, eps).
FbcPoint EvaluateFbc(double snr, double n, double eps);

LinearizedError LinearizationParams(double n, double bits);

// Linearized error probability at a fixed SNR (the piecewise surrogate).
double LinearizedErrorAt(const LinearizedError& lin, double snr);

// E[eps] over an exponential SNR density with mean constants.mean_snr().
// Clamped to [0, 1].
double ExpectedErrorProbability(double n, double bits,
                                const RadioConstants& constants);

// Transmit power under full path-loss inversion toward P0.
double TransmitPower(double distance_m, double fading_power,
                     const RadioConstants& constants);

}  // namespace adablock

#endif  // ADABLOCK_LINKMODEL_HPP_
