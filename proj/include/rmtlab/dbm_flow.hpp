// SPDX-License-Identifier: Apache-2.0
#pragma once

// Matrix Brownian flows, characteristics of the time-scaled self-consistent
// equation, window decompositions and increment measurements.

#include <cstdint>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/ensembles.hpp"

namespace rmtlab {

enum class FlowVariant { additive, ornstein_uhlenbeck };

std::string_view to_string(FlowVariant v);
FlowVariant parse_flow_variant(std::string_view s);

/// One exact Gaussian transition of length dt. Driving noise has the given
/// class and is keyed by (seed, trial, step).
///   additive: X + sqrt(dt/n) B
///   OU:       e^{-dt/2} X + sqrt((1 - e^{-dt})/n) B
MatrixSample evolve(const MatrixSample& x, double dt, FlowVariant variant, SymmetryClass driving,
                    std::uint64_t seed, std::uint64_t trial, std::uint32_t step);

struct CharacteristicPoint {
  double t;
  cplx w;
  cplx z;
};

struct Characteristic {
  cplx z_end;
  FlowVariant variant = FlowVariant::additive;
  double T = 0.0;
  std::vector<CharacteristicPoint> path;  // increasing t, path.front().t = 0, path.back().t = T

  /// Cubic Hermite interpolation between stored nodes.
  cplx w_at(double t) const;
  double eta_at(double t) const { return w_at(t).imag(); }
  cplx z_at(double t) const;
};

/// Integrates dw/dt = -m_t^z(w) (additive; m_t time-scaled with c = sqrt(1 + t - T))
/// or dw/dt = -m^{z_t}(w) - w/2, dz/dt = -z/2 (OU) backwards from w_T = i eta_end
/// at t = T to t = 0 with an adaptive Dormand-Prince scheme. `sample_times` are
/// added to the stored path exactly.
Characteristic solve_characteristic(cplx z, double eta_end, double T, FlowVariant variant,
                                    const std::vector<double>& sample_times = {});

enum class WindowCase { complex, real };

std::string_view to_string(WindowCase c);

struct WindowExponents {
  double a = 0.1;
  double b = 0.1;
  double c = 1e-3;      // real case only: discarded band around eta ~ n^{-2 alpha}
  double alpha = 0.25;  // real case only
};

struct Window {
  double t_start;
  double t_end;
  double eta_start;  // nominal scale at t_start
  double eta_end;    // nominal scale at t_end
  int regime;        // 1 or 2 (complex case: 1)
  double surrogate_variance;
};

struct WindowDecomposition {
  WindowCase kind = WindowCase::complex;
  WindowExponents exponents;
  int K = 1;
  int n = 0;
  double t_b = 0.0;             // terminal time n^{-b}
  double eta_terminal = 0.0;    // n^{a-1}
  std::vector<double> times;    // every boundary time, increasing, no duplicates
  std::vector<Window> windows;
};

/// Complex case: t_0 = 0, t_i = t_b - n^{a+(K-i) delta}/n, t_K = t_b,
/// delta = (1-a-b)/K. Real case: two families with delta1 = (2 alpha-b-c)/K and
/// delta2 = (1-a-c-2 alpha)/K. Throws InvalidArgument for infeasible exponents.
WindowDecomposition window_times(const WindowExponents& ex, int K, int n, WindowCase kind);

/// One window from t = 0 to T ending at eta_end, where T is chosen so that
/// eta_0 / eta_end = ratio along the additive characteristic through z.
WindowDecomposition ratio_window(cplx z, double eta_end, double ratio, int n, WindowCase kind);

struct IncrementRow {
  std::uint64_t trial;
  int window;
  cplx z;
  double increment;           // Psi(t_end) - Psi(t_start) along the characteristic
  double surrogate_variance;  // model variance for this window and point
};

struct IncrementRecord {
  std::vector<IncrementRow> rows;  // ordered by (trial, window, point)
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
};

/// Surrogate variance of a window at point z: delta log n per complex window,
/// variance_profile_real between the window's characteristic scales in the real case.
double window_variance(const WindowDecomposition& w, std::size_t window, cplx z, double eta_start,
                       double eta_end);

/// Simulates X_0 = sqrt(1 - t_b) Y and the additive flow through every
/// boundary, recording Psi increments per window and point. Requires
/// n eta >= (log n)^2 at every boundary for every z.
IncrementRecord measure_increments(const EnsembleSpec& spec, const std::vector<cplx>& z_list,
                                   const WindowDecomposition& windows, std::size_t trials,
                                   std::uint64_t seed, int workers = 1);

/// Independent-across-windows Gaussians. Within a window, points whose
/// squared distance is at most the window scale share one Gaussian (linked
/// transitively); otherwise they are independent.
IncrementRecord gaussian_surrogate(const WindowDecomposition& windows, const std::vector<cplx>& z_list,
                                   std::size_t trials, std::uint64_t seed);

}  // namespace rmtlab
