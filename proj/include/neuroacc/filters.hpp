#pragma once

#include <cmath>

#include "neuroacc/constants.hpp"
#include "neuroacc/errors.hpp"

namespace neuroacc::chain {

/// Second-order IIR section, transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double z1 = 0.0, z2 = 0.0;

  double step(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }

  void reset() { z1 = z2 = 0.0; }

  /// Poles strictly inside the unit circle.
  bool stable() const { return std::fabs(a2) < 1.0 && std::fabs(a1) < 1.0 + a2; }
};

/// Butterworth-style low-pass section (bilinear transform), unity DC gain.
inline Biquad design_lowpass(double fc, double fs, double q = 0.7071067811865476) {
  if (!(fc > 0.0 && fs > 0.0 && fc < 0.5 * fs)) {
    throw InvalidGeometryError("low-pass cutoff must lie in (0, fs/2)");
  }
  const double w0 = 2.0 * kPi * fc / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b0 = (1.0 - c) / 2.0 / a0;
  f.b1 = (1.0 - c) / a0;
  f.b2 = f.b0;
  f.a1 = -2.0 * c / a0;
  f.a2 = (1.0 - alpha) / a0;
  return f;
}

/// Band-pass section with unity gain at the center frequency.
inline Biquad design_bandpass(double f_center, double bandwidth, double fs) {
  if (!(f_center > 0.0 && f_center < 0.5 * fs && bandwidth > 0.0)) {
    throw InvalidGeometryError("band-pass center must lie in (0, fs/2)");
  }
  const double w0 = 2.0 * kPi * f_center / fs;
  const double q = f_center / bandwidth;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b0 = alpha / a0;
  f.b1 = 0.0;
  f.b2 = -alpha / a0;
  f.a1 = -2.0 * std::cos(w0) / a0;
  f.a2 = (1.0 - alpha) / a0;
  return f;
}

}  // namespace neuroacc::chain
