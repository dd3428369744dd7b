#include "neuroacc/signal_chain.hpp"

#include <algorithm>
#include <cmath>

#include "neuroacc/errors.hpp"

namespace neuroacc::chain {

void DriveConfig::validate() const {
  if (!(v0 > 0.0)) throw InvalidGeometryError("v0 must be positive");
  if (!(fd > 0.0)) throw InvalidGeometryError("fd must be positive");
  if (!(theta > 0.0)) throw InvalidGeometryError("theta must be positive");
  if (n_nodes < 1) throw InvalidGeometryError("n_nodes must be >= 1");
  if (!(mask_high >= mask_low)) {
    throw InvalidGeometryError("mask_high must be >= mask_low");
  }
  if (!(mask_low > 0.0)) throw InvalidGeometryError("mask_low must be positive");
  if (!(alpha >= 0.0)) throw InvalidGeometryError("alpha must be >= 0");
  if (!(input_gain >= 0.0)) throw InvalidGeometryError("input_gain must be >= 0");
  if (!(transduction_gain > 0.0)) {
    throw InvalidGeometryError("transduction_gain must be positive");
  }
  if (adc_bits < 1 || adc_bits > 24) {
    throw InvalidGeometryError("adc_bits must lie in [1, 24]");
  }
  if (!(adc_full_scale >= 0.0)) {
    throw InvalidGeometryError("adc_full_scale must be >= 0 (0 = calibrate)");
  }
  if (!(noise_sigma >= 0.0)) {
    throw InvalidGeometryError("noise_sigma must be >= 0");
  }
  if (steps_per_period < 40) {
    throw InvalidGeometryError("steps_per_period must be >= 40");
  }
}

std::vector<std::string> DriveConfig::warnings(double ring_down) const {
  std::vector<std::string> w;
  if (ring_down > 0.0 && theta > 2.0 * ring_down) {
    w.push_back(
        "slot duration theta exceeds twice the beam ring-down time; virtual "
        "nodes decouple and the reservoir degenerates toward independent "
        "samples");
  }
  return w;
}

std::vector<double> generate_mask(const DriveConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.mask_seed);
  std::vector<double> mask(static_cast<std::size_t>(cfg.n_nodes));
  for (double& m : mask) {
    // Low bit of the raw draw: portable across standard libraries.
    m = (rng() & 1ULL) ? cfg.mask_high : cfg.mask_low;
  }
  return mask;
}

std::vector<double> synthesize_envelopes(const std::vector<double>& mask,
                                         const std::vector<double>& feedback,
                                         const DriveConfig& cfg) {
  if (mask.size() != feedback.size()) {
    throw DimensionMismatchError("mask and feedback lengths differ");
  }
  std::vector<double> env(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) {
    env[j] = cfg.v0 * (mask[j] + cfg.alpha * feedback[j] + 1.0);
  }
  return env;
}

EnvelopeDemodulator::EnvelopeDemodulator(double fd, double sample_rate,
                                         double transduction_gain,
                                         double bandpass_width,
                                         double lowpass_cutoff)
    : gain_(transduction_gain),
      bp_(design_bandpass(2.0 * fd, bandpass_width, sample_rate)),
      lp_i1_(design_lowpass(lowpass_cutoff, sample_rate)),
      lp_i2_(design_lowpass(lowpass_cutoff, sample_rate)),
      lp_q1_(design_lowpass(lowpass_cutoff, sample_rate)),
      lp_q2_(design_lowpass(lowpass_cutoff, sample_rate)) {}

void EnvelopeDemodulator::reset() {
  bp_.reset();
  lp_i1_.reset();
  lp_i2_.reset();
  lp_q1_.reset();
  lp_q2_.reset();
  i_out_ = q_out_ = 0.0;
}

std::vector<double> demodulate_envelope(const std::vector<double>& displacement,
                                        double fd, double sample_rate,
                                        double transduction_gain) {
  EnvelopeDemodulator demod(fd, sample_rate, transduction_gain);
  std::vector<double> env;
  env.reserve(displacement.size());
  const double w2 = 2.0 * (2.0 * kPi * fd) / sample_rate;
  for (std::size_t i = 0; i < displacement.size(); ++i) {
    const double ph = w2 * static_cast<double>(i);
    demod.feed(displacement[i], std::cos(ph), std::sin(ph));
    env.push_back(demod.envelope());
  }
  return env;
}

Adc::Adc(int bits, double full_scale) : bits_(bits), full_scale_(full_scale) {
  if (bits_ < 1 || bits_ > 24) {
    throw InvalidGeometryError("adc bits must lie in [1, 24]");
  }
  if (!(full_scale_ > 0.0)) {
    throw InvalidGeometryError("adc full scale must be positive");
  }
  levels_ = std::pow(2.0, bits_) - 1.0;
}

double Adc::sample(double v) {
  ++sample_count_;
  if (v > full_scale_) {
    ++clip_count_;
    v = full_scale_;
  } else if (v < 0.0) {
    ++clip_count_;
    v = 0.0;
  }
  return std::round(v / full_scale_ * levels_) * full_scale_ / levels_;
}

double Adc::clip_fraction() const {
  return sample_count_ == 0
             ? 0.0
             : static_cast<double>(clip_count_) / static_cast<double>(sample_count_);
}

double GaussianNoise::uniform01() {
  // 53-bit mantissa draw, offset so the result stays strictly inside (0, 1).
  return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianNoise::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

void ShakerConfig::validate() const {
  if (!(sample_rate > 0.0)) {
    throw InvalidGeometryError("shaker sample_rate must be positive");
  }
  if (mode == ShakerMode::ideal) return;
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate)) {
    throw InvalidGeometryError("shaker cutoff must lie in (0, fs/2)");
  }
  if (!(highpass_hz > 0.0 && highpass_hz < cutoff_hz)) {
    throw InvalidGeometryError("shaker highpass corner must lie in (0, cutoff)");
  }
  if (!(travel_limit > 0.0)) {
    throw InvalidGeometryError("shaker travel_limit must be positive");
  }
  if (!(stop_freq_hz > 0.0 && stop_freq_hz < 0.05 * sample_rate)) {
    throw InvalidGeometryError("shaker stop frequency out of range");
  }
}

Shaker::Shaker(const ShakerConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.mode == ShakerMode::filtered) {
    lp1_ = design_lowpass(cfg_.cutoff_hz, cfg_.sample_rate);
    lp2_ = design_lowpass(cfg_.cutoff_hz, cfg_.sample_rate);
    if (!lp1_.stable() || !lp2_.stable()) {
      throw InvalidGeometryError("shaker tracking filter is unstable");
    }
    ema_coeff_ = 1.0 - std::exp(-2.0 * kPi * cfg_.highpass_hz / cfg_.sample_rate);
  }
}

void Shaker::reset() {
  lp1_.reset();
  lp2_.reset();
  ema_ = disp_ = vel_ = 0.0;
}

double Shaker::step(double accel_setpoint) {
  if (cfg_.mode == ShakerMode::ideal) {
    return accel_setpoint;
  }
  // Centering servo: the armature cannot hold a DC acceleration, so the
  // sustained component of the command is bled off before tracking.
  ema_ += ema_coeff_ * (accel_setpoint - ema_);
  double a = lp2_.step(lp1_.step(accel_setpoint - ema_));

  // End stops: past the travel limit a stiff restoring correction dominates.
  const double lim = cfg_.travel_limit;
  const double excess = disp_ > lim ? disp_ - lim : (disp_ < -lim ? disp_ + lim : 0.0);
  if (excess != 0.0) {
    const double ws = 2.0 * kPi * cfg_.stop_freq_hz;
    a += -ws * ws * excess - 2.0 * 0.7071067811865476 * ws * vel_;
  }

  // Armature displacement tracker with a leak at the servo corner: keeps the
  // double integral bounded for zero-mean commands.
  const double dt = 1.0 / cfg_.sample_rate;
  const double lam = 2.0 * kPi * cfg_.highpass_hz;
  vel_ += dt * (a - 2.0 * 0.7071067811865476 * lam * vel_ - lam * lam * disp_);
  disp_ += dt * vel_;
  return a;
}

}  // namespace neuroacc::chain
