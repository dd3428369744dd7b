#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "neuroacc/constants.hpp"
#include "neuroacc/filters.hpp"

namespace neuroacc::chain {

/// Time-multiplexed drive configuration: each delay period tau = n_nodes*theta
/// is split into n_nodes slots; slot j carries the mask weight mask[j] and the
/// fed-back envelope sample of the same slot one period earlier:
///   V(t) = v0 * (mask_j + alpha * x_fb_j + 1) * cos(2 pi fd t)
struct DriveConfig {
  double v0 = 135.0;                    // [V] carrier amplitude unit
  double fd = 245e3;                    // [Hz] carrier frequency
  double mask_low = 0.45;
  double mask_high = 0.7;
  std::uint64_t mask_seed = 12345;
  int n_nodes = 100;
  double theta = 50e-6;                 // [s] slot duration
  double alpha = 1.2;                   // drive volts per sampled envelope volt
  double input_gain = 4.0 * kGravity;   // [m/s^2 per unit task input]
  double transduction_gain = 1e6;       // [V/m] beam envelope -> readout volts
  int adc_bits = 16;
  double adc_full_scale = 0.0;          // [V]; 0 requests self-calibration
  double noise_sigma = 0.0;             // [V] Gaussian envelope noise, pre-ADC
  std::uint64_t noise_seed = 99;
  int steps_per_period = 48;            // carrier resolution (period of 2 fd)

  double tau() const { return n_nodes * theta; }
  void validate() const;
  /// Non-fatal configuration notes, e.g. slots much longer than the beam
  /// ring-down time `ring_down` [s] (virtual nodes decouple).
  std::vector<std::string> warnings(double ring_down) const;
};

/// Random binary mask: one weight per slot, drawn once per experiment from
/// mask_seed and reused every delay period.
std::vector<double> generate_mask(const DriveConfig& cfg);

/// Drive envelope for each slot of one delay period:
/// v0 * (mask_j + alpha * feedback_j + 1). `feedback` holds the previous
/// period's sampled envelopes in volts (zeros on the first period).
std::vector<double> synthesize_envelopes(const std::vector<double>& mask,
                                         const std::vector<double>& feedback,
                                         const DriveConfig& cfg);

/// Streaming quadrature envelope detector for the beam displacement:
/// transduction gain -> band-pass around 2 fd -> mix with the 2 fd references
/// -> low-pass each quadrature. envelope() returns the tracked amplitude in
/// volts and equals the carrier amplitude in steady state.
class EnvelopeDemodulator {
 public:
  EnvelopeDemodulator(double fd, double sample_rate, double transduction_gain,
                      double bandpass_width = 80e3, double lowpass_cutoff = 40e3);

  /// Feed one displacement sample [m] with cos/sin(2 omega_d t) at its time.
  void feed(double displacement, double cos_ref, double sin_ref) {
    const double v = bp_.step(displacement * gain_);
    i_out_ = lp_i2_.step(lp_i1_.step(2.0 * v * cos_ref));
    q_out_ = lp_q2_.step(lp_q1_.step(-2.0 * v * sin_ref));
  }

  double envelope() const { return std::hypot(i_out_, q_out_); }
  void reset();

 private:
  double gain_;
  Biquad bp_, lp_i1_, lp_i2_, lp_q1_, lp_q2_;
  double i_out_ = 0.0, q_out_ = 0.0;
};

/// Whole-waveform convenience wrapper around EnvelopeDemodulator. Sample i is
/// taken at t = i/sample_rate. Returns the envelope track in volts.
std::vector<double> demodulate_envelope(const std::vector<double>& displacement,
                                        double fd, double sample_rate,
                                        double transduction_gain);

/// Uniform quantizer over [0, full_scale] with clip accounting.
class Adc {
 public:
  Adc(int bits, double full_scale);
  double sample(double v);
  double full_scale() const { return full_scale_; }
  long long clip_count() const { return clip_count_; }
  long long sample_count() const { return sample_count_; }
  double clip_fraction() const;

 private:
  int bits_;
  double full_scale_;
  double levels_;
  long long clip_count_ = 0;
  long long sample_count_ = 0;
};

/// Deterministic portable standard-normal stream (Box-Muller over raw
/// mt19937_64 bits; distributions from <random> are not portable).
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  double uniform01();
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class ShakerMode { ideal, filtered };

/// Electrodynamic-shaker emulation at the slot rate. `filtered` applies a
/// stroke-centering high-pass, a two-section tracking low-pass, and an
/// end-stop correction when the armature displacement would exceed
/// travel_limit. `ideal` passes the setpoint through untouched.
struct ShakerConfig {
  ShakerMode mode = ShakerMode::filtered;
  double cutoff_hz = 120.0;     // tracking bandwidth (per low-pass section)
  double highpass_hz = 4.0;     // centering servo corner
  double travel_limit = 13e-3;  // [m]
  double stop_freq_hz = 50.0;   // stiffness of the end-stop correction
  double sample_rate = 20e3;    // [Hz] slot rate 1/theta

  void validate() const;
};

class Shaker {
 public:
  explicit Shaker(const ShakerConfig& cfg);

  /// One slot-rate sample: acceleration setpoint in -> produced acceleration
  /// out [m/s^2].
  double step(double accel_setpoint);

  double displacement() const { return disp_; }
  void reset();

 private:
  ShakerConfig cfg_;
  Biquad lp1_, lp2_;
  double ema_ = 0.0;
  double ema_coeff_ = 0.0;
  double disp_ = 0.0;
  double vel_ = 0.0;
};

}  // namespace neuroacc::chain
