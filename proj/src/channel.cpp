#include "irml/channel.hpp"

#include <cmath>
#include <limits>

namespace irml {

double snr_to_noise_var(double snr_db, double signal_power) {
  if (signal_power <= 0.0)
    throw ComputeError("signal power must be positive for SNR conversion");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

ReceivedSignal transmit_fixed_noise(const EncodedSignal& sig, double gain,
                                    double noise_var, uint64_t seed) {
  if (noise_var < 0) throw ComputeError("noise variance must be nonnegative");
  ReceivedSignal rx;
  rx.spans = sig.spans;
  rx.gain = gain;
  rx.noise_var = noise_var;
  rx.samples.resize(sig.samples.size());
  Rng rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  double sd = std::sqrt(noise_var);
  for (size_t i = 0; i < sig.samples.size(); ++i)
    rx.samples[i] = gain * sig.samples[i] + (sd > 0 ? sd * norm(rng) : 0.0);
  return rx;
}

ReceivedSignal transmit(const EncodedSignal& sig, const ChannelModel& model,
                        uint64_t message_index) {
  double p = sig.power();
  double noise_var = snr_to_noise_var(model.snr_db, p);
  uint64_t seed = derive_seed(model.seed, message_index);
  double g = 1.0;
  switch (model.fading) {
    case Fading::Unit:
      g = 1.0;
      break;
    case Fading::Fixed:
      g = model.fixed_gain;
      break;
    case Fading::Rayleigh: {
      // magnitude of a unit-mean-square complex gaussian; drawing the gain
      // from its own derived stream keeps the noise stream identical to the
      // fixed-gain modes
      Rng grng(splitmix64(seed));
      std::normal_distribution<double> norm(0.0, 1.0);
      double a = norm(grng), b = norm(grng);
      g = std::sqrt((a * a + b * b) / 2.0);
      break;
    }
  }
  return transmit_fixed_noise(sig, g, noise_var, seed);
}

ChannelEstimate estimate_channel(const std::vector<double>& sent,
                                 const std::vector<double>& received) {
  if (sent.size() != received.size())
    throw ComputeError("pilot length mismatch");
  if (sent.size() < 8) throw ComputeError("pilot must have at least 8 samples");
  double ss = 0, sr = 0;
  for (size_t i = 0; i < sent.size(); ++i) {
    ss += sent[i] * sent[i];
    sr += sent[i] * received[i];
  }
  if (ss <= 0) throw ComputeError("pilot signal is identically zero");
  ChannelEstimate est;
  est.g_hat = sr / ss;
  double resid = 0;
  for (size_t i = 0; i < sent.size(); ++i) {
    double d = received[i] - est.g_hat * sent[i];
    resid += d * d;
  }
  est.noise_var_hat = resid / sent.size();
  return est;
}

}  // namespace irml
