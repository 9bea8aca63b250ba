#pragma once
#include "irml/codec.hpp"

namespace irml {

enum class Fading { Unit, Fixed, Rayleigh };

struct ChannelModel {
  Fading fading = Fading::Unit;
  double fixed_gain = 1.0;   // used by Fading::Fixed
  double snr_db = 10.0;      // +inf -> noiseless
  uint64_t seed = 1;
};

struct ReceivedSignal {
  std::vector<double> samples;
  std::vector<SymbolSpan> spans;
  double gain = 1.0;       // realized fading coefficient
  double noise_var = 0.0;  // realized per-sample noise variance
};

// sigma_n^2 = P / 10^(snr_db/10); P must be positive; infinite SNR -> 0.
double snr_to_noise_var(double snr_db, double signal_power);

// received = g * sent + delta with delta iid N(0, sigma_n^2) per coordinate;
// sigma_n^2 referenced to the empirical power of this message.  Rayleigh draws
// a unit-mean-square magnitude per message.  Deterministic given (seed,
// message_index); distinct messages use decorrelated derived seeds.
ReceivedSignal transmit(const EncodedSignal& sig, const ChannelModel& model,
                        uint64_t message_index = 0);

// Fixed noise realization: gain and noise variance supplied by the caller,
// noise drawn from `seed` alone.  transmit() lowers onto this; for a fixed
// (g, sigma_n^2, seed) the output is linear in the input signal.
ReceivedSignal transmit_fixed_noise(const EncodedSignal& sig, double gain,
                                    double noise_var, uint64_t seed);

struct ChannelEstimate {
  double g_hat = 1.0;
  double noise_var_hat = 0.0;
};

// Least squares on a pilot pair: g_hat = <sent,received>/<sent,sent>,
// noise_var_hat = mean square residual.  Pilot length >= 8 required.
ChannelEstimate estimate_channel(const std::vector<double>& sent,
                                 const std::vector<double>& received);

}  // namespace irml
