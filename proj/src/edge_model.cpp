#include "mel/edge_model.hpp"

#include <cmath>

#include "mel/errors.hpp"

namespace mel {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double achievable_rate(const ChannelParams& ch) {
  if (!(ch.bandwidth_hz > 0.0) || !std::isfinite(ch.bandwidth_hz) ||
      !(ch.tx_power_watts > 0.0) || !std::isfinite(ch.tx_power_watts) ||
      !(ch.channel_gain > 0.0) || !std::isfinite(ch.channel_gain) ||
      !(ch.noise_psd_watts_per_hz > 0.0) ||
      !std::isfinite(ch.noise_psd_watts_per_hz)) {
    throw InvalidChannel("channel parameters must be positive and finite");
  }
  const double snr = ch.tx_power_watts * ch.channel_gain /
                     (ch.noise_psd_watts_per_hz * ch.bandwidth_hz);
  const double rate = ch.bandwidth_hz * std::log2(1.0 + snr);
  if (!std::isfinite(rate) || rate <= 0.0) {
    throw InvalidChannel("achievable rate is not positive and finite");
  }
  return rate;
}

double path_loss_gain(double distance_m) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw InvalidDistance("distance must be positive and finite");
  }
  const double loss_db = 7.0 + 2.1 * std::log10(distance_m);
  return std::pow(10.0, -loss_db / 10.0);
}

TimeCoefficients time_coefficients(const LearnerProfile& learner,
                                   const TaskProfile& task) {
  const double rate = achievable_rate(learner.channel);
  const double data_bits_per_sample =
      learner.mode == LearningMode::kParallelized
          ? static_cast<double>(task.features) * task.data_precision_bits
          : 0.0;
  TimeCoefficients coeff;
  coeff.c2 = task.complexity_cycles_per_sample / learner.compute.clock_hz;
  coeff.c1 = (data_bits_per_sample +
              2.0 * task.model_precision_bits * task.model_size_slope) /
             rate;
  coeff.c0 = 2.0 * task.model_precision_bits * task.model_size_intercept / rate;
  return coeff;
}

double cycle_time(const TimeCoefficients& coeff, double tau, double batch) {
  return coeff.c2 * tau * batch + coeff.c1 * batch + coeff.c0;
}

ComponentTimes component_times(const LearnerProfile& learner,
                               const TaskProfile& task, double batch) {
  const double rate = achievable_rate(learner.channel);
  const double model_bits =
      task.model_precision_bits *
      (batch * task.model_size_slope + task.model_size_intercept);
  const double data_bits =
      learner.mode == LearningMode::kParallelized
          ? batch * static_cast<double>(task.features) * task.data_precision_bits
          : 0.0;
  ComponentTimes t;
  t.send_s = (data_bits + model_bits) / rate;
  t.compute_per_update_s =
      batch * task.complexity_cycles_per_sample / learner.compute.clock_hz;
  t.receive_s = model_bits / rate;
  return t;
}

}  // namespace mel
