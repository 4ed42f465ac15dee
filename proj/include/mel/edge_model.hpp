#ifndef MEL_EDGE_MODEL_HPP_
#define MEL_EDGE_MODEL_HPP_

#include <cstdint>

namespace mel {

// In parallelized learning (PL) the orchestrator ships data subsets to the
// learners, so batch data rides on the downlink; in federated learning (FL)
// the data already lives on the device and only models move.
enum class LearningMode { kParallelized, kFederated };

struct ChannelParams {
  double bandwidth_hz;            // W
  double tx_power_watts;          // P
  double channel_gain;            // h, linear scale
  double noise_psd_watts_per_hz;  // N0
};

struct ComputeParams {
  double clock_hz;  // cycles per second
};

// Constants of the ML task being distributed.
struct TaskProfile {
  std::int64_t features;                // F, per sample
  double data_precision_bits;           // bits per feature
  double model_precision_bits;          // bits per model parameter
  double model_size_slope;              // parameters per batch sample
  double model_size_intercept;          // parameters independent of batch
  double complexity_cycles_per_sample;  // clock cycles for one update pass
  std::int64_t dataset_size;            // total samples to distribute
};

struct LearnerProfile {
  int id;  // 1-based, unique and contiguous within a scenario
  ChannelParams channel;
  ComputeParams compute;
  LearningMode mode;
};

// Coefficients of the compact per-cycle time law
//   t(tau, d) = c2 * tau * d + c1 * d + c0.
struct TimeCoefficients {
  double c2;  // seconds per sample-update
  double c1;  // seconds per sample
  double c0;  // seconds
};

struct ComponentTimes {
  double send_s;                // global model (+ batch in PL) downlink
  double compute_per_update_s;  // one pass over the batch
  double receive_s;             // local model uplink
};

// Shannon rate W * log2(1 + P*h / (N0*W)) in bits per second.
// Noise power is N0 * W so the SNR is dimensionless.
double achievable_rate(const ChannelParams& ch);

// Indoor attenuation 7 + 2.1*log10(distance_m) dB, returned as linear gain.
double path_loss_gain(double distance_m);

TimeCoefficients time_coefficients(const LearnerProfile& learner,
                                   const TaskProfile& task);

// Evaluates the time law; tau and batch may be fractional.
double cycle_time(const TimeCoefficients& coeff, double tau, double batch);

// Send/compute/receive decomposition for a given batch size. Satisfies
// send + tau * compute_per_update + receive == cycle_time(coeffs, tau, batch).
ComponentTimes component_times(const LearnerProfile& learner,
                               const TaskProfile& task, double batch);

double dbm_to_watts(double dbm);

}  // namespace mel

#endif  // MEL_EDGE_MODEL_HPP_
