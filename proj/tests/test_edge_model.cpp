#include "mel/edge_model.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "mel/errors.hpp"

using namespace mel;

namespace {

TaskProfile mnist_task() {
  TaskProfile t;
  t.features = 784;
  t.data_precision_bits = 8.0;
  t.model_precision_bits = 32.0;
  t.model_size_slope = 0.0;
  t.model_size_intercept = 280440.0;
  t.complexity_cycles_per_sample = 1123736.0;
  t.dataset_size = 60000;
  return t;
}

LearnerProfile table1_learner(double distance_m, double clock_hz,
                              LearningMode mode) {
  LearnerProfile lp;
  lp.id = 1;
  lp.channel.bandwidth_hz = 5e6;
  lp.channel.tx_power_watts = dbm_to_watts(23.0);
  lp.channel.channel_gain = path_loss_gain(distance_m);
  lp.channel.noise_psd_watts_per_hz = dbm_to_watts(-174.0);
  lp.compute.clock_hz = clock_hz;
  lp.mode = mode;
  return lp;
}

}  // namespace

TEST_CASE("path loss gain follows the 7 + 2.1*log10(R) dB model") {
  // 1 m: 7 dB exactly, gain 10^-0.7
  CHECK(path_loss_gain(1.0) == doctest::Approx(0.19952623149688797).epsilon(1e-12));
  // 10 m: 7 + 2.1 dB
  CHECK(-10.0 * std::log10(path_loss_gain(10.0)) == doctest::Approx(9.1).epsilon(1e-12));
  // 50 m, hand computed
  CHECK(path_loss_gain(50.0) == doctest::Approx(0.08774377176117833).epsilon(1e-12));

  SUBCASE("monotone decreasing in distance") {
    double prev = path_loss_gain(0.5);
    for (double d = 1.0; d <= 200.0; d += 7.3) {
      const double g = path_loss_gain(d);
      CHECK(g < prev);
      prev = g;
    }
  }

  SUBCASE("rejects nonpositive distance") {
    CHECK_THROWS_AS(path_loss_gain(0.0), InvalidDistance);
    CHECK_THROWS_AS(path_loss_gain(-3.0), InvalidDistance);
  }
}

TEST_CASE("achievable rate matches the link budget") {
  ChannelParams ch;
  ch.bandwidth_hz = 5e6;
  ch.tx_power_watts = dbm_to_watts(23.0);
  ch.channel_gain = path_loss_gain(50.0);
  ch.noise_psd_watts_per_hz = dbm_to_watts(-174.0);

  // Hand evaluation: SNR ~= 8.795e11, rate ~= 1.9839e8 bit/s.
  const double rate = achievable_rate(ch);
  CHECK(rate == doctest::Approx(198389636.69398645).epsilon(1e-9));

  SUBCASE("rate equals W when log2(1+SNR) = 1") {
    ChannelParams unit = ch;
    // pick P*h so that P*h/(N0*W) == 1
    unit.channel_gain = 1.0;
    unit.tx_power_watts = unit.noise_psd_watts_per_hz * unit.bandwidth_hz;
    CHECK(achievable_rate(unit) == doctest::Approx(unit.bandwidth_hz).epsilon(1e-12));
  }

  SUBCASE("doubling bandwidth less than doubles the rate") {
    ChannelParams wide = ch;
    wide.bandwidth_hz *= 2.0;
    CHECK(achievable_rate(wide) < 2.0 * achievable_rate(ch));
    CHECK(achievable_rate(wide) > achievable_rate(ch));
  }

  SUBCASE("increasing power or gain increases the rate") {
    ChannelParams p = ch;
    p.tx_power_watts *= 1.5;
    CHECK(achievable_rate(p) > rate);
    ChannelParams g = ch;
    g.channel_gain *= 1.5;
    CHECK(achievable_rate(g) > rate);
  }

  SUBCASE("invalid parameters are rejected") {
    ChannelParams bad = ch;
    bad.tx_power_watts = 0.0;
    CHECK_THROWS_AS(achievable_rate(bad), InvalidChannel);
    bad = ch;
    bad.noise_psd_watts_per_hz = -1.0;
    CHECK_THROWS_AS(achievable_rate(bad), InvalidChannel);
  }
}

TEST_CASE("time coefficients of the compact time law") {
  const TaskProfile task = mnist_task();

  SUBCASE("c2 is complexity over clock rate") {
    LearnerProfile lp = table1_learner(50.0, 2.4e9, LearningMode::kParallelized);
    const TimeCoefficients c = time_coefficients(lp, task);
    CHECK(c.c2 == doctest::Approx(1123736.0 / 2.4e9).epsilon(1e-12));
    // doubling the clock halves c2 and leaves c1, c0 unchanged
    LearnerProfile fast = lp;
    fast.compute.clock_hz *= 2.0;
    const TimeCoefficients cf = time_coefficients(fast, task);
    CHECK(cf.c2 == doctest::Approx(c.c2 / 2.0).epsilon(1e-12));
    CHECK(cf.c1 == c.c1);
    CHECK(cf.c0 == c.c0);
  }

  SUBCASE("federated mode with zero slope has c1 = 0") {
    LearnerProfile lp = table1_learner(50.0, 2.4e9, LearningMode::kFederated);
    const TimeCoefficients c = time_coefficients(lp, task);
    CHECK(c.c1 == 0.0);
  }

  SUBCASE("parallelized c1 >= federated c1, equal iff F*P_d vanishes") {
    LearnerProfile pl = table1_learner(50.0, 2.4e9, LearningMode::kParallelized);
    LearnerProfile fl = pl;
    fl.mode = LearningMode::kFederated;
    CHECK(time_coefficients(pl, task).c1 > time_coefficients(fl, task).c1);

    TaskProfile no_data = task;
    no_data.data_precision_bits = 0.0;
    CHECK(time_coefficients(pl, no_data).c1 ==
          time_coefficients(fl, no_data).c1);
  }

  SUBCASE("MNIST model term is 2 * 8,974,080 bits") {
    LearnerProfile lp = table1_learner(50.0, 2.4e9, LearningMode::kParallelized);
    const double rate = achievable_rate(lp.channel);
    const TimeCoefficients c = time_coefficients(lp, task);
    CHECK(c.c0 * rate == doctest::Approx(2.0 * 8974080.0).epsilon(1e-9));
  }
}

TEST_CASE("cycle time evaluates the quadratic law") {
  CHECK(cycle_time({1.0, 0.0, 0.0}, 2.0, 5.0) == 10.0);
  CHECK(cycle_time({0.001, 0.01, 0.5}, 3.0, 100.0) == doctest::Approx(1.8).epsilon(1e-12));

  // d = 0 leaves only the constant term
  const TimeCoefficients c{0.3, 0.2, 0.7};
  CHECK(cycle_time(c, 5.0, 0.0) == doctest::Approx(0.7));

  SUBCASE("strictly increasing in tau and batch") {
    CHECK(cycle_time(c, 3.0, 10.0) > cycle_time(c, 2.0, 10.0));
    CHECK(cycle_time(c, 3.0, 11.0) > cycle_time(c, 3.0, 10.0));
  }
}

TEST_CASE("component times decompose the cycle time") {
  const TaskProfile task = mnist_task();

  SUBCASE("federated send and receive coincide when the model size is flat") {
    LearnerProfile fl = table1_learner(25.0, 7e8, LearningMode::kFederated);
    const ComponentTimes ct = component_times(fl, task, 512.0);
    CHECK(ct.send_s == doctest::Approx(ct.receive_s).epsilon(1e-15));
  }

  SUBCASE("zero batch means zero compute") {
    LearnerProfile lp = table1_learner(25.0, 7e8, LearningMode::kParallelized);
    CHECK(component_times(lp, task, 0.0).compute_per_update_s == 0.0);
  }

  SUBCASE("decomposition sums to the compact law on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist_m(1.0, 50.0);
    std::uniform_real_distribution<double> batch(0.0, 5000.0);
    std::uniform_real_distribution<double> tau(0.0, 40.0);
    for (int trial = 0; trial < 200; ++trial) {
      const LearningMode mode = trial % 2 == 0 ? LearningMode::kParallelized
                                               : LearningMode::kFederated;
      TaskProfile t = task;
      t.model_size_slope = trial % 3 == 0 ? 2.5 : 0.0;
      LearnerProfile lp = table1_learner(dist_m(rng),
                                         trial % 2 == 0 ? 2.4e9 : 7e8, mode);
      const double d = batch(rng);
      const double tk = tau(rng);
      const ComponentTimes ct = component_times(lp, t, d);
      const TimeCoefficients c = time_coefficients(lp, t);
      const double whole = cycle_time(c, tk, d);
      const double parts = ct.send_s + tk * ct.compute_per_update_s + ct.receive_s;
      CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
    }
  }
}
