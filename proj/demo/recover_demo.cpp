// Minimal end-to-end walkthrough: build a hidden-band instance, sample it,
// run the recovery pipeline, and compare against the hidden normal.

#include <cstdio>

#include "cmoments/experiment.hpp"

using namespace cmoments;

int main() {
  SplitMix64 rng(7);
  InstanceOptions opts{AffineMode::RandomAffine, /*kappa_max=*/5.0};
  const MarginInstance inst =
      make_instance({Family::Gaussian}, -0.5, 0.5, 10, 0.01, opts, rng);
  std::printf("band (%.2f, %.2f): mass %.4f, tails %.4f / %.4f\n", inst.band.a,
              inst.band.b, inst.band.mass, inst.band.left_tail,
              inst.band.right_tail);

  const Dataset ds = generate(inst, 200000, /*seed=*/1);
  const RecoveryResult res = recover(ds.x, inst, AlphaConfig{}, 0.05);

  std::printf("selected candidate: %s\n",
              candidate_kind_name(res.selection.chosen_kind));
  std::printf("sin theta  mean1 %.4f  mean2 %.4f  cov %.4f  selected %.4f\n",
              res.sin_theta_mean1, res.sin_theta_mean2, res.sin_theta_cov,
              res.sin_theta_selected);
  return 0;
}
