#pragma once

// Cross-pair training: for a pair (V1, V2) sharing identity and pose, the
// generator must map (V1, A2) -> V2 and (V2, A1) -> V1. Least-squares GAN
// objective plus weighted L1 reconstruction.

#include <iosfwd>
#include <vector>

#include "dckgen/config.hpp"
#include "dckgen/generator.hpp"
#include "dckgen/synthdata.hpp"

namespace dckgen {

// mean((real-1)^2) + mean(fake^2)
Var lsgan_d_loss(const Var& real_scores, const Var& fake_scores);
// mean((fake-1)^2)
Var lsgan_g_loss(const Var& fake_scores);
// mean |a - b|
Var l1_loss(const Var& a, const Var& b);

// mean |f_yx(f_xy(x)) - x|; diagnostic only, not part of the training
// objective.
double cycle_loss(const Generator& f_xy, const Generator& f_yx, const Tensor& frames,
                  const Tensor& windows_xy, const Tensor& windows_yx);

// Dataset pairs split by the target clip's position within its identity
// block: positions 1..train_signals train, the rest are held out
// (train_signals == 0 puts every pair in the training set).
struct PairSplit {
    std::vector<std::pair<int, int>> train, holdout;
};
PairSplit split_pairs(const TrainConfig& cfg, const Dataset& ds);

class Adam {
public:
    Adam(double lr, double beta1, double beta2, double eps = 1e-8);
    void step(const std::vector<Var>& params);

private:
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<Tensor> m_, v_;
};

struct StepStats {
    int step = 0;
    double d_loss = 0, g_adv = 0, g_rec = 0, g_total = 0;
};

class Trainer {
public:
    Trainer(const TrainConfig& cfg, const Dataset& ds);

    StepStats step();
    // Full loop; CSV rows go to `log` (header included) when non-null.
    void train(std::ostream* log);

    // Mean of both-direction rec losses over the given pairs (all frames).
    double eval_rec(const std::vector<std::pair<int, int>>& pairs) const;
    // Dataset statistic: mean |V1 - V2| over the given pairs.
    double dataset_pair_l1(const std::vector<std::pair<int, int>>& pairs) const;

    Generator& generator() { return gen_; }
    Discriminator& discriminator() { return disc_; }
    const std::vector<std::pair<int, int>>& train_pairs() const { return train_pairs_; }
    const std::vector<std::pair<int, int>>& holdout_pairs() const { return holdout_pairs_; }
    int steps_done() const { return steps_done_; }

private:
    TrainConfig cfg_;
    const Dataset& ds_;
    Generator gen_;
    Discriminator disc_;
    Adam g_opt_, d_opt_;
    Rng rng_;
    int steps_done_ = 0;
    std::vector<std::pair<int, int>> train_pairs_, holdout_pairs_;
};

GeneratorSpec generator_spec_from_config(const TrainConfig& cfg);

}  // namespace dckgen
