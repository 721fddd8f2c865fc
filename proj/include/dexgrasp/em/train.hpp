#pragma once

#include <memory>
#include <string>

#include "dexgrasp/em/net.hpp"

namespace dexgrasp::em {

/// One training example; images are shared between grasps of the same view.
struct Sample {
    std::shared_ptr<Tensor> image;
    std::vector<double> trajectory;
    int label = 0;  // 1 success, 0 failure
};

enum class Balance { None, Undersample, Oversample };

struct TrainConfig {
    double lr0 = 0.01;
    int halve_every = 5;  // lr_e = lr0 * 2^-(e / halve_every)
    int max_epochs = 100;
    int patience = 5;  // early stop on stalled validation loss
    int batch = 64;
    Balance balance = Balance::Undersample;  // train split only
};

struct CurvePoint {
    int epoch = 0;
    double lr = 0, train_loss = 0, val_loss = 0, val_acc = 0;
};

struct TrainResult {
    std::vector<CurvePoint> curve;
    int best_epoch = -1;
    double best_val_loss = 0;
};

double learning_rate(const TrainConfig& config, int epoch);

/// Class rebalancing by under/oversampling; None returns the input unchanged.
std::vector<Sample> balance_samples(const std::vector<Sample>& samples, Balance mode, Rng& rng);

/// Mini-batch gradient descent with the halving schedule and early stopping;
/// the net is left at the best-validation-loss parameters. Throws EmptySplit.
TrainResult train(EvalNet& net, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& validation, const TrainConfig& config, Rng& rng);

struct Metrics {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy() const;
    double f1() const;
};

/// Confusion counts at the 0.5 threshold. Throws EmptyInput.
Metrics predict_metrics(EvalNet& net, const std::vector<Sample>& samples);

/// Accuracy/F1 from externally supplied counts.
Metrics metrics_from_counts(long long tp, long long fp, long long tn, long long fn);

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve);

}  // namespace dexgrasp::em
