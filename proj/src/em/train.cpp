#include "dexgrasp/em/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::em {

double learning_rate(const TrainConfig& config, int epoch) {
    return config.lr0 * std::pow(2.0, -(epoch / config.halve_every));
}

std::vector<Sample> balance_samples(const std::vector<Sample>& samples, Balance mode, Rng& rng) {
    if (mode == Balance::None) return samples;
    std::vector<const Sample*> pos, neg;
    for (const Sample& s : samples) (s.label == 1 ? pos : neg).push_back(&s);
    if (pos.empty() || neg.empty()) return samples;

    auto& minority = pos.size() < neg.size() ? pos : neg;
    auto& majority = pos.size() < neg.size() ? neg : pos;
    std::vector<Sample> out;
    if (mode == Balance::Undersample) {
        std::shuffle(majority.begin(), majority.end(), rng);
        majority.resize(minority.size());
        for (const Sample* s : minority) out.push_back(*s);
        for (const Sample* s : majority) out.push_back(*s);
    } else {
        std::uniform_int_distribution<size_t> pick(0, minority.size() - 1);
        for (const Sample* s : majority) out.push_back(*s);
        for (const Sample* s : minority) out.push_back(*s);
        for (size_t i = minority.size(); i < majority.size(); ++i)
            out.push_back(*minority[pick(rng)]);
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

TrainResult train(EvalNet& net, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& validation, const TrainConfig& config, Rng& rng) {
    if (train_set.empty() || validation.empty())
        throw EmptySplit("train: empty train or validation split");

    const std::vector<Sample> balanced = balance_samples(train_set, config.balance, rng);
    std::vector<int> order(balanced.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    std::vector<double> best_params = net.snapshot_params();
    result.best_val_loss = std::numeric_limits<double>::infinity();
    int stalled = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const double lr = learning_rate(config, epoch);
        std::shuffle(order.begin(), order.end(), rng);

        double train_loss = 0;
        size_t at = 0;
        while (at < order.size()) {
            const size_t end = std::min(at + config.batch, order.size());
            net.zero_grad();
            for (size_t i = at; i < end; ++i) {
                const Sample& s = balanced[order[i]];
                train_loss += net.sample_loss_and_grad(*s.image, s.trajectory, s.label, rng);
            }
            net.apply_gradients(lr, static_cast<int>(end - at));
            at = end;
        }
        train_loss /= balanced.size();

        double val_loss = 0;
        int correct = 0;
        for (const Sample& s : validation) {
            const double p = net.forward(*s.image, s.trajectory)(0);
            val_loss += cross_entropy(p, s.label);
            if ((p > 0.5) == (s.label == 1)) ++correct;
        }
        val_loss /= validation.size();
        result.curve.push_back({epoch, lr, train_loss, val_loss,
                                static_cast<double>(correct) / validation.size()});

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best_params = net.snapshot_params();
            stalled = 0;
        } else if (++stalled >= config.patience) {
            break;
        }
    }
    net.restore_params(best_params);
    return result;
}

double Metrics::accuracy() const {
    const long long total = tp + fp + tn + fn;
    return total == 0 ? 0.0 : static_cast<double>(tp + tn) / total;
}

double Metrics::f1() const {
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * tp / denom;
}

Metrics predict_metrics(EvalNet& net, const std::vector<Sample>& samples) {
    if (samples.empty()) throw EmptyInput("predict_metrics: no samples");
    Metrics m;
    for (const Sample& s : samples) {
        const bool predicted = net.forward(*s.image, s.trajectory)(0) > 0.5;
        if (s.label == 1)
            (predicted ? m.tp : m.fn) += 1;
        else
            (predicted ? m.fp : m.tn) += 1;
    }
    return m;
}

Metrics metrics_from_counts(long long tp, long long fp, long long tn, long long fn) {
    return Metrics{tp, fp, tn, fn};
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream os(path);
    if (!os) throw IoError("write_curve_csv: cannot write " + path);
    os << "epoch,lr,train_loss,val_loss,val_acc\n";
    for (const CurvePoint& p : curve)
        os << p.epoch << "," << p.lr << "," << p.train_loss << "," << p.val_loss << ","
           << p.val_acc << "\n";
}

}  // namespace dexgrasp::em
