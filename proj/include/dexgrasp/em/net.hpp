#pragma once

#include <string>

#include "dexgrasp/em/layers.hpp"
#include "dexgrasp/generation.hpp"

namespace dexgrasp::em {

constexpr int kImageSize = 224;
constexpr int kImageChannels = 3;
constexpr int kWaypoints = kTrajectoryWaypoints;
constexpr int kGraspTypes = 10;
constexpr int kTrajectoryDim = kWaypoints * kWaypointFloats + kGraspTypes;  // 280

struct EvalNetConfig {
    std::vector<int> vis_channels = {8, 16, 32, 32};   // stride-2 blocks (first stride 4)
    std::vector<int> traj_channels = {32, 32};         // conv1d blocks over waypoints
    int vis_features = 64;
    int traj_features = 64;
    int fused_features = 64;
    double dropout = 0.5;
    bool fuse_add = false;  // element-wise addition instead of concatenation
    // Fixed input normalization for the three image channels.
    double depth_scale = 1.0;
    double mean_curv_scale = 1e-2;
    double gauss_curv_scale = 1e-4;
    uint64_t init_seed = 1;
};

/// Probability of grasp success/failure for a (colourised depth, trajectory
/// encoding) pair: two convolutional pathways fused into a softmax-2 head.
class EvalNet {
public:
    explicit EvalNet(const EvalNetConfig& config = {});

    const EvalNetConfig& config() const { return config_; }

    /// Inference-mode forward pass; returns (p_succ, p_fail).
    Vec2 forward(const Tensor& image, const std::vector<double>& trajectory);

    /// Cross-entropy of one sample plus parameter-gradient accumulation
    /// (training mode: dropout active through `rng`).
    double sample_loss_and_grad(const Tensor& image, const std::vector<double>& trajectory,
                                int label, Rng& rng);

    /// Cross-entropy loss of one sample without gradients (inference mode).
    double sample_loss(const Tensor& image, const std::vector<double>& trajectory, int label);

    /// Gradient of p_succ w.r.t. the trajectory encoding (image held fixed);
    /// inference mode.
    std::vector<double> trajectory_gradient(const Tensor& image,
                                            const std::vector<double>& trajectory);

    void zero_grad();
    /// One plain gradient-descent step over the accumulated gradients.
    void apply_gradients(double lr, int batch_size);

    std::vector<double> snapshot_params() const;
    std::vector<double> snapshot_grads() const;
    void restore_params(const std::vector<double>& params);
    int num_params() const;

    void save(const std::string& path) const;
    static EvalNet load(const std::string& path);

private:
    Vec2 run(const Tensor& image, const std::vector<double>& trajectory, bool train, Rng& rng);
    std::vector<double> backprop(const Vec2& dlogits);

    EvalNetConfig config_;
    std::vector<std::unique_ptr<Layer>> vis_;   // conv/relu stack + dense + relu
    std::vector<std::unique_ptr<Layer>> traj_;  // conv1d/relu stack + dense + relu
    std::vector<std::unique_ptr<Layer>> head_;  // dense + relu + dropout + dense
    std::vector<Layer*> all_;
    Vec2 probs_ = Vec2::Zero();  // softmax output of the last run
};

/// Eq. 9 per-sample cross-entropy on a clamped probability.
double cross_entropy(double p_succ, int label);

}  // namespace dexgrasp::em
