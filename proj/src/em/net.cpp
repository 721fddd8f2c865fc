#include "dexgrasp/em/net.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::em {

using nlohmann::json;

double cross_entropy(double p_succ, int label) {
    const double p = std::clamp(p_succ, 1e-12, 1.0 - 1e-12);
    return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

EvalNet::EvalNet(const EvalNetConfig& config) : config_(config) {
    if (config_.fuse_add && config_.vis_features != config_.traj_features)
        throw ShapeMismatch("EvalNet: additive fusion needs equal pathway widths");
    Rng rng(config_.init_seed);

    // Visual pathway: one stride-4 block, then stride-2 blocks.
    int c = kImageChannels, side = kImageSize;
    for (size_t i = 0; i < config_.vis_channels.size(); ++i) {
        const int stride = i == 0 ? 4 : 2;
        const int kernel = i == 0 ? 5 : 3;
        const int pad = kernel / 2;
        vis_.push_back(std::make_unique<Conv2d>(c, config_.vis_channels[i], kernel, stride, pad, rng));
        vis_.push_back(std::make_unique<ReLU>());
        side = (side + 2 * pad - kernel) / stride + 1;
        c = config_.vis_channels[i];
    }
    vis_.push_back(std::make_unique<Dense>(c * side * side, config_.vis_features, rng));
    vis_.push_back(std::make_unique<ReLU>());

    // Trajectory pathway: conv over the waypoint sequence, then a dense layer
    // that also sees the grasp-type one-hot block.
    c = kWaypointFloats;
    for (int tc : config_.traj_channels) {
        traj_.push_back(std::make_unique<Conv1d>(c, tc, 3, rng));
        traj_.push_back(std::make_unique<ReLU>());
        c = tc;
    }
    traj_.push_back(std::make_unique<Dense>(c * kWaypoints + kGraspTypes, config_.traj_features, rng));
    traj_.push_back(std::make_unique<ReLU>());

    const int fused_in =
        config_.fuse_add ? config_.vis_features : config_.vis_features + config_.traj_features;
    head_.push_back(std::make_unique<Dense>(fused_in, config_.fused_features, rng));
    head_.push_back(std::make_unique<ReLU>());
    head_.push_back(std::make_unique<Dropout>(config_.dropout));
    head_.push_back(std::make_unique<Dense>(config_.fused_features, 2, rng));

    for (auto* stack : {&vis_, &traj_, &head_})
        for (auto& l : *stack) all_.push_back(l.get());
}

Vec2 EvalNet::run(const Tensor& image, const std::vector<double>& trajectory, bool train,
                  Rng& rng) {
    if (image.shape != std::vector<int>{kImageChannels, kImageSize, kImageSize})
        throw ShapeMismatch("EvalNet: bad image shape");
    if (static_cast<int>(trajectory.size()) != kTrajectoryDim)
        throw ShapeMismatch("EvalNet: bad trajectory size");

    Tensor x = image;
    const double scales[3] = {config_.depth_scale, config_.mean_curv_scale,
                              config_.gauss_curv_scale};
    const size_t plane = static_cast<size_t>(kImageSize) * kImageSize;
    for (int ch = 0; ch < 3; ++ch)
        for (size_t i = 0; i < plane; ++i) x.data[ch * plane + i] *= scales[ch];
    for (auto& l : vis_) x = l->forward(x, train, rng);

    // Waypoint block as {27 channels, 10 steps}.
    Tensor t({kWaypointFloats, kWaypoints});
    for (int f = 0; f < kWaypointFloats; ++f)
        for (int s = 0; s < kWaypoints; ++s)
            t.data[static_cast<size_t>(f) * kWaypoints + s] = trajectory[s * kWaypointFloats + f];
    const size_t dense_at = traj_.size() - 2;
    for (size_t i = 0; i < dense_at; ++i) t = traj_[i]->forward(t, train, rng);
    Tensor flat({t.numel() + kGraspTypes});
    std::copy(t.data.begin(), t.data.end(), flat.data.begin());
    std::copy(trajectory.end() - kGraspTypes, trajectory.end(), flat.data.begin() + t.numel());
    for (size_t i = dense_at; i < traj_.size(); ++i) flat = traj_[i]->forward(flat, train, rng);

    Tensor fused;
    if (config_.fuse_add) {
        fused = x;
        for (int i = 0; i < fused.numel(); ++i) fused.data[i] += flat.data[i];
    } else {
        fused = Tensor({x.numel() + flat.numel()});
        std::copy(x.data.begin(), x.data.end(), fused.data.begin());
        std::copy(flat.data.begin(), flat.data.end(), fused.data.begin() + x.numel());
    }
    for (auto& l : head_) fused = l->forward(fused, train, rng);

    const double m = std::max(fused.data[0], fused.data[1]);
    const double e0 = std::exp(fused.data[0] - m), e1 = std::exp(fused.data[1] - m);
    probs_ = Vec2(e0 / (e0 + e1), e1 / (e0 + e1));
    return probs_;
}

std::vector<double> EvalNet::backprop(const Vec2& dlogits) {
    Tensor g({2});
    g.data[0] = dlogits(0);
    g.data[1] = dlogits(1);
    for (auto it = head_.rbegin(); it != head_.rend(); ++it) g = (*it)->backward(g);

    Tensor dv, dt;
    if (config_.fuse_add) {
        dv = g;
        dt = g;
    } else {
        dv = Tensor({config_.vis_features});
        dt = Tensor({config_.traj_features});
        std::copy(g.data.begin(), g.data.begin() + config_.vis_features, dv.data.begin());
        std::copy(g.data.begin() + config_.vis_features, g.data.end(), dt.data.begin());
    }
    for (auto it = vis_.rbegin(); it != vis_.rend(); ++it) dv = (*it)->backward(dv);

    const size_t dense_at = traj_.size() - 2;
    for (size_t i = traj_.size(); i > dense_at; --i) dt = traj_[i - 1]->backward(dt);
    // Split the dense input gradient back into conv features and one-hot.
    const int conv_numel = dt.numel() - kGraspTypes;
    Tensor dconv({config_.traj_channels.back(), kWaypoints});
    std::copy(dt.data.begin(), dt.data.begin() + conv_numel, dconv.data.begin());
    std::vector<double> dtraj(kTrajectoryDim, 0.0);
    std::copy(dt.data.begin() + conv_numel, dt.data.end(), dtraj.end() - kGraspTypes);
    for (size_t i = dense_at; i > 0; --i) dconv = traj_[i - 1]->backward(dconv);
    for (int f = 0; f < kWaypointFloats; ++f)
        for (int s = 0; s < kWaypoints; ++s)
            dtraj[s * kWaypointFloats + f] = dconv.data[static_cast<size_t>(f) * kWaypoints + s];
    return dtraj;
}

Vec2 EvalNet::forward(const Tensor& image, const std::vector<double>& trajectory) {
    Rng rng(0);
    return run(image, trajectory, false, rng);
}

double EvalNet::sample_loss_and_grad(const Tensor& image, const std::vector<double>& trajectory,
                                     int label, Rng& rng) {
    const Vec2 p = run(image, trajectory, true, rng);
    backprop(Vec2(p(0) - (label == 1 ? 1.0 : 0.0), p(1) - (label == 1 ? 0.0 : 1.0)));
    return cross_entropy(p(0), label);
}

double EvalNet::sample_loss(const Tensor& image, const std::vector<double>& trajectory,
                            int label) {
    return cross_entropy(forward(image, trajectory)(0), label);
}

std::vector<double> EvalNet::trajectory_gradient(const Tensor& image,
                                                 const std::vector<double>& trajectory) {
    const Vec2 p = forward(image, trajectory);
    // d p_succ / d logits through the softmax.
    const std::vector<double> g = backprop(Vec2(p(0) * (1.0 - p(0)), -p(0) * p(1)));
    zero_grad();  // discard the parameter gradients this backprop accumulated
    return g;
}

void EvalNet::zero_grad() {
    for (Layer* l : all_) l->zero_grad();
}

void EvalNet::apply_gradients(double lr, int batch_size) {
    const double scale = lr / std::max(1, batch_size);
    for (Layer* l : all_) {
        auto& p = l->params();
        const auto& g = l->grads();
        for (size_t i = 0; i < p.size(); ++i) p[i] -= scale * g[i];
    }
}

std::vector<double> EvalNet::snapshot_params() const {
    std::vector<double> out;
    for (const Layer* l : all_) out.insert(out.end(), l->params().begin(), l->params().end());
    return out;
}

std::vector<double> EvalNet::snapshot_grads() const {
    std::vector<double> out;
    for (const Layer* l : all_) out.insert(out.end(), l->grads().begin(), l->grads().end());
    return out;
}

void EvalNet::restore_params(const std::vector<double>& params) {
    size_t at = 0;
    for (Layer* l : all_) {
        auto& p = l->params();
        if (at + p.size() > params.size()) throw ShapeMismatch("EvalNet: parameter blob too short");
        std::copy(params.begin() + at, params.begin() + at + p.size(), p.begin());
        at += p.size();
    }
    if (at != params.size()) throw ShapeMismatch("EvalNet: parameter blob too long");
}

int EvalNet::num_params() const {
    int n = 0;
    for (const Layer* l : all_) n += static_cast<int>(l->params().size());
    return n;
}

void EvalNet::save(const std::string& path) const {
    json j;
    j["version"] = 1;
    j["config"] = {{"vis_channels", config_.vis_channels},
                   {"traj_channels", config_.traj_channels},
                   {"vis_features", config_.vis_features},
                   {"traj_features", config_.traj_features},
                   {"fused_features", config_.fused_features},
                   {"dropout", config_.dropout},
                   {"fuse_add", config_.fuse_add},
                   {"depth_scale", config_.depth_scale},
                   {"mean_curv_scale", config_.mean_curv_scale},
                   {"gauss_curv_scale", config_.gauss_curv_scale},
                   {"init_seed", config_.init_seed}};
    const std::string header = j.dump();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("EvalNet::save: cannot write " + path);
    const uint64_t len = header.size();
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(header.data(), static_cast<std::streamsize>(len));
    const std::vector<double> blob = snapshot_params();
    os.write(reinterpret_cast<const char*>(blob.data()),
             static_cast<std::streamsize>(blob.size() * sizeof(double)));
}

EvalNet EvalNet::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("EvalNet::load: cannot open " + path);
    uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string header(len, '\0');
    is.read(header.data(), static_cast<std::streamsize>(len));
    const json j = json::parse(header);
    if (j.at("version") != 1) throw IoError("EvalNet::load: unsupported version");
    EvalNetConfig cfg;
    const json& c = j.at("config");
    cfg.vis_channels = c.at("vis_channels").get<std::vector<int>>();
    cfg.traj_channels = c.at("traj_channels").get<std::vector<int>>();
    cfg.vis_features = c.at("vis_features");
    cfg.traj_features = c.at("traj_features");
    cfg.fused_features = c.at("fused_features");
    cfg.dropout = c.at("dropout");
    cfg.fuse_add = c.at("fuse_add");
    cfg.depth_scale = c.at("depth_scale");
    cfg.mean_curv_scale = c.at("mean_curv_scale");
    cfg.gauss_curv_scale = c.at("gauss_curv_scale");
    cfg.init_seed = c.at("init_seed");
    EvalNet net(cfg);
    std::vector<double> blob(net.num_params());
    is.read(reinterpret_cast<char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(double)));
    if (!is) throw IoError("EvalNet::load: truncated parameter blob");
    net.restore_params(blob);
    return net;
}

}  // namespace dexgrasp::em
