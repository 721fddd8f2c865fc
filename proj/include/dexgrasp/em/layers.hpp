#pragma once

#include <memory>
#include <vector>

#include "dexgrasp/em/tensor.hpp"
#include "dexgrasp/kernels.hpp"

namespace dexgrasp::em {

/// Single-sample layer with cached activations for backpropagation. Parameters
/// live in one flat vector (weights first, then biases) so the optimizer and
/// the checkpoint writer can treat every layer uniformly.
class Layer {
public:
    virtual ~Layer() = default;

    virtual Tensor forward(const Tensor& x, bool train, Rng& rng) = 0;
    /// Gradient w.r.t. the cached input; accumulates parameter gradients.
    virtual Tensor backward(const Tensor& dy) = 0;

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& grads() { return grads_; }
    const std::vector<double>& grads() const { return grads_; }
    void zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

protected:
    std::vector<double> params_;
    std::vector<double> grads_;
};

/// 2D convolution over {C, H, W}, square kernel, zero padding.
class Conv2d : public Layer {
public:
    Conv2d(int in_c, int out_c, int kernel, int stride, int pad, Rng& rng);
    Tensor forward(const Tensor& x, bool train, Rng& rng) override;
    Tensor backward(const Tensor& dy) override;

private:
    int in_c_, out_c_, k_, stride_, pad_;
    Tensor x_;
};

/// 1D convolution over {C, L}, stride 1, same padding.
class Conv1d : public Layer {
public:
    Conv1d(int in_c, int out_c, int kernel, Rng& rng);
    Tensor forward(const Tensor& x, bool train, Rng& rng) override;
    Tensor backward(const Tensor& dy) override;

private:
    int in_c_, out_c_, k_;
    Tensor x_;
};

/// Fully connected layer over a flat input.
class Dense : public Layer {
public:
    Dense(int in, int out, Rng& rng);
    Tensor forward(const Tensor& x, bool train, Rng& rng) override;
    Tensor backward(const Tensor& dy) override;

private:
    int in_, out_;
    Tensor x_;
};

class ReLU : public Layer {
public:
    Tensor forward(const Tensor& x, bool train, Rng& rng) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor x_;
};

/// Inverted dropout; identity in inference mode.
class Dropout : public Layer {
public:
    explicit Dropout(double rate) : rate_(rate) {}
    Tensor forward(const Tensor& x, bool train, Rng& rng) override;
    Tensor backward(const Tensor& dy) override;

private:
    double rate_;
    std::vector<double> mask_;
};

}  // namespace dexgrasp::em
