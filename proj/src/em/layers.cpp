#include "dexgrasp/em/layers.hpp"

#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::em {

namespace {

void he_init(std::vector<double>& w, int n_weights, int fan_in, Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(2.0 / fan_in));
    for (int i = 0; i < n_weights; ++i) w[i] = g(rng);
    // Remaining entries (biases) stay zero.
}

}  // namespace

Conv2d::Conv2d(int in_c, int out_c, int kernel, int stride, int pad, Rng& rng)
    : in_c_(in_c), out_c_(out_c), k_(kernel), stride_(stride), pad_(pad) {
    const int n_w = out_c * in_c * kernel * kernel;
    params_.assign(n_w + out_c, 0.0);
    grads_.assign(params_.size(), 0.0);
    he_init(params_, n_w, in_c * kernel * kernel, rng);
}

Tensor Conv2d::forward(const Tensor& x, bool, Rng&) {
    if (x.shape.size() != 3 || x.shape[0] != in_c_)
        throw ShapeMismatch("Conv2d: bad input shape");
    x_ = x;
    const int H = x.shape[1], W = x.shape[2];
    const int OH = (H + 2 * pad_ - k_) / stride_ + 1;
    const int OW = (W + 2 * pad_ - k_) / stride_ + 1;
    Tensor y({out_c_, OH, OW});
    const double* w = params_.data();
    const double* b = params_.data() + out_c_ * in_c_ * k_ * k_;
    for (int oc = 0; oc < out_c_; ++oc) {
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                double acc = b[oc];
                const int iy0 = oy * stride_ - pad_;
                const int ix0 = ox * stride_ - pad_;
                for (int ic = 0; ic < in_c_; ++ic) {
                    const double* xc = x.data.data() + static_cast<size_t>(ic) * H * W;
                    const double* wc = w + ((oc * in_c_ + ic) * k_) * k_;
                    for (int i = 0; i < k_; ++i) {
                        const int iy = iy0 + i;
                        if (iy < 0 || iy >= H) continue;
                        for (int j = 0; j < k_; ++j) {
                            const int ix = ix0 + j;
                            if (ix < 0 || ix >= W) continue;
                            acc += wc[i * k_ + j] * xc[iy * W + ix];
                        }
                    }
                }
                y.data[(static_cast<size_t>(oc) * OH + oy) * OW + ox] = acc;
            }
        }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const int H = x_.shape[1], W = x_.shape[2];
    // dy may arrive flattened from a dense layer; recompute the output dims.
    const int OH = (H + 2 * pad_ - k_) / stride_ + 1;
    const int OW = (W + 2 * pad_ - k_) / stride_ + 1;
    Tensor dx(x_.shape);
    double* dw = grads_.data();
    double* db = grads_.data() + out_c_ * in_c_ * k_ * k_;
    const double* w = params_.data();
    for (int oc = 0; oc < out_c_; ++oc) {
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                const double g = dy.data[(static_cast<size_t>(oc) * OH + oy) * OW + ox];
                if (g == 0.0) continue;
                db[oc] += g;
                const int iy0 = oy * stride_ - pad_;
                const int ix0 = ox * stride_ - pad_;
                for (int ic = 0; ic < in_c_; ++ic) {
                    const double* xc = x_.data.data() + static_cast<size_t>(ic) * H * W;
                    double* dxc = dx.data.data() + static_cast<size_t>(ic) * H * W;
                    const double* wc = w + ((oc * in_c_ + ic) * k_) * k_;
                    double* dwc = dw + ((oc * in_c_ + ic) * k_) * k_;
                    for (int i = 0; i < k_; ++i) {
                        const int iy = iy0 + i;
                        if (iy < 0 || iy >= H) continue;
                        for (int j = 0; j < k_; ++j) {
                            const int ix = ix0 + j;
                            if (ix < 0 || ix >= W) continue;
                            dwc[i * k_ + j] += g * xc[iy * W + ix];
                            dxc[iy * W + ix] += g * wc[i * k_ + j];
                        }
                    }
                }
            }
        }
    }
    return dx;
}

Conv1d::Conv1d(int in_c, int out_c, int kernel, Rng& rng)
    : in_c_(in_c), out_c_(out_c), k_(kernel) {
    const int n_w = out_c * in_c * kernel;
    params_.assign(n_w + out_c, 0.0);
    grads_.assign(params_.size(), 0.0);
    he_init(params_, n_w, in_c * kernel, rng);
}

Tensor Conv1d::forward(const Tensor& x, bool, Rng&) {
    if (x.shape.size() != 2 || x.shape[0] != in_c_)
        throw ShapeMismatch("Conv1d: bad input shape");
    x_ = x;
    const int L = x.shape[1];
    const int pad = k_ / 2;
    Tensor y({out_c_, L});
    const double* w = params_.data();
    const double* b = params_.data() + out_c_ * in_c_ * k_;
    for (int oc = 0; oc < out_c_; ++oc) {
        for (int o = 0; o < L; ++o) {
            double acc = b[oc];
            for (int ic = 0; ic < in_c_; ++ic) {
                const double* xc = x.data.data() + static_cast<size_t>(ic) * L;
                const double* wc = w + (oc * in_c_ + ic) * k_;
                for (int i = 0; i < k_; ++i) {
                    const int p = o - pad + i;
                    if (p < 0 || p >= L) continue;
                    acc += wc[i] * xc[p];
                }
            }
            y.data[static_cast<size_t>(oc) * L + o] = acc;
        }
    }
    return y;
}

Tensor Conv1d::backward(const Tensor& dy) {
    const int L = x_.shape[1];
    const int pad = k_ / 2;
    Tensor dx(x_.shape);
    double* dw = grads_.data();
    double* db = grads_.data() + out_c_ * in_c_ * k_;
    const double* w = params_.data();
    for (int oc = 0; oc < out_c_; ++oc) {
        for (int o = 0; o < L; ++o) {
            const double g = dy.data[static_cast<size_t>(oc) * L + o];
            if (g == 0.0) continue;
            db[oc] += g;
            for (int ic = 0; ic < in_c_; ++ic) {
                const double* xc = x_.data.data() + static_cast<size_t>(ic) * L;
                double* dxc = dx.data.data() + static_cast<size_t>(ic) * L;
                const double* wc = w + (oc * in_c_ + ic) * k_;
                double* dwc = dw + (oc * in_c_ + ic) * k_;
                for (int i = 0; i < k_; ++i) {
                    const int p = o - pad + i;
                    if (p < 0 || p >= L) continue;
                    dwc[i] += g * xc[p];
                    dxc[p] += g * wc[i];
                }
            }
        }
    }
    return dx;
}

Dense::Dense(int in, int out, Rng& rng) : in_(in), out_(out) {
    params_.assign(static_cast<size_t>(in) * out + out, 0.0);
    grads_.assign(params_.size(), 0.0);
    he_init(params_, in * out, in, rng);
}

Tensor Dense::forward(const Tensor& x, bool, Rng&) {
    if (x.numel() != in_) throw ShapeMismatch("Dense: bad input size");
    x_ = x;
    Tensor y({out_});
    const double* w = params_.data();
    const double* b = params_.data() + static_cast<size_t>(in_) * out_;
    for (int o = 0; o < out_; ++o) {
        double acc = b[o];
        const double* wr = w + static_cast<size_t>(o) * in_;
        for (int i = 0; i < in_; ++i) acc += wr[i] * x.data[i];
        y.data[o] = acc;
    }
    return y;
}

Tensor Dense::backward(const Tensor& dy) {
    Tensor dx({in_});
    const double* w = params_.data();
    double* dw = grads_.data();
    double* db = grads_.data() + static_cast<size_t>(in_) * out_;
    for (int o = 0; o < out_; ++o) {
        const double g = dy.data[o];
        db[o] += g;
        const double* wr = w + static_cast<size_t>(o) * in_;
        double* dwr = dw + static_cast<size_t>(o) * in_;
        for (int i = 0; i < in_; ++i) {
            dwr[i] += g * x_.data[i];
            dx.data[i] += g * wr[i];
        }
    }
    return dx;
}

Tensor ReLU::forward(const Tensor& x, bool, Rng&) {
    x_ = x;
    Tensor y = x;
    for (double& v : y.data) v = std::max(v, 0.0);
    return y;
}

Tensor ReLU::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (int i = 0; i < dx.numel(); ++i)
        if (x_.data[i] <= 0.0) dx.data[i] = 0.0;
    return dx;
}

Tensor Dropout::forward(const Tensor& x, bool train, Rng& rng) {
    if (!train || rate_ <= 0.0) {
        mask_.assign(x.data.size(), 1.0);
        return x;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mask_.resize(x.data.size());
    const double keep = 1.0 - rate_;
    Tensor y = x;
    for (size_t i = 0; i < mask_.size(); ++i) {
        mask_[i] = u(rng) < keep ? 1.0 / keep : 0.0;
        y.data[i] *= mask_[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (size_t i = 0; i < mask_.size(); ++i) dx.data[i] *= mask_[i];
    return dx;
}

}  // namespace dexgrasp::em
