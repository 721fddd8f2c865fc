#pragma once

#include <numeric>
#include <vector>

namespace dexgrasp::em {

/// Dense row-major tensor (channel-first for images: {C, H, W}).
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s)
        : shape(std::move(s)),
          data(std::accumulate(shape.begin(), shape.end(), size_t{1},
                               [](size_t a, int b) { return a * static_cast<size_t>(b); }),
               0.0) {}

    int numel() const { return static_cast<int>(data.size()); }
};

}  // namespace dexgrasp::em
