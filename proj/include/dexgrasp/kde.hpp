#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dexgrasp/kernels.hpp"

namespace dexgrasp {

/// Weighted kernel density estimate over SurfaceFeatures. Weights sum to 1.
class Kde {
public:
    struct Kernel {
        SurfaceFeature mean;
        double weight = 0.0;
    };

    Kde() = default;
    Kde(std::vector<Kernel> kernels, const KernelBandwidth& bandwidth);

    const std::vector<Kernel>& kernels() const { return kernels_; }
    const KernelBandwidth& bandwidth() const { return bandwidth_; }
    size_t size() const { return kernels_.size(); }

    double eval(const SurfaceFeature& x) const;
    SurfaceFeature sample(Rng& rng) const;
    int sample_kernel_index(Rng& rng) const;

    /// Multinomial resampling down to `budget` kernels, uniform reweight.
    Kde condense(size_t budget, Rng& rng) const;

    void save(std::ostream& os) const;
    static Kde load(std::istream& is);
    void save_file(const std::string& path) const;
    static Kde load_file(const std::string& path);

private:
    void normalize();

    std::vector<Kernel> kernels_;
    KernelBandwidth bandwidth_;
    std::vector<double> cumulative_;
};

/// Uniformly weighted KDE over all extracted surface features.
struct ObjectModel {
    Kde kde;
};

ObjectModel build_object_model(const std::vector<SurfaceFeature>& features,
                               const KernelBandwidth& bandwidth);

}  // namespace dexgrasp
