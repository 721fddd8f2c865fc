#include "dexgrasp/kde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

namespace {

constexpr uint32_t kMagic = 0x444b5844;  // "DXKD"
constexpr uint32_t kVersion = 1;

// Beyond this kernel count, kernels farther than 5 sigma_p in position are skipped.
constexpr size_t kCutoffThreshold = 10000;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("Kde: truncated stream");
    return v;
}

}  // namespace

Kde::Kde(std::vector<Kernel> kernels, const KernelBandwidth& bandwidth)
    : kernels_(std::move(kernels)), bandwidth_(bandwidth) {
    if (kernels_.empty()) throw EmptyInput("Kde: no kernels");
    if (!bandwidth_.valid()) throw std::invalid_argument("Kde: bandwidth must be positive");
    normalize();
}

void Kde::normalize() {
    double total = 0;
    for (const Kernel& k : kernels_) {
        if (k.weight < 0) throw std::invalid_argument("Kde: negative weight");
        total += k.weight;
    }
    if (total <= 0) throw std::invalid_argument("Kde: zero total weight");
    cumulative_.resize(kernels_.size());
    // Skip the rescale when already normalized so serialization round-trips bit-exactly.
    const bool rescale = std::abs(total - 1.0) > 1e-12;
    double acc = 0;
    for (size_t i = 0; i < kernels_.size(); ++i) {
        if (rescale) kernels_[i].weight /= total;
        acc += kernels_[i].weight;
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

double Kde::eval(const SurfaceFeature& x) const {
    const bool cutoff = kernels_.size() > kCutoffThreshold;
    const double max_d2 = 25.0 * bandwidth_.sigma_p * bandwidth_.sigma_p;
    double sum = 0;
    for (const Kernel& k : kernels_) {
        if (cutoff && (x.pose.p - k.mean.pose.p).squaredNorm() > max_d2) continue;
        sum += k.weight * eval_kernel(x, k.mean, bandwidth_);
    }
    return sum;
}

int Kde::sample_kernel_index(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u(rng));
    return static_cast<int>(std::min<size_t>(it - cumulative_.begin(), kernels_.size() - 1));
}

SurfaceFeature Kde::sample(Rng& rng) const {
    return sample_kernel(kernels_[sample_kernel_index(rng)].mean, bandwidth_, rng);
}

Kde Kde::condense(size_t budget, Rng& rng) const {
    if (budget < 1) throw std::invalid_argument("Kde::condense: budget must be >= 1");
    std::vector<Kernel> out;
    out.reserve(budget);
    for (size_t i = 0; i < budget; ++i) {
        Kernel k = kernels_[sample_kernel_index(rng)];
        k.weight = 1.0;
        out.push_back(k);
    }
    return Kde(std::move(out), bandwidth_);
}

void Kde::save(std::ostream& os) const {
    write_raw(os, kMagic);
    write_raw(os, kVersion);
    write_raw(os, static_cast<uint64_t>(kernels_.size()));
    write_raw(os, bandwidth_.sigma_p);
    write_raw(os, bandwidth_.sigma_q);
    write_raw(os, bandwidth_.sigma_r);
    for (const Kernel& k : kernels_) {
        const double row[10] = {k.mean.pose.p.x(), k.mean.pose.p.y(), k.mean.pose.p.z(),
                                k.mean.pose.q.w(), k.mean.pose.q.x(), k.mean.pose.q.y(),
                                k.mean.pose.q.z(), k.mean.r.x(),      k.mean.r.y(),
                                k.weight};
        os.write(reinterpret_cast<const char*>(row), sizeof(row));
    }
}

Kde Kde::load(std::istream& is) {
    if (read_raw<uint32_t>(is) != kMagic) throw IoError("Kde: bad magic");
    if (read_raw<uint32_t>(is) != kVersion) throw IoError("Kde: unsupported version");
    const uint64_t count = read_raw<uint64_t>(is);
    KernelBandwidth bw;
    bw.sigma_p = read_raw<double>(is);
    bw.sigma_q = read_raw<double>(is);
    bw.sigma_r = read_raw<double>(is);
    std::vector<Kernel> kernels(count);
    for (uint64_t i = 0; i < count; ++i) {
        double row[10];
        is.read(reinterpret_cast<char*>(row), sizeof(row));
        if (!is) throw IoError("Kde: truncated kernel table");
        Kernel& k = kernels[i];
        k.mean.pose.p = Vec3(row[0], row[1], row[2]);
        k.mean.pose.q = Quat(row[3], row[4], row[5], row[6]);
        k.mean.r = Vec2(row[7], row[8]);
        k.weight = row[9];
    }
    return Kde(std::move(kernels), bw);
}

void Kde::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("Kde: cannot open " + path);
    save(os);
}

Kde Kde::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("Kde: cannot open " + path);
    return load(is);
}

ObjectModel build_object_model(const std::vector<SurfaceFeature>& features,
                               const KernelBandwidth& bandwidth) {
    if (features.empty()) throw EmptyInput("build_object_model: no features");
    std::vector<Kde::Kernel> kernels(features.size());
    for (size_t i = 0; i < features.size(); ++i) kernels[i] = {features[i], 1.0};
    return ObjectModel{Kde(std::move(kernels), bandwidth)};
}

}  // namespace dexgrasp
