#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "suge/dataset.hpp"
#include "suge/geometry.hpp"
#include "suge/matrix.hpp"

namespace suge::test {

inline GazeLabel random_label(std::mt19937_64& rng, double yaw_max = 1.2, double pitch_max = 0.8) {
    std::uniform_real_distribution<double> yaw(-yaw_max, yaw_max), pitch(-pitch_max, pitch_max);
    return {yaw(rng), pitch(rng)};
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = n(rng);
    return m;
}

inline NoiseSpec no_noise() {
    NoiseSpec n;
    n.label_noise_fraction = 0.0;
    n.input_corrupt_fraction = 0.0;
    return n;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("suge_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Same-person brute force: every candidate sorted by (distance, row).
inline std::vector<std::size_t> brute_knn(const Matrix& f, const std::vector<std::int64_t>& person, std::size_t i,
                                          std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < f.rows(); ++j) {
        if (j == i || person[j] != person[i]) continue;
        double d = 0;
        for (std::size_t c = 0; c < f.cols(); ++c) d += (f(i, c) - f(j, c)) * (f(i, c) - f(j, c));
        all.emplace_back(d, j);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < std::min(k, all.size()); ++j) out.push_back(all[j].second);
    return out;
}

}  // namespace suge::test
