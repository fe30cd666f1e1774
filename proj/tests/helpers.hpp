#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arfit/rng.hpp"
#include "arfit/types.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("arfit_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

/// Pacf draw from the library's stationary-region sampler distribution.
inline arfit::Pacf sample_pacf(std::size_t order, arfit::SplitMix64& rng) {
    arfit::Pacf pacf;
    for (std::size_t k = 1; k <= order; ++k) {
        const double u = rng.beta((static_cast<double>(k) + 1.0) / 2.0,
                                  static_cast<double>(k) / 2.0 + 1.0);
        pacf.values.push_back(2.0 * u - 1.0);
    }
    return pacf;
}

inline arfit::TimeSeries gaussian_series(std::size_t n, arfit::SplitMix64& rng) {
    arfit::TimeSeries series;
    series.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) series.values.push_back(rng.normal());
    return series;
}

}  // namespace testutil
