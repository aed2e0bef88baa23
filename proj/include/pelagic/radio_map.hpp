#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pelagic/config.hpp"
#include "pelagic/csv.hpp"
#include "pelagic/errors.hpp"

namespace pelagic {

// One measured excess-loss sample on the ocean surface.
struct RadioMapSample {
    double x_m = 0.0;
    double y_m = 0.0;
    double excess_db = 0.0;
};

/// Gridded large-scale excess-loss field (dB above the distance-only path
/// loss), built from measurement samples. Cells with no samples hold exactly
/// 0 dB. Immutable after build; lookups are bilinear between cell centers and
/// clamp to the nearest edge outside the extent.
class RadioMap {
public:
    RadioMap() = default;

    RadioMap(double origin_x_m, double origin_y_m, double cell_size_m,
             std::size_t nx, std::size_t ny)
        : origin_x_(origin_x_m), origin_y_(origin_y_m), cell_size_(cell_size_m),
          nx_(nx), ny_(ny), excess_db_(nx * ny, 0.0), samples_(nx * ny, 0) {
        if (cell_size_m <= 0.0) throw std::invalid_argument("radio map cell size must be > 0");
        if (nx == 0 || ny == 0) throw std::invalid_argument("radio map extent must be positive");
    }

    bool empty() const { return nx_ == 0 || ny_ == 0; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double origin_x() const { return origin_x_; }
    double origin_y() const { return origin_y_; }
    double cell_size_m() const { return cell_size_; }

    double cell_excess_db(std::size_t i, std::size_t j) const { return excess_db_[j * nx_ + i]; }
    int cell_samples(std::size_t i, std::size_t j) const { return samples_[j * nx_ + i]; }

    double cell_center_x(std::size_t i) const { return origin_x_ + (double(i) + 0.5) * cell_size_; }
    double cell_center_y(std::size_t j) const { return origin_y_ + (double(j) + 0.5) * cell_size_; }

    /// Interpolated excess loss at a position; 0 dB for an empty map.
    double lookup(double x_m, double y_m) const {
        if (empty()) return 0.0;
        // Continuous coordinates in cell-center space, clamped so queries
        // outside the extent return the nearest-edge value.
        const double u = clamp((x_m - origin_x_) / cell_size_ - 0.5, nx_);
        const double v = clamp((y_m - origin_y_) / cell_size_ - 0.5, ny_);
        const std::size_t i0 = static_cast<std::size_t>(u);
        const std::size_t j0 = static_cast<std::size_t>(v);
        const std::size_t i1 = std::min(i0 + 1, nx_ - 1);
        const std::size_t j1 = std::min(j0 + 1, ny_ - 1);
        const double fx = u - double(i0);
        const double fy = v - double(j0);
        const double a = cell_excess_db(i0, j0) * (1 - fx) + cell_excess_db(i1, j0) * fx;
        const double b = cell_excess_db(i0, j1) * (1 - fx) + cell_excess_db(i1, j1) * fx;
        return a * (1 - fy) + b * fy;
    }

    /// Builds a map whose cells hold the arithmetic mean of the samples that
    /// fall inside them. Samples outside the extent are rejected and counted
    /// in *rejected (if given). The result is independent of sample order.
    static RadioMap build(std::span<const RadioMapSample> samples, double origin_x_m,
                          double origin_y_m, double cell_size_m, std::size_t nx,
                          std::size_t ny, std::size_t* rejected = nullptr) {
        RadioMap map(origin_x_m, origin_y_m, cell_size_m, nx, ny);
        std::vector<std::vector<double>> bucket(nx * ny);
        std::size_t outside = 0;
        for (const RadioMapSample& s : samples) {
            if (!std::isfinite(s.x_m) || !std::isfinite(s.y_m) || !std::isfinite(s.excess_db))
                throw std::invalid_argument("radio map samples must be finite");
            const double u = (s.x_m - origin_x_m) / cell_size_m;
            const double v = (s.y_m - origin_y_m) / cell_size_m;
            if (u < 0.0 || v < 0.0 || u >= double(nx) || v >= double(ny)) {
                ++outside;
                continue;
            }
            const std::size_t i = static_cast<std::size_t>(u);
            const std::size_t j = static_cast<std::size_t>(v);
            bucket[j * nx + i].push_back(s.excess_db);
        }
        for (std::size_t c = 0; c < bucket.size(); ++c) {
            if (bucket[c].empty()) continue;
            // Canonical summation order makes the build permutation-invariant
            // down to the last bit.
            std::sort(bucket[c].begin(), bucket[c].end());
            double sum = 0.0;
            for (double v : bucket[c]) sum += v;
            map.excess_db_[c] = sum / double(bucket[c].size());
            map.samples_[c] = static_cast<int>(bucket[c].size());
        }
        if (rejected != nullptr) *rejected = outside;
        return map;
    }

    // Persistence: `<prefix>.csv` holds the grid, `<prefix>.meta.toml` the
    // geometry sidecar.
    static constexpr const char* kCsvHeader = "i,j,excess_db,samples";

    void save_grid(std::ostream& os) const {
        os << kCsvHeader << "\n";
        for (std::size_t i = 0; i < nx_; ++i)
            for (std::size_t j = 0; j < ny_; ++j)
                os << i << "," << j << "," << csv::format_double(cell_excess_db(i, j)) << ","
                   << cell_samples(i, j) << "\n";
    }

    void save_meta(std::ostream& os) const {
        os << "[radiomap]\n";
        os << "origin_x_m = " << csv::format_double(origin_x_) << "\n";
        os << "origin_y_m = " << csv::format_double(origin_y_) << "\n";
        os << "cell_size_m = " << csv::format_double(cell_size_) << "\n";
        os << "nx = " << nx_ << "\n";
        os << "ny = " << ny_ << "\n";
    }

    void save(const std::string& prefix) const {
        std::ofstream grid(prefix + ".csv");
        if (!grid) throw ConfigError("cannot write '" + prefix + ".csv'");
        save_grid(grid);
        std::ofstream meta(prefix + ".meta.toml");
        if (!meta) throw ConfigError("cannot write '" + prefix + ".meta.toml'");
        save_meta(meta);
    }

    static RadioMap load(const std::string& prefix) {
        const config::Table meta = config::parse_file(prefix + ".meta.toml");
        meta.reject_unknown("radiomap.",
                            {"radiomap.origin_x_m", "radiomap.origin_y_m",
                             "radiomap.cell_size_m", "radiomap.nx", "radiomap.ny"});
        RadioMap map(meta.get_double("radiomap.origin_x_m", 0.0),
                     meta.get_double("radiomap.origin_y_m", 0.0),
                     meta.get_double("radiomap.cell_size_m", 1.0),
                     static_cast<std::size_t>(meta.get_double("radiomap.nx", 0.0)),
                     static_cast<std::size_t>(meta.get_double("radiomap.ny", 0.0)));
        std::ifstream grid(prefix + ".csv");
        if (!grid) throw ConfigError("cannot open '" + prefix + ".csv'");
        std::string line;
        std::getline(grid, line);
        csv::expect_header(line, kCsvHeader, "radio map grid");
        while (std::getline(grid, line)) {
            line = csv::strip_cr(line);
            if (line.empty()) continue;
            const auto fields = csv::split(line);
            if (fields.size() != 4) throw ConfigError("radio map grid: malformed row '" + line + "'");
            const auto i = csv::parse_int(fields[0]);
            const auto j = csv::parse_int(fields[1]);
            const auto excess = csv::parse_double(fields[2]);
            const auto count = csv::parse_int(fields[3]);
            if (!i || !j || !excess || !count || *i < 0 || *j < 0 ||
                std::size_t(*i) >= map.nx_ || std::size_t(*j) >= map.ny_)
                throw ConfigError("radio map grid: malformed row '" + line + "'");
            map.excess_db_[std::size_t(*j) * map.nx_ + std::size_t(*i)] = *excess;
            map.samples_[std::size_t(*j) * map.nx_ + std::size_t(*i)] = static_cast<int>(*count);
        }
        return map;
    }

private:
    double clamp(double t, std::size_t n) const {
        return std::min(std::max(t, 0.0), double(n - 1));
    }

    double origin_x_ = 0.0;
    double origin_y_ = 0.0;
    double cell_size_ = 0.0;
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> excess_db_;
    std::vector<int> samples_;
};

} // namespace pelagic
