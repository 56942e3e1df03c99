#pragma once

// Two-component principal projection of embedded points, plus a tab-separated
// export for external plotting.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "xld/knn.hpp"

namespace xld {

struct ProjectedPoint {
  RecordKey key;
  double x = 0.0;
  double y = 0.0;
};

struct Projection2D {
  std::vector<ProjectedPoint> points;  // input order
  std::array<std::vector<double>, 2> components;
  /// Fraction of total variance captured by each component.
  std::array<double, 2> explained{0.0, 0.0};
  std::vector<double> mean;
};

struct PcaOptions {
  /// Convergence threshold on |C v - lambda v| relative to the largest
  /// eigenvalue.
  double tolerance = 1e-10;
  std::size_t block = 16;
  std::size_t max_iterations = 20000;
};

/// Mean-centers the rows and projects them onto the two leading
/// eigenvectors of the sample covariance. Each component is signed so that
/// its largest-magnitude entry is positive. With rank below 2 the missing
/// components are zero vectors with zero explained variance.
/// Throws Errc::insufficient_data for fewer than 3 points.
Projection2D pca_2d(const PointSet& points, const PcaOptions& options = {});

/// Upper-triangle rows computed in parallel; (n - 1) denominator.
std::vector<double> covariance(const PointSet& points, const std::vector<double>& mean);

/// Header "key\tseries\tx\ty", one row per point; series is the
/// coordinate type. Throws Errc::invalid_argument when empty, Errc::io on
/// write failure.
void export_plot_data(const Projection2D& projection, const std::filesystem::path& path);

struct PlotRow {
  std::string key;
  std::string series;
  double x = 0.0;
  double y = 0.0;
};

std::vector<PlotRow> read_plot_data(const std::filesystem::path& path);

namespace reference {
std::vector<double> covariance_serial(const PointSet& points, const std::vector<double>& mean);
}  // namespace reference

}  // namespace xld
