#include "xld/projection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "xld/error.hpp"
#include "xld/random.hpp"

namespace xld {
namespace {

using Matrix = std::vector<double>;  // row-major

/// Cyclic Jacobi on a small symmetric p x p matrix. Returns eigenvalues
/// (descending) and the matching eigenvectors as columns of `vecs`.
std::vector<double> jacobi_eigen(Matrix a, std::size_t p, Matrix& vecs) {
  vecs.assign(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) vecs[i * p + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      diag += a[i * p + i] * a[i * p + i];
      for (std::size_t j = i + 1; j < p; ++j) off += a[i * p + j] * a[i * p + j];
    }
    if (off <= 1e-30 * diag || off == 0.0) break;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double aij = a[i * p + j];
        if (aij == 0.0) continue;
        const double theta = (a[j * p + j] - a[i * p + i]) / (2.0 * aij);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < p; ++r) {
          const double ari = a[r * p + i], arj = a[r * p + j];
          a[r * p + i] = c * ari - s * arj;
          a[r * p + j] = s * ari + c * arj;
        }
        for (std::size_t r = 0; r < p; ++r) {
          const double air = a[i * p + r], ajr = a[j * p + r];
          a[i * p + r] = c * air - s * ajr;
          a[j * p + r] = s * air + c * ajr;
        }
        for (std::size_t r = 0; r < p; ++r) {
          const double vri = vecs[r * p + i], vrj = vecs[r * p + j];
          vecs[r * p + i] = c * vri - s * vrj;
          vecs[r * p + j] = s * vri + c * vrj;
        }
      }
    }
  }
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * p + x] > a[y * p + y]; });
  std::vector<double> values(p);
  Matrix sorted(p * p);
  for (std::size_t c = 0; c < p; ++c) {
    values[c] = a[order[c] * p + order[c]];
    for (std::size_t r = 0; r < p; ++r) sorted[r * p + c] = vecs[r * p + order[c]];
  }
  vecs = std::move(sorted);
  return values;
}

/// Columns of the d x p matrix `v` made orthonormal in order (modified
/// Gram-Schmidt, two passes). Collapsed columns are replaced by unit axes.
void orthonormalize(Matrix& v, std::size_t d, std::size_t p) {
  std::size_t next_axis = 0;
  for (std::size_t c = 0; c < p; ++c) {
    for (int attempt = 0;; ++attempt) {
      const double before = [&] {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) s += v[r * p + c] * v[r * p + c];
        return std::sqrt(s);
      }();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t prev = 0; prev < c; ++prev) {
          double proj = 0.0;
          for (std::size_t r = 0; r < d; ++r) proj += v[r * p + prev] * v[r * p + c];
          for (std::size_t r = 0; r < d; ++r) v[r * p + c] -= proj * v[r * p + prev];
        }
      }
      double n = 0.0;
      for (std::size_t r = 0; r < d; ++r) n += v[r * p + c] * v[r * p + c];
      n = std::sqrt(n);
      if (n > 1e-10 * before && n > 1e-300) {
        for (std::size_t r = 0; r < d; ++r) v[r * p + c] /= n;
        break;
      }
      if (attempt > static_cast<int>(d)) throw Error(Errc::insufficient_data, "cannot complete basis");
      for (std::size_t r = 0; r < d; ++r) v[r * p + c] = (r == next_axis % d) ? 1.0 : 0.0;
      ++next_axis;
    }
  }
}

/// out (d x p) = cov (d x d) * v (d x p)
void multiply(const Matrix& cov, const Matrix& v, Matrix& out, std::size_t d, std::size_t p) {
  out.assign(d * p, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(d); ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    for (std::size_t k = 0; k < d; ++k) {
      const double c = cov[r * d + k];
      for (std::size_t j = 0; j < p; ++j) out[r * p + j] += c * v[k * p + j];
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace

std::vector<double> covariance(const PointSet& points, const std::vector<double>& mean) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  Matrix cov(d * d, 0.0);
  // Row i of the upper triangle sums over points in index order.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(d); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> acc(d - i, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const float* row = points.row_ptr(s);
      const double ci = row[i] - mean[i];
      for (std::size_t j = i; j < d; ++j) acc[j - i] += ci * (row[j] - mean[j]);
    }
    for (std::size_t j = i; j < d; ++j) cov[i * d + j] = acc[j - i] / static_cast<double>(n - 1);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) cov[i * d + j] = cov[j * d + i];
  }
  return cov;
}

Projection2D pca_2d(const PointSet& points, const PcaOptions& options) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  if (n < 3) throw Error(Errc::insufficient_data, "projection needs at least 3 points, got " + std::to_string(n));

  Projection2D out;
  out.mean.assign(d, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += points.row_ptr(s)[j];
  }
  for (auto& m : out.mean) m /= static_cast<double>(n);

  const Matrix cov = covariance(points, out.mean);
  double trace = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    trace += cov[i * d + i];
    scale = std::max(scale, std::abs(cov[i * d + i]));
  }
  for (auto& c : out.components) c.assign(d, 0.0);

  if (trace > 1e-300 && scale > 0.0) {
    const std::size_t p = std::min(d, std::max<std::size_t>(options.block, 2));
    const std::size_t want = std::min<std::size_t>(2, p);
    Matrix v(d * p);
    Rng rng(0x9ca5eedULL);
    for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    orthonormalize(v, d, p);

    Matrix w, h(p * p), y, ritz(d * p), cov_ritz(d * p);
    std::vector<double> theta;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      multiply(cov, v, w, d, p);
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
          double s = 0.0;
          for (std::size_t r = 0; r < d; ++r) s += v[r * p + a] * w[r * p + b];
          h[a * p + b] = s;
        }
      }
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) h[a * p + b] = h[b * p + a] = 0.5 * (h[a * p + b] + h[b * p + a]);
      }
      theta = jacobi_eigen(h, p, y);
      std::fill(ritz.begin(), ritz.end(), 0.0);
      std::fill(cov_ritz.begin(), cov_ritz.end(), 0.0);
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < p; ++k) {
          const double vk = v[r * p + k], wk = w[r * p + k];
          for (std::size_t c = 0; c < p; ++c) {
            ritz[r * p + c] += vk * y[k * p + c];
            cov_ritz[r * p + c] += wk * y[k * p + c];
          }
        }
      }
      bool converged = true;
      const double lambda_max = std::max(theta[0], 1e-300);
      for (std::size_t c = 0; c < want; ++c) {
        double res = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          const double e = cov_ritz[r * p + c] - theta[c] * ritz[r * p + c];
          res += e * e;
        }
        if (std::sqrt(res) > options.tolerance * lambda_max) converged = false;
      }
      if (converged) break;
      v = cov_ritz;
      orthonormalize(v, d, p);
    }

    for (std::size_t c = 0; c < want; ++c) {
      // Rank deficiency: a component with no variance stays zero.
      if (theta[c] <= 1e-12 * trace) break;
      for (std::size_t r = 0; r < d; ++r) out.components[c][r] = ritz[r * p + c];
      double nrm = 0.0;
      for (double x : out.components[c]) nrm += x * x;
      nrm = std::sqrt(nrm);
      std::size_t arg = 0;
      for (std::size_t r = 0; r < d; ++r) {
        out.components[c][r] /= nrm;
        if (std::abs(out.components[c][r]) > std::abs(out.components[c][arg])) arg = r;
      }
      if (out.components[c][arg] < 0) {
        for (auto& x : out.components[c]) x = -x;
      }
      out.explained[c] = std::clamp(theta[c] / trace, 0.0, 1.0);
    }
  }

  out.points.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const float* row = points.row_ptr(s);
    double x = 0.0, yv = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - out.mean[j];
      x += c * out.components[0][j];
      yv += c * out.components[1][j];
    }
    out.points.push_back({points.meta(s).key, x, yv});
  }
  return out;
}

void export_plot_data(const Projection2D& projection, const std::filesystem::path& path) {
  if (projection.points.empty()) throw Error(Errc::invalid_argument, "nothing to export");
  std::ostringstream os;
  os << "key\tseries\tx\ty\n";
  for (const auto& p : projection.points) {
    os << p.key.id << '\t' << to_string(p.key.type) << '\t' << format_double(p.x) << '\t'
       << format_double(p.y) << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open for writing: " + path.string());
  out << os.str();
  out.close();
  if (!out) throw Error(Errc::io, "write failed: " + path.string());
}

std::vector<PlotRow> read_plot_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "key\tseries\tx\ty") {
    throw Error(Errc::format, path.string() + ": missing plot-data header");
  }
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    PlotRow r;
    std::string x, y;
    if (!std::getline(ls, r.key, '\t') || !std::getline(ls, r.series, '\t') ||
        !std::getline(ls, x, '\t') || !std::getline(ls, y)) {
      throw Error(Errc::format, path.string() + ": malformed row '" + line + "'");
    }
    auto parse = [&](const std::string& s, double& v) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::format, path.string() + ": bad number '" + s + "'");
      }
    };
    parse(x, r.x);
    parse(y, r.y);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace reference {

std::vector<double> covariance_serial(const PointSet& points, const std::vector<double>& mean) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const float* row = points.row_ptr(s);
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = row[i] - mean[i];
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += ci * (row[j] - mean[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= static_cast<double>(n - 1);
      cov[j * d + i] = cov[i * d + j];
    }
  }
  return cov;
}

}  // namespace reference
}  // namespace xld
