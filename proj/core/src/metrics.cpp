#include "rscorrect/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rscorrect/error.hpp"

namespace rscorrect {
namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

struct Region {
  int r0, r1, c0, c1;  // half-open
  int rows() const { return r1 - r0; }
  int cols() const { return c1 - c0; }
};

Region interior(const Frame& a, const Frame& b, int border, int min_side,
                const char* what) {
  require_same_shape(a, b, what);
  if (border < 0) throw ParameterError(std::string(what) + ": negative border");
  const Region reg{border, a.height() - border, border, a.width() - border};
  if (reg.rows() < min_side || reg.cols() < min_side) {
    throw DimensionError(std::string(what) + ": image too small for the border");
  }
  return reg;
}

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> k{};
  const int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double x = i - half;
    k[i] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable 'valid' filtering of a rows x cols plane.
std::vector<double> filter_valid(const std::vector<double>& p, int rows, int cols,
                                 const std::array<double, kSsimWindow>& k) {
  const int oc = cols - kSsimWindow + 1;
  const int orows = rows - kSsimWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(rows) * oc);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < oc; ++c) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += k[i] * p[static_cast<std::size_t>(r) * cols + c + i];
      tmp[static_cast<std::size_t>(r) * oc + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(orows) * oc);
  for (int r = 0; r < orows; ++r) {
    for (int c = 0; c < oc; ++c) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(r + i) * oc + c];
      out[static_cast<std::size_t>(r) * oc + c] = s;
    }
  }
  return out;
}

}  // namespace

double charbonnier(const Frame& a, const Frame& b, double eps, int border) {
  if (!(eps > 0.0)) throw ParameterError("charbonnier: eps must be positive");
  const Region reg = interior(a, b, border, 1, "charbonnier");
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = reg.r0; r < reg.r1; ++r) {
    for (int c = reg.c0; c < reg.c1; ++c) {
      for (int q = 0; q < a.channels(); ++q) {
        const double d = static_cast<double>(a.at(r, c, q)) - b.at(r, c, q);
        if (d != 0.0) sum += std::sqrt(d * d + eps * eps) - eps;
        ++n;
      }
    }
  }
  return std::max(0.0, sum / static_cast<double>(n));
}

double psnr(const Frame& a, const Frame& b, int border) {
  const Region reg = interior(a, b, border, 1, "psnr");
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = reg.r0; r < reg.r1; ++r) {
    for (int c = reg.c0; c < reg.c1; ++c) {
      for (int q = 0; q < a.channels(); ++q) {
        const double d = static_cast<double>(a.at(r, c, q)) - b.at(r, c, q);
        sum += d * d;
        ++n;
      }
    }
  }
  const double mse = sum / static_cast<double>(n);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Frame& a, const Frame& b, int border) {
  const Region reg = interior(a, b, border, kSsimWindow, "ssim");
  const auto k = gaussian_window();
  const double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  const double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  const int rows = reg.rows();
  const int cols = reg.cols();
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  double total = 0.0;
  for (int q = 0; q < a.channels(); ++q) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const auto i = static_cast<std::size_t>(r) * cols + c;
        x[i] = a.at(reg.r0 + r, reg.c0 + c, q);
        y[i] = b.at(reg.r0 + r, reg.c0 + c, q);
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
      }
    }
    const auto mx = filter_valid(x, rows, cols, k);
    const auto my = filter_valid(y, rows, cols, k);
    const auto sxx = filter_valid(xx, rows, cols, k);
    const auto syy = filter_valid(yy, rows, cols, k);
    const auto sxy = filter_valid(xy, rows, cols, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      sum += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mx.size());
  }
  return total / a.channels();
}

LossReport cycle_losses(const FramePair& inputs, const FramePair& recon_full,
                        const FramePair& recon_mid, int border, double eps) {
  LossReport rep;
  rep.border = border;
  rep.se_t2b = charbonnier(recon_full.first, inputs.first, eps, border);
  rep.se_b2t = charbonnier(recon_full.second, inputs.second, eps, border);
  rep.sme_t2b = charbonnier(recon_mid.first, inputs.first, eps, border);
  rep.sme_b2t = charbonnier(recon_mid.second, inputs.second, eps, border);
  rep.l_se = rep.se_t2b + rep.se_b2t;
  rep.l_sme = rep.sme_t2b + rep.sme_b2t;
  rep.l_self = rep.l_se + rep.l_sme;
  return rep;
}

}  // namespace rscorrect
