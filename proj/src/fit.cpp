#include <algorithm>
#include <cmath>

#include "nqsim/analysis.hpp"
#include "nqsim/rng.hpp"

namespace nqsim {

std::int64_t sample_counts(double intensity, double mean_counts, std::uint64_t seed, std::uint64_t index) {
  if (!(intensity >= 0) || !(mean_counts >= 0)) throw ArgumentError("intensity and mean counts must be nonnegative");
  const double mu = intensity * mean_counts;
  if (mu == 0.0) return 0;
  CounterRng rng(stream_key(seed, {index}));
  if (mu < 30.0) {
    const double u = rng.uniform();
    double p = std::exp(-mu), F = p;
    std::int64_t k = 0;
    while (u > F && k < 1000) {
      ++k;
      p *= mu / static_cast<double>(k);
      F += p;
    }
    return k;
  }
  const double z = rng.normal();
  double k = std::floor(mu + std::sqrt(mu) * z + 0.5);
  return k < 0 ? 0 : static_cast<std::int64_t>(k);
}

void FringeScan::validate() const {
  const auto n = xs.size();
  if (intensity_O.size() != n || intensity_H.size() != n) throw ArgumentError("scan arrays differ in length");
  if (noisy() && (counts_O.size() != n || counts_H.size() != n)) throw ArgumentError("scan count arrays differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(xs[i] > xs[i - 1])) throw ArgumentError("scan parameter must be strictly increasing");
  for (auto c : counts_O)
    if (c < 0) throw ArgumentError("negative counts");
  for (auto c : counts_H)
    if (c < 0) throw ArgumentError("negative counts");
}

FringeScan make_scan(std::string param, std::vector<double> xs, std::vector<double> intensity_O,
                     std::vector<double> intensity_H, double mean_counts, std::uint64_t seed) {
  FringeScan s;
  s.param = std::move(param);
  s.xs = std::move(xs);
  s.intensity_O = std::move(intensity_O);
  s.intensity_H = std::move(intensity_H);
  s.mean_counts = mean_counts;
  s.seed = seed;
  if (s.intensity_H.empty()) s.intensity_H.assign(s.xs.size(), 0.0);
  if (mean_counts > 0) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      s.counts_O.push_back(sample_counts(std::max(0.0, s.intensity_O[i]), mean_counts, seed, 2 * i));
      s.counts_H.push_back(sample_counts(std::max(0.0, s.intensity_H[i]), mean_counts, seed, 2 * i + 1));
    }
  }
  s.validate();
  return s;
}

namespace {

FitResult fit_linear_harmonic(const std::vector<double>& xs, const std::vector<double>& ys,
                              const std::vector<double>& var, bool absolute_sigma) {
  const std::size_t n = xs.size();
  if (ys.size() != n || var.size() != n) throw ArgumentError("fit arrays differ in length");
  if (n < 5) throw ArgumentError("fringe fit needs at least 5 points");
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if ((*hi - *lo) * double(n) / double(n - 1) < 2.0 * kPi - 1e-9)
    throw ArgumentError("fringe fit needs the scan to span at least one period");
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::cos(xs[i]);
    X(i, 2) = std::sin(xs[i]);
    y(i) = ys[i];
    if (!(var[i] > 0)) throw ArgumentError("fit variances must be positive");
    w(i) = 1.0 / var[i];
  }
  Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
  Eigen::Matrix3d N = XtW * X;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(N);
  if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
    throw ArgumentError("degenerate fringe design matrix");
  Eigen::Vector3d p = N.ldlt().solve(XtW * y);
  Eigen::VectorXd res = y - X * p;
  FitResult f;
  f.chi2 = res.dot(w.asDiagonal() * res);
  f.dof = static_cast<int>(n) - 3;
  Eigen::Matrix3d cov = N.inverse();
  if (!absolute_sigma && f.dof > 0) cov *= f.chi2 / f.dof;
  const double a0 = p(0), ac = p(1), as = p(2);
  const double A = std::hypot(ac, as);
  f.offset = a0;
  f.amplitude = A;
  f.phase = A > 0 ? wrap_phase(std::atan2(-as, ac)) : 0.0;
  f.contrast = a0 != 0 ? A / a0 : 0.0;
  f.offset_err = std::sqrt(std::max(0.0, cov(0, 0)));
  if (A > 0) {
    Eigen::Vector3d gA(0, ac / A, as / A);
    Eigen::Vector3d gP(0, as / (A * A), -ac / (A * A));
    f.amplitude_err = std::sqrt(std::max(0.0, gA.dot(cov * gA)));
    f.phase_err = std::sqrt(std::max(0.0, gP.dot(cov * gP)));
    if (a0 != 0) {
      Eigen::Vector3d gC(-A / (a0 * a0), ac / (A * a0), as / (A * a0));
      f.contrast_err = std::sqrt(std::max(0.0, gC.dot(cov * gC)));
    }
  }
  return f;
}

void port_data(const FringeScan& scan, Port port, std::vector<double>& ys, std::vector<double>& var) {
  scan.validate();
  ys.clear();
  var.clear();
  if (scan.noisy()) {
    const auto& c = port == Port::O ? scan.counts_O : scan.counts_H;
    for (auto k : c) {
      ys.push_back(static_cast<double>(k));
      var.push_back(std::max<double>(static_cast<double>(k), 1.0));
    }
  } else {
    ys = port == Port::O ? scan.intensity_O : scan.intensity_H;
    var.assign(ys.size(), 1.0);
  }
}

}  // namespace

FitResult fit_sinusoid(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& variances) {
  return fit_linear_harmonic(xs, ys, variances, true);
}

FitResult fit_fringe(const FringeScan& scan, Port port) {
  std::vector<double> ys, var;
  port_data(scan, port, ys, var);
  return fit_linear_harmonic(scan.xs, ys, var, scan.noisy());
}

namespace {

struct LinSol {
  Eigen::Vector3d p;
  double chi2;
};

LinSol solve_at(double omega, const std::vector<double>& xs, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd X(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::cos(omega * xs[i]);
    X(i, 2) = std::sin(omega * xs[i]);
  }
  Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
  Eigen::Vector3d p = (XtW * X).ldlt().solve(XtW * y);
  Eigen::VectorXd r = y - X * p;
  return {p, r.dot(w.asDiagonal() * r)};
}

PeriodFit period_fit_impl(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& var,
                          double min_period, double max_period, bool absolute_sigma) {
  const std::size_t n = xs.size();
  if (ys.size() != n || var.size() != n) throw ArgumentError("fit arrays differ in length");
  if (n < 6) throw ArgumentError("period fit needs at least 6 points");
  if (!(min_period > 0) || !(max_period > min_period)) throw ArgumentError("invalid period search range");
  Eigen::VectorXd y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    y(i) = ys[i];
    if (!(var[i] > 0)) throw ArgumentError("fit variances must be positive");
    w(i) = 1.0 / var[i];
  }
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double span = *hi - *lo;
  const double wmin = 2.0 * kPi / max_period, wmax = 2.0 * kPi / min_period;
  const int grid = std::max(64, static_cast<int>(std::ceil((wmax - wmin) * span / (kPi / 8))));
  double best_w = wmin, best_chi = INFINITY;
  for (int g = 0; g <= grid; ++g) {
    double om = wmin + (wmax - wmin) * g / grid;
    double c = solve_at(om, xs, y, w).chi2;
    if (c < best_chi) {
      best_chi = c;
      best_w = om;
    }
  }
  // Levenberg-Marquardt on (a0, ac, as, omega).
  Eigen::Vector4d p;
  p.head<3>() = solve_at(best_w, xs, y, w).p;
  p(3) = best_w;
  auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r.resize(n);
    if (J) J->resize(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
      double c = std::cos(q(3) * xs[i]), s = std::sin(q(3) * xs[i]);
      r(i) = y(i) - (q(0) + q(1) * c + q(2) * s);
      if (J) {
        (*J)(i, 0) = 1.0;
        (*J)(i, 1) = c;
        (*J)(i, 2) = s;
        (*J)(i, 3) = xs[i] * (-q(1) * s + q(2) * c);
      }
    }
    return r.dot(w.asDiagonal() * r);
  };
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  double chi = residuals(p, r, &J);
  double lambda = 1e-3;
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix4d H = J.transpose() * w.asDiagonal() * J;
    Eigen::Vector4d g = J.transpose() * w.asDiagonal() * r;
    Eigen::Matrix4d Hd = H;
    for (int k = 0; k < 4; ++k) Hd(k, k) *= (1.0 + lambda);
    Eigen::Vector4d step = Hd.ldlt().solve(g);
    Eigen::Vector4d q = p + step;
    Eigen::VectorXd rq;
    Eigen::MatrixXd Jq;
    double cq = residuals(q, rq, &Jq);
    if (cq <= chi) {
      bool done = std::abs(step(3)) <= 1e-15 * std::abs(q(3)) || chi - cq <= 1e-30 * std::max(1.0, chi);
      p = q;
      chi = cq;
      r = rq;
      J = Jq;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (done) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  Eigen::Matrix4d H = J.transpose() * w.asDiagonal() * J;
  Eigen::Matrix4d cov = H.inverse();
  PeriodFit f;
  f.dof = static_cast<int>(n) - 4;
  f.chi2 = chi;
  if (!absolute_sigma && f.dof > 0) cov *= chi / f.dof;
  const double om = std::abs(p(3));
  f.period = 2.0 * kPi / om;
  f.period_err = 2.0 * kPi * std::sqrt(std::max(0.0, cov(3, 3))) / (om * om);
  f.offset = p(0);
  f.amplitude = std::hypot(p(1), p(2));
  f.phase = wrap_phase(std::atan2(-p(2), p(1)));
  return f;
}

}  // namespace

PeriodFit fit_period(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& variances, double min_period, double max_period) {
  return period_fit_impl(xs, ys, variances, min_period, max_period, true);
}

PeriodFit fit_period(const FringeScan& scan, double min_period, double max_period, Port port) {
  std::vector<double> ys, var;
  port_data(scan, port, ys, var);
  return period_fit_impl(scan.xs, ys, var, min_period, max_period, scan.noisy());
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw ArgumentError("linear fit with constant abscissa");
  double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace nqsim
