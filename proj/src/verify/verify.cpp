#include "forge/verify.hpp"

#include "forge/deform.hpp"
#include "forge/errors.hpp"
#include "forge/integrate.hpp"
#include "forge/parallel.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace forge {
namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double max_over(const std::vector<std::size_t>& nodes, const std::function<double(std::size_t)>& f) {
  return parallel_max(nodes.size(), [&](std::size_t i) { return f(nodes[i]); });
}

Mat normal_projector(const Mat& J) {
  const auto N = J.rows();
  return Mat::Identity(N, N) - J * (J.transpose() * J).ldlt().solve(J.transpose());
}

double metric_norm(const Vec& v, const Mat& G) { return std::sqrt(std::max(0.0, v.dot(G * v))); }

// gamma[a](i, b) rearranged so that row a, column b of the result is Gamma^a_{ib}.
Mat christoffel_slice(const std::vector<Mat>& gamma, int i) {
  const int n = static_cast<int>(gamma.size());
  Mat out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = gamma[a](i, b);
  return out;
}

MatrixAt fd_metric(const Chart& f) {
  return [f](std::size_t k) -> Mat {
    const Mat J = finite_difference_jacobian(f, k);
    return J.transpose() * J;
  };
}

std::vector<std::size_t> all_nodes(const Grid& grid, int margin) { return sample_nodes(grid, grid.node_count(), margin); }

}  // namespace

std::vector<std::size_t> sample_nodes(const Grid& grid, std::size_t max_nodes, int margin_nodes, double fraction) {
  const int n = grid.dim();
  std::vector<std::vector<int>> axes(n);
  std::vector<int> margin(n);
  std::size_t full = 1;
  for (int a = 0; a < n; ++a) {
    margin[a] = std::max(margin_nodes, static_cast<int>(std::ceil(fraction * (grid.resolution(a) - 1) - 1e-9)));
    const int lo = margin[a], hi = grid.resolution(a) - 1 - margin[a];
    if (hi < lo) fail(ErrorCode::InvalidArgument, "grid too small for the residual stencils");
    full *= static_cast<std::size_t>(hi - lo + 1);
  }
  const bool strided = full > max_nodes;
  const int per_axis =
      strided ? std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(max_nodes), 1.0 / n)))) : 0;
  for (int a = 0; a < n; ++a) {
    const int lo = margin[a], hi = grid.resolution(a) - 1 - margin[a];
    if (!strided || hi - lo + 1 <= per_axis) {
      for (int i = lo; i <= hi; ++i) axes[a].push_back(i);
      continue;
    }
    std::set<int> picked;
    for (int k = 0; k < per_axis; ++k)
      picked.insert(lo + static_cast<int>(std::lround(static_cast<double>(k) * (hi - lo) / (per_axis - 1))));
    axes[a].assign(picked.begin(), picked.end());
  }
  std::vector<std::size_t> out;
  std::vector<int> idx(n);
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    for (int a = 0; a < n; ++a) idx[a] = axes[a][pos[a]];
    out.push_back(grid.node(idx));
    int a = n - 1;
    while (a >= 0 && ++pos[a] == axes[a].size()) pos[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

PhiResult phi_tensor(const Chart& f, const Chart& g, std::size_t node, double tol) {
  if (f.ambient_dim() != g.ambient_dim() || !f.grid().same_shape(g.grid()))
    fail(ErrorCode::DimensionMismatch, "phi_tensor needs charts over the same grid and ambient space");
  const Mat Jf = finite_difference_jacobian(f, node);
  const Mat Jg = finite_difference_jacobian(g, node);
  require_full_rank(Jf, "f");
  require_full_rank(Jg, "g");
  PhiResult out;
  out.Phi = Jf.colPivHouseholderQr().solve(Jg);
  out.residual = (Jf * out.Phi - Jg).norm() / Jg.norm();
  if (out.residual > tol)
    fail(ErrorCode::GaussMapMismatch, "g_* leaves the tangent plane of f, residual " + num(out.residual));
  return out;
}

ConformalResult conformal_factor(const Chart& f, const Chart& g, std::size_t node, double tol) {
  const Mat Jf = finite_difference_jacobian(f, node);
  const Mat Jg = finite_difference_jacobian(g, node);
  require_full_rank(Jf, "f");
  require_full_rank(Jg, "g");
  const Mat Gf = Jf.transpose() * Jf, Gg = Jg.transpose() * Jg;
  const int n = static_cast<int>(Gf.rows());
  const Eigen::LLT<Mat> lf(Gf), lg(Gg);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * (std::log(lg.matrixL()(i, i)) - std::log(lf.matrixL()(i, i)));
  ConformalResult out;
  out.phi = logdet / (2.0 * n);
  out.residual = (Gg - std::exp(2.0 * out.phi) * Gf).norm() / Gf.norm();
  if (out.residual > tol) fail(ErrorCode::NotConformal, "metrics are not conformal, residual " + num(out.residual));
  return out;
}

PairFields pair_fields(const Chart& f, const Chart& g) {
  if (f.ambient_dim() != g.ambient_dim() || !f.grid().same_shape(g.grid()))
    fail(ErrorCode::DimensionMismatch, "pair charts must share grid and ambient space");
  PairFields p;
  p.jf = [f](std::size_t k) -> Mat { return finite_difference_jacobian(f, k); };
  p.jg = [g](std::size_t k) -> Mat { return finite_difference_jacobian(g, k); };
  p.metric_f = fd_metric(f);
  const double inf = std::numeric_limits<double>::infinity();
  p.Phi = [f, g, inf](std::size_t k) { return phi_tensor(f, g, k, inf).Phi; };
  p.phi = [f, g, inf](std::size_t k) { return conformal_factor(f, g, k, inf).phi; };
  p.T = [f, g, inf](std::size_t k) -> Mat {
    return std::exp(-conformal_factor(f, g, k, inf).phi) * phi_tensor(f, g, k, inf).Phi;
  };
  return p;
}

MatrixAt field_accessor(const RealField& field) {
  return [&field](std::size_t k) -> Mat { return field(k); };
}

ScalarAt scalar_accessor(const RealField& field) {
  return [&field](std::size_t k) { return field.scalar(k); };
}

double codazzi_residual(const Chart& f, const MatrixAt& Phi, const std::vector<std::size_t>& nodes) {
  const Grid& grid = f.grid();
  const int n = grid.dim();
  const MatrixAt metric = fd_metric(f);
  return max_over(nodes, [&](std::size_t k) {
    const auto gamma = christoffel_symbols(grid, k, metric);
    const Mat G = metric(k);
    const Mat P = Phi(k);
    std::vector<Mat> dP(n);
    for (int i = 0; i < n; ++i) dP[i] = fd_derivative(grid, k, i, Phi);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Mat Gi = christoffel_slice(gamma, i);
      for (int j = i + 1; j < n; ++j) {
        const Mat Gj = christoffel_slice(gamma, j);
        const Vec v = dP[i].col(j) - dP[j].col(i) + Gi * P.col(j) - Gj * P.col(i);
        worst = std::max(worst, metric_norm(v, G));
      }
    }
    return worst;
  });
}

double codazzi_residual(const Chart& f, const RealField& Phi) {
  return codazzi_residual(f, field_accessor(Phi), all_nodes(f.grid(), 2));
}

double commute_residual(const Chart& f, const MatrixAt& Phi, const std::vector<std::size_t>& nodes) {
  const int n = f.domain_dim();
  return max_over(nodes, [&](std::size_t k) {
    const Mat NP = normal_projector(finite_difference_jacobian(f, k));
    const auto h = second_derivatives(f, k);
    std::vector<Vec> a(h.size());
    for (std::size_t q = 0; q < h.size(); ++q) a[q] = NP * h[q];
    const Mat P = Phi(k);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec v = Vec::Zero(f.ambient_dim());
        for (int b = 0; b < n; ++b) v += P(b, j) * a[i * n + b] - P(b, i) * a[b * n + j];
        worst = std::max(worst, v.norm());
      }
    return worst;
  });
}

double commute_residual(const Chart& f, const RealField& Phi) {
  return commute_residual(f, field_accessor(Phi), all_nodes(f.grid(), 0));
}

double orthogonality_residual(const Chart& f, const MatrixAt& T, const std::vector<std::size_t>& nodes) {
  const MatrixAt metric = fd_metric(f);
  return max_over(nodes, [&](std::size_t k) {
    const Mat G = metric(k);
    const Mat t = T(k);
    return (t.transpose() * G * t - G).norm() / G.norm();
  });
}

double vergasta_residual(const Chart& f, const MatrixAt& T, const ScalarAt& phi, const std::vector<std::size_t>& nodes,
                         double orthogonality_tol) {
  const double orth = orthogonality_residual(f, T, nodes);
  if (orth > orthogonality_tol) fail(ErrorCode::NotOrthogonal, "T is not orthogonal, residual " + num(orth));
  const Grid& grid = f.grid();
  const int n = grid.dim();
  const MatrixAt metric = fd_metric(f);
  return max_over(nodes, [&](std::size_t k) {
    const auto gamma = christoffel_symbols(grid, k, metric);
    const Mat G = metric(k);
    const Mat t = T(k);
    std::vector<Mat> dT(n);
    Vec dphi(n);
    for (int i = 0; i < n; ++i) {
      dT[i] = fd_derivative(grid, k, i, T);
      dphi[i] = fd_derivative(grid, k, i, phi);
    }
    const Vec grad = G.ldlt().solve(dphi);
    const Vec Tgrad = t * grad;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Mat Gi = christoffel_slice(gamma, i);
      const Mat nabla = dT[i] + Gi * t - t * Gi;
      for (int j = 0; j < n; ++j) {
        const Vec v = nabla.col(j) - dphi[j] * t.col(i) + G(i, j) * Tgrad;
        worst = std::max(worst, metric_norm(v, G));
      }
    }
    return worst;
  });
}

double vergasta_residual(const Chart& f, const RealField& T, const RealField& phi, double orthogonality_tol) {
  return vergasta_residual(f, field_accessor(T), scalar_accessor(phi), all_nodes(f.grid(), 2), orthogonality_tol);
}

double second_form_residual(const Chart& f, const Chart& g, const MatrixAt& Phi, const std::vector<std::size_t>& nodes) {
  const int n = f.domain_dim();
  return max_over(nodes, [&](std::size_t k) {
    const Mat NP = normal_projector(finite_difference_jacobian(f, k));
    const auto hf = second_derivatives(f, k);
    const auto hg = second_derivatives(g, k);
    const Mat P = Phi(k);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec rhs = Vec::Zero(f.ambient_dim());
        for (int b = 0; b < n; ++b) rhs += P(b, i) * hf[b * n + j];
        worst = std::max(worst, (NP * (hg[i * n + j] - rhs)).norm());
      }
    return worst;
  });
}

SpectralEntry eigen_decompose_T(const Mat& T, const Mat& G, double cluster_tol) {
  const int n = static_cast<int>(T.rows());
  if (T.cols() != n || G.rows() != n || G.cols() != n) fail(ErrorCode::DimensionMismatch, "T and G must be n x n");
  const Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success) fail(ErrorCode::InvalidArgument, "metric is not positive definite");
  const Mat L = llt.matrixL();
  // S = L^t T L^{-t} is orthogonal in the Euclidean sense and has the spectrum of T.
  const Mat S = L.transpose() * T * L.transpose().inverse();
  const Eigen::EigenSolver<Mat> es(S);
  const CVec lambda = es.eigenvalues();
  const CMat Zhat = es.eigenvectors();

  SpectralEntry out;
  out.eigenvalues = lambda;
  enum Kind { Plus, Minus, Complex };
  std::vector<Kind> kind(n);
  std::vector<int> partner(n, -1);
  for (int k = 0; k < n; ++k) {
    out.modulus_deviation = std::max(out.modulus_deviation, std::abs(std::abs(lambda[k]) - 1.0));
    if (std::abs(lambda[k] - 1.0) < cluster_tol)
      kind[k] = Plus;
    else if (std::abs(lambda[k] + 1.0) < cluster_tol)
      kind[k] = Minus;
    else
      kind[k] = Complex;
  }
  if (out.modulus_deviation > cluster_tol)
    fail(ErrorCode::UnpairedComplexEigenvalue, "eigenvalue off the unit circle by " + num(out.modulus_deviation));
  for (int k = 0; k < n; ++k) {
    if (kind[k] != Complex || partner[k] >= 0) continue;
    if (std::abs(lambda[k].imag()) < cluster_tol)
      fail(ErrorCode::UnpairedComplexEigenvalue, "real eigenvalue away from +-1");
    for (int m = 0; m < n; ++m)
      if (m != k && kind[m] == Complex && partner[m] < 0 && std::abs(lambda[m] - std::conj(lambda[k])) < cluster_tol) {
        partner[k] = m;
        partner[m] = k;
        break;
      }
    if (partner[k] < 0) fail(ErrorCode::UnpairedComplexEigenvalue, "complex eigenvalue without its conjugate");
  }

  const CMat LinvT = L.transpose().inverse().cast<cdouble>();
  std::vector<int> cols[3];
  for (int k = 0; k < n; ++k) cols[kind[k]].push_back(k);
  auto block = [&](const std::vector<int>& c) {
    CMat Z(n, static_cast<Eigen::Index>(c.size()));
    for (std::size_t q = 0; q < c.size(); ++q) Z.col(static_cast<Eigen::Index>(q)) = LinvT * Zhat.col(c[q]);
    return Z;
  };
  out.plus = block(cols[Plus]);
  out.minus = block(cols[Minus]);
  out.complex = block(cols[Complex]);
  out.ranks = {static_cast<int>(cols[Plus].size()), static_cast<int>(cols[Minus].size()),
               static_cast<int>(cols[Complex].size())};

  // Bilinear products <Z, W> = zhat^t what vanish unless lambda mu = 1.
  const CMat B = Zhat.transpose() * Zhat;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      bool exempt;
      if (kind[a] != Complex && kind[b] != Complex)
        exempt = kind[a] == kind[b];
      else if (kind[a] == Complex && kind[b] == Complex)
        exempt = std::abs(lambda[a] * lambda[b] - 1.0) < 4.0 * cluster_tol;
      else
        exempt = false;
      if (!exempt) out.bilinear_residual = std::max(out.bilinear_residual, std::abs(B(a, b)));
    }
  return out;
}

SpectralSplit spectral_split(const PairFields& fields, const std::vector<std::size_t>& nodes, double cluster_tol) {
  std::vector<std::array<int, 3>> pattern(nodes.size());
  std::vector<double> mod(nodes.size(), 0.0), bil(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    try {
      const SpectralEntry e = eigen_decompose_T(fields.T(nodes[i]), fields.metric_f(nodes[i]), cluster_tol);
      pattern[i] = e.ranks;
      mod[i] = e.modulus_deviation;
      bil[i] = e.bilinear_residual;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::UnpairedComplexEigenvalue) throw;
      pattern[i] = {-1, -1, -1};
    }
  });
  SpectralSplit out;
  out.nodes = nodes.size();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ++out.counts[pattern[i]];
    out.modulus_deviation = std::max(out.modulus_deviation, mod[i]);
    out.bilinear_residual = std::max(out.bilinear_residual, bil[i]);
  }
  std::size_t best = 0;
  for (const auto& [p, c] : out.counts)
    if (c > best) {
      best = c;
      out.pattern = p;
    }
  out.mixed = out.counts.size() > 1;
  return out;
}

OneFormIntegral integrate_one_form(const Chart& f, const MatrixAt& Phi, std::optional<std::size_t> base,
                                   std::optional<Vec> anchor) {
  const Grid& grid = f.grid();
  const std::size_t b = base.value_or(grid.center_node());
  const Vec a = anchor.value_or(f.sample(b));
  const std::size_t count = grid.node_count();
  auto forms = std::make_shared<std::vector<Mat>>(count);
  parallel_for(count, [&](std::size_t k) { (*forms)[k] = jacobian(f, k) * Phi(k); });
  double scale = 0.0;
  for (const Mat& w : *forms) scale = std::max(scale, w.norm());
  double extent = 0.0;
  for (const auto& iv : grid.box()) extent = std::max(extent, iv.hi - iv.lo);
  const PathIntegral pi =
      integrate_sampled(grid, f.ambient_dim(), [&](std::size_t k) { return (*forms)[k]; }, b, a);
  const double tol = h2_threshold(grid, (1.0 + scale) * extent, 10.0);
  if (pi.path_residual > tol)
    fail(ErrorCode::NotClosed, "one-form is path dependent, residual " + num(pi.path_residual) + " above " + num(tol));
  OneFormIntegral out;
  out.g = Chart::from_samples(f.name() + "-integrated", grid, pi.values, *forms);
  out.path_residual = pi.path_residual;
  return out;
}

OneFormIntegral integrate_one_form(const Chart& f, const RealField& Phi, std::optional<std::size_t> base,
                                   std::optional<Vec> anchor) {
  return integrate_one_form(f, field_accessor(Phi), base, anchor);
}

const std::vector<std::string>& residual_names() {
  static const std::vector<std::string> names = {"gauss",    "conformal", "orthogonality", "codazzi",
                                                  "commute", "vergasta",  "second_form"};
  return names;
}

VerificationReport verify_pair(const DeformationPair& pair, const VerifyOptions& options) {
  const Chart& f = pair.f;
  const Chart& g = pair.g;
  const PairFields fields = pair_fields(f, g);
  const Grid& grid = f.grid();
  const auto nodes0 = sample_nodes(grid, options.max_sample_nodes, 0);
  const auto nodes2 = sample_nodes(grid, options.max_sample_nodes, 2, options.interior_fraction);
  const double inf = std::numeric_limits<double>::infinity();

  VerificationReport r;
  r.pair_id = pair.id;
  r.grid = grid;
  r.h = grid.max_step();
  r.sampled_nodes = nodes0.size();
  auto& res = r.residuals;
  res["gauss"] = max_over(nodes0, [&](std::size_t k) { return phi_tensor(f, g, k, inf).residual; });
  res["conformal"] = max_over(nodes0, [&](std::size_t k) { return conformal_factor(f, g, k, inf).residual; });
  res["orthogonality"] = orthogonality_residual(f, fields.T, nodes0);
  res["codazzi"] = codazzi_residual(f, fields.Phi, nodes2);
  res["commute"] = commute_residual(f, fields.Phi, nodes0);
  res["vergasta"] = vergasta_residual(f, fields.T, fields.phi, nodes2, inf);
  res["second_form"] = second_form_residual(f, g, fields.Phi, nodes0);

  const double h2 = r.h * r.h;
  for (const auto& name : residual_names()) {
    const auto it = options.constants.find(name);
    double limit = inf;
    if (it != options.constants.end())
      limit = it->second * h2;
    else if (name == "gauss")
      limit = options.gauss_tol;
    if (std::isfinite(limit)) r.thresholds[name] = limit;
    const double v = res[name];
    if (std::isnan(v) || v > limit) r.failures.push_back(name);
  }

  r.cluster_tol = std::max(1e-6, options.cluster_constant * h2);
  if (options.spectrum) {
    const SpectralSplit split = spectral_split(fields, nodes0, r.cluster_tol);
    r.rank_pattern = split.pattern;
    r.mixed_pattern = split.mixed;
    if (split.mixed) {
      std::string msg = "rank pattern varies across nodes:";
      for (const auto& [p, c] : split.counts)
        msg += " (" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," + std::to_string(p[2]) + ")x" +
               std::to_string(c);
      r.warnings.push_back(msg);
    }
  }
  return r;
}

void require_passed(const VerificationReport& report) {
  if (report.passed()) return;
  const std::string& name = report.failures.front();
  ErrorCode code = ErrorCode::ResidualAboveThreshold;
  if (name == "gauss") code = ErrorCode::GaussMapMismatch;
  if (name == "conformal") code = ErrorCode::NotConformal;
  if (name == "orthogonality") code = ErrorCode::NotOrthogonal;
  const auto t = report.thresholds.find(name);
  std::string msg = report.pair_id + ": residual '" + name + "' = " + num(report.residuals.at(name));
  if (t != report.thresholds.end()) msg += " above " + num(t->second);
  fail(code, msg);
}

ConvergenceStudy convergence_study(const std::function<DeformationPair(int)>& build, const std::vector<int>& resolutions,
                                   const VerifyOptions& options) {
  ConvergenceStudy s;
  for (int res : resolutions) s.reports.push_back(verify_pair(build(res), options));
  for (std::size_t k = 0; k + 1 < s.reports.size(); ++k)
    for (const auto& name : residual_names()) {
      const double coarse = s.reports[k].residuals.at(name);
      const double fine = s.reports[k + 1].residuals.at(name);
      s.factors[name].push_back(fine > 0 ? coarse / fine : std::numeric_limits<double>::infinity());
      s.at_floor[name].push_back(fine < kMachineFloor);
    }
  return s;
}

bool convergence_within(const ConvergenceStudy& study, const std::vector<std::string>& names, double lo, double hi) {
  for (const auto& name : names) {
    const auto& f = study.factors.at(name);
    const auto& floor = study.at_floor.at(name);
    for (std::size_t k = 0; k < f.size(); ++k)
      if (!floor[k] && !(f[k] >= lo && f[k] <= hi)) return false;
  }
  return true;
}

}  // namespace forge
