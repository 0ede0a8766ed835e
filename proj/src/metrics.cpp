#include "mkv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "mkv/error.hpp"
#include "mkv/parallel.hpp"
#include "mkv/transport.hpp"

namespace mkv {
namespace {

double media_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "media dimensions differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// sup over node pairs (s, u) in [lo, hi]^2 with |s - u| <= w of |x(s) - y(u)|.
double window_sup(const PathView& x, const PathView& y, std::size_t lo, std::size_t hi, std::size_t w) {
  if (hi < lo) return 0.0;
  double best = 0.0;
  if (w == 0) {
    for (std::size_t k = lo; k <= hi; ++k) best = std::max(best, std::abs(x[k] - y[k]));
    return best;
  }
  // Monotone deques hold the min and max of y over [s - w, s + w].
  std::deque<std::size_t> qmin, qmax;
  std::size_t next = lo;
  for (std::size_t s = lo; s <= hi; ++s) {
    const std::size_t right = std::min(hi, s + w);
    while (next <= right) {
      while (!qmin.empty() && y[qmin.back()] >= y[next]) qmin.pop_back();
      qmin.push_back(next);
      while (!qmax.empty() && y[qmax.back()] <= y[next]) qmax.pop_back();
      qmax.push_back(next);
      ++next;
    }
    const std::size_t left = s >= lo + w ? s - w : lo;
    while (qmin.front() < left) qmin.pop_front();
    while (qmax.front() < left) qmax.pop_front();
    best = std::max(best, std::max(x[s] - y[qmin.front()], y[qmax.front()] - x[s]));
  }
  return best;
}

double truncated(double d, double lip, double bound) { return std::min(lip * d, 2.0 * bound); }

struct Support {
  std::size_t na;
  std::size_t nb;
  std::vector<double> dist;  // (na + nb)^2
  std::size_t n() const { return na + nb; }
  double at(std::size_t i, std::size_t j) const { return dist[i * n() + j]; }
};

Support build_support(const ParticleCloud& a, const ParticleCloud& b, double t, const MetricKind& kind) {
  require_same_grid(a.grid(), b.grid());
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "clouds have different media dimension");
  return Support{a.size(), b.size(), support_distances(a, b, t, kind)};
}

struct PlanModel {
  std::vector<std::pair<double, double>> entries;  // (mass, distance)
  double eval(double lip) const {
    double s = 0.0;
    const double bound = 1.0 - lip;
    for (const auto& [mass, d] : entries) s += mass * truncated(d, lip, bound);
    return s;
  }
};

double model_value(const std::vector<PlanModel>& plans, double lip) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : plans) v = std::min(v, p.eval(lip));
  return v;
}

// Maximizer of the concave envelope min_k g_k over [0, 1].
std::pair<double, double> maximize_model(const std::vector<PlanModel>& plans) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (model_value(plans, m1) < model_value(plans, m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double lip = 0.5 * (lo + hi);
  return {lip, model_value(plans, lip)};
}

}  // namespace

MetricKind kuramoto_window(double K) {
  if (!(K >= 0.0)) throw Error(ErrorCode::BoundsError, "Kuramoto window constant K must be >= 0");
  return KuramotoWindow{K};
}

double dist_t(const PathView& x, std::span<const double> wx, const PathView& y, std::span<const double> wy,
              double t, const MetricKind& kind) {
  require_same_grid(x.grid(), y.grid());
  const TimeGrid& grid = x.grid();
  const double dw = media_distance(wx, wy);
  if (const auto* kw = std::get_if<KuramotoWindow>(&kind)) {
    const std::size_t lo = grid.zero_index();
    const std::size_t hi = restrict_index(grid, t);
    const double span_steps = kw->K * dw / grid.dt();
    const double cap = static_cast<double>(grid.size());
    const std::size_t w = static_cast<std::size_t>(std::min(cap, std::ceil(span_steps)));
    const double s = hi >= lo ? window_sup(x, y, lo, hi, w) : 0.0;
    return std::sqrt(dw * dw + s * s);
  }
  return sup_norm_diff(x, y, -grid.tau(), t) + dw;
}

double dist_t(const CloudView& a, std::size_t i, const CloudView& b, std::size_t j, double t,
              const MetricKind& kind) {
  return dist_t(a.path(i), a.media_of(i), b.path(j), b.media_of(j), t, kind);
}

std::vector<double> support_distances(const ParticleCloud& a, const ParticleCloud& b, double t,
                                      const MetricKind& kind) {
  const std::size_t na = a.size();
  const std::size_t n = na + b.size();
  const CloudView va = a.view(), vb = b.view();
  auto atom = [&](std::size_t k) -> std::pair<const CloudView*, std::size_t> {
    return k < na ? std::pair{&va, k} : std::pair{&vb, k - na};
  };
  std::vector<double> dist(n * n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto [ci, ii] = atom(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [cj, jj] = atom(j);
      dist[i * n + j] = dist_t(*ci, ii, *cj, jj, t, kind);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[j * n + i] = dist[i * n + j];
  }
  return dist;
}

BlResult bl_distance_exact(const ParticleCloud& a, const ParticleCloud& b, double t, const MetricKind& kind,
                           const BlOptions& options) {
  if (a.size() + b.size() > options.lp_cap) {
    throw Error(ErrorCode::SupportTooLarge, "combined support " + std::to_string(a.size() + b.size()) +
                                                " exceeds LP cap " + std::to_string(options.lp_cap));
  }
  const Support sup = build_support(a, b, t, kind);
  const std::size_t na = sup.na, nb = sup.nb, n = sup.n();

  std::vector<double> cross(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) cross[i * nb + j] = sup.at(i, na + j);
  }

  // Starting Lipschitz budget from the optimum of the two-atom problem at the
  // median nearest-neighbour distance.
  std::vector<double> nearest(na);
  for (std::size_t i = 0; i < na; ++i) {
    nearest[i] = *std::min_element(cross.begin() + static_cast<std::ptrdiff_t>(i * nb),
                                   cross.begin() + static_cast<std::ptrdiff_t>((i + 1) * nb));
  }
  std::nth_element(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(na / 2), nearest.end());
  double lip = 2.0 / (2.0 + nearest[na / 2]);

  std::vector<PlanModel> plans;
  BlResult result;
  result.mode = BlMode::ExactLP;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::vector<double> cost(na * nb), phi(n);
  std::vector<double> evaluated;

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    const double bound = 1.0 - lip;
    for (std::size_t k = 0; k < cost.size(); ++k) cost[k] = truncated(cross[k], lip, bound);
    const TransportPlan plan = solve_uniform_transport(na, nb, cost);

    // c-transform of the column potentials gives a test function that is
    // 1-Lipschitz for min(L d, 2B) on the whole support.
    const auto& v = plan.col_potential;
    for (std::size_t x = 0; x < n; ++x) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) m = std::min(m, truncated(sup.at(x, na + j), lip, bound) - v[j]);
      phi[x] = m;
    }
    const auto [mn, mx] = std::minmax_element(phi.begin(), phi.end());
    const double shift = 0.5 * (*mn + *mx);
    for (double& p : phi) p -= shift;
    double sa = 0.0, sb = 0.0;
    for (std::size_t x = 0; x < na; ++x) sa += phi[x];
    for (std::size_t x = na; x < n; ++x) sb += phi[x];
    const double objective = sa / static_cast<double>(na) - sb / static_cast<double>(nb);
    if (objective > lower) {
      lower = objective;
      result.certificate = BlCertificate{phi, lip, bound};
    }

    PlanModel pm;
    pm.entries.reserve(plan.entries.size());
    for (const auto& e : plan.entries) pm.entries.emplace_back(e.mass, cross[e.row * nb + e.col]);
    plans.push_back(std::move(pm));
    evaluated.push_back(lip);

    const auto [next, model_max] = maximize_model(plans);
    upper = std::min(upper, model_max);
    if (upper - lower <= options.gap_tolerance) break;
    const bool repeated = std::any_of(evaluated.begin(), evaluated.end(),
                                      [&](double l) { return std::abs(l - next) < 1e-14; });
    if (repeated) break;
    lip = next;
  }
  result.value = std::clamp(lower, 0.0, 2.0);
  result.upper_bound = std::max(upper, result.value);
  return result;
}

BlResult bl_distance_dictionary(const ParticleCloud& a, const ParticleCloud& b, double t,
                                const MetricKind& kind, std::size_t dict_size, const RngStream& seed) {
  require_same_grid(a.grid(), b.grid());
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "clouds have different media dimension");
  if (dict_size == 0) throw Error(ErrorCode::BoundsError, "dictionary size must be >= 1");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  const CloudView va = a.view(), vb = b.view();
  auto atom = [&](std::size_t k) -> std::pair<const CloudView*, std::size_t> {
    return k < na ? std::pair{&va, k} : std::pair{&vb, k - na};
  };

  struct Candidate {
    double value = -1.0;
    std::vector<double> phi;
    double lip = 0.0;
    double bound = 0.0;
  };
  std::vector<Candidate> cands(dict_size);
  parallel_for(dict_size, [&](std::size_t k) {
    SplitMix64 g = seed.with(k, Purpose::Dictionary).engine();
    const std::size_t z = std::min(n - 1, static_cast<std::size_t>(uniform01(g) * static_cast<double>(n)));
    const std::size_t other = std::min(n - 1, static_cast<std::size_t>(uniform01(g) * static_cast<double>(n)));
    const auto [cz, iz] = atom(z);
    std::vector<double> d(n);
    for (std::size_t x = 0; x < n; ++x) {
      const auto [cx, ix] = atom(x);
      d[x] = dist_t(*cx, ix, *cz, iz, t, kind);
    }
    const double radius = d[other] * 1.5 * uniform01(g);
    double scale = d[other] > 0.0 ? d[other] : 1.0;
    const double width = scale * std::exp(std::log(0.02) + uniform01(g) * (std::log(5.0) - std::log(0.02)));
    // psi = c * clip((radius - d)/width, -1, 1): sup c, Lipschitz c/width, c + c/width = 1.
    const double c = width / (1.0 + width);
    Candidate cand;
    cand.phi.resize(n);
    double sa = 0.0, sb = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      const double v = c * std::clamp((radius - d[x]) / width, -1.0, 1.0);
      cand.phi[x] = v;
      (x < na ? sa : sb) += v;
    }
    double diff = sa / static_cast<double>(na) - sb / static_cast<double>(nb);
    if (diff < 0.0) {
      diff = -diff;
      for (double& p : cand.phi) p = -p;
    }
    cand.value = diff;
    cand.lip = c / width;
    cand.bound = c;
    cands[k] = std::move(cand);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < dict_size; ++k) {
    if (cands[k].value > cands[best].value) best = k;
  }
  BlResult r;
  r.mode = BlMode::DictionaryLowerBound;
  r.value = std::clamp(cands[best].value, 0.0, 2.0);
  r.certificate = BlCertificate{std::move(cands[best].phi), cands[best].lip, cands[best].bound};
  r.iterations = dict_size;
  return r;
}

BlResult bl_distance(const ParticleCloud& a, const ParticleCloud& b, double t, const MetricKind& kind,
                     const BlOptions& options, std::size_t dict_size, const RngStream& seed) {
  if (a.size() + b.size() <= options.lp_cap) return bl_distance_exact(a, b, t, kind, options);
  return bl_distance_dictionary(a, b, t, kind, dict_size, seed);
}

std::vector<double> coupling_terms(const ParticleCloud& a, const ParticleCloud& b, double t,
                                   const MetricKind& kind) {
  if (a.size() != b.size()) throw Error(ErrorCode::SizeMismatch, "coupling bound needs equal cloud sizes");
  require_same_grid(a.grid(), b.grid());
  const CloudView va = a.view(), vb = b.view();
  std::vector<double> terms(a.size());
  parallel_for(a.size(), [&](std::size_t i) { terms[i] = std::min(dist_t(va, i, vb, i, t, kind), 2.0); });
  return terms;
}

double coupling_upper_bound(const ParticleCloud& a, const ParticleCloud& b, double t, const MetricKind& kind) {
  const auto terms = coupling_terms(a, b, t, kind);
  double s = 0.0;
  for (double v : terms) s += v;
  return s / static_cast<double>(terms.size());
}

CertificateCheck check_certificate(const ParticleCloud& a, const ParticleCloud& b, double t,
                                   const MetricKind& kind, const BlCertificate& cert) {
  const Support sup = build_support(a, b, t, kind);
  const std::size_t n = sup.n();
  if (cert.phi.size() != n) throw Error(ErrorCode::SizeMismatch, "certificate does not match the support");
  CertificateCheck c;
  c.lipschitz_violation = -std::numeric_limits<double>::infinity();
  c.bound_violation = -std::numeric_limits<double>::infinity();
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.bound_violation = std::max(c.bound_violation, std::abs(cert.phi[i]) - cert.bound);
    (i < sup.na ? sa : sb) += cert.phi[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      c.lipschitz_violation =
          std::max(c.lipschitz_violation, std::abs(cert.phi[i] - cert.phi[j]) - cert.lipschitz * sup.at(i, j));
    }
  }
  if (n == 1) c.lipschitz_violation = 0.0;
  c.budget_violation = cert.lipschitz + cert.bound - 1.0;
  if (cert.lipschitz < 0.0 || cert.bound < 0.0) c.budget_violation = std::max(c.budget_violation, 1.0);
  c.objective = sa / static_cast<double>(sup.na) - sb / static_cast<double>(sup.nb);
  return c;
}

void write_lp_table(std::ostream& out, const ParticleCloud& a, const ParticleCloud& b, double t,
                    const MetricKind& kind) {
  const Support sup = build_support(a, b, t, kind);
  const std::size_t n = sup.n();
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "# bounded-Lipschitz LP: variables phi_1..phi_" << n << ", L, B\n";
  out << "objective max |";
  for (std::size_t i = 0; i < n; ++i) {
    const double c = i < sup.na ? 1.0 / static_cast<double>(sup.na) : -1.0 / static_cast<double>(sup.nb);
    out << " phi_" << i + 1 << ':' << num(c);
  }
  out << '\n';
  out << "budget <= 1 | L:1 B:1\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "ub_" << i + 1 << " <= 0 | phi_" << i + 1 << ":1 B:-1\n";
    out << "lb_" << i + 1 << " <= 0 | phi_" << i + 1 << ":-1 B:-1\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      out << "lip_" << i + 1 << '_' << j + 1 << " <= 0 | phi_" << i + 1 << ":1 phi_" << j + 1
          << ":-1 L:" << num(-sup.at(i, j)) << '\n';
    }
  }
}

}  // namespace mkv
