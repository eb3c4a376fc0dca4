#include "nrcb/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nrcb/linalg.hpp"

namespace nrcb {

SuScheme parse_su_scheme(const std::string& n) {
  if (n == "svd") return SuScheme::SVD;
  if (n == "mrt") return SuScheme::MRT;
  if (n == "zf") return SuScheme::ZF;
  if (n == "rzf") return SuScheme::RZF;
  if (n == "mmse") return SuScheme::MMSE;
  if (n == "gmd") return SuScheme::GMD;
  throw DomainError("unknown single-user scheme '" + n + "'");
}

MuScheme parse_mu_scheme(const std::string& n) {
  if (n == "zf") return MuScheme::ZF;
  if (n == "rzf") return MuScheme::RZF;
  if (n == "mmse") return MuScheme::MMSE;
  if (n == "ezf") return MuScheme::EZF;
  if (n == "bd") return MuScheme::BD;
  if (n == "wmmse") return MuScheme::WMMSE;
  throw DomainError("unknown multi-user scheme '" + n + "'");
}

std::string to_string(SuScheme s) {
  switch (s) {
    case SuScheme::SVD: return "svd";
    case SuScheme::MRT: return "mrt";
    case SuScheme::ZF: return "zf";
    case SuScheme::RZF: return "rzf";
    case SuScheme::MMSE: return "mmse";
    case SuScheme::GMD: return "gmd";
  }
  return "?";
}

std::string to_string(MuScheme s) {
  switch (s) {
    case MuScheme::ZF: return "zf";
    case MuScheme::RZF: return "rzf";
    case MuScheme::MMSE: return "mmse";
    case MuScheme::EZF: return "ezf";
    case MuScheme::BD: return "bd";
    case MuScheme::WMMSE: return "wmmse";
  }
  return "?";
}

double su_rate(const CMat& h, const CMat& w, double noise_var) {
  if (!(noise_var > 0)) throw DomainError("su_rate: noise variance must be positive");
  const CMat hw = h * w;
  const CMat a = CMat::Identity(h.rows(), h.rows()) + hw * hw.adjoint() / noise_var;
  return log2det_hpd(a);
}

std::vector<double> rate(const std::vector<std::vector<CMat>>& h,
                         const std::vector<std::vector<CMat>>& w,
                         const std::vector<double>& noise_var) {
  if (h.size() != w.size()) throw DomainError("rate: channel and beamformer subcarrier counts differ");
  if (h.empty()) return {};
  const size_t users = h[0].size();
  if (noise_var.size() != users) throw DomainError("rate: one noise variance per user is required");
  std::vector<double> out(users, 0.0);
  for (size_t m = 0; m < h.size(); ++m) {
    if (h[m].size() != users || w[m].size() != users)
      throw DomainError("rate: user count differs across subcarriers");
    for (size_t k = 0; k < users; ++k) {
      if (!(noise_var[k] > 0)) throw DomainError("rate: noise variance must be positive");
      const CMat& hk = h[m][k];
      const int nr = hk.rows();
      CMat interference = noise_var[k] * CMat::Identity(nr, nr);
      for (size_t i = 0; i < users; ++i) {
        if (i == k) continue;
        const CMat hw = hk * w[m][i];
        interference += hw * hw.adjoint();
      }
      const CMat hs = hk * w[m][k];
      const CMat total = interference + hs * hs.adjoint();
      out[k] += log2det_hpd(total) - log2det_hpd(interference);
    }
  }
  return out;
}

namespace {

void scale_to_power(CMat& w, double pt) {
  const double f = w.squaredNorm();
  if (!(f > 0)) throw DegenerateError("beamformer has zero power");
  w *= std::sqrt(pt / f);
}

CMat regularized_inverse_form(const CMat& h, double xi, const char* who) {
  const CMat g = h * h.adjoint() + xi * CMat::Identity(h.rows(), h.rows());
  return h.adjoint() * inverse_checked(g, who);
}

}  // namespace

Gmd gmd(const CMat& h) {
  const Svd d = svd(h);
  const int k = numerical_rank(d.s);
  if (k == 0) throw DegenerateError("gmd: zero matrix");
  CMat q = d.U.leftCols(k);
  CMat p = d.V.leftCols(k);
  RMat r = RMat::Zero(k, k);
  double logsum = 0;
  for (int i = 0; i < k; ++i) {
    r(i, i) = d.s(i);
    logsum += std::log(d.s(i));
  }
  const double target = std::exp(logsum / k);

  auto swap_index = [&](int a, int b) {
    if (a == b) return;
    r.row(a).swap(r.row(b));
    r.col(a).swap(r.col(b));
    q.col(a).swap(q.col(b));
    p.col(a).swap(p.col(b));
  };

  for (int i = 0; i + 1 < k; ++i) {
    // The trailing block r(i:,i:) stays diagonal; pick one entry on each side
    // of the target and bring them to positions i and i+1.
    int big = -1, small = -1;
    for (int j = i; j < k; ++j) {
      if (r(j, j) >= target && big < 0) big = j;
      if (r(j, j) <= target && small < 0) small = j;
    }
    if (big < 0 || small < 0) break;
    if (big == small) {
      // Entry already equals the target.
      swap_index(i, big);
      continue;
    }
    swap_index(i, big);
    if (small == i) small = big;
    swap_index(i + 1, small);
    const double d1 = r(i, i);
    const double d2 = r(i + 1, i + 1);
    double c = 1.0, s = 0.0;
    if (std::abs(d1 - d2) > 1e-300) {
      c = std::sqrt(std::clamp((target * target - d2 * d2) / (d1 * d1 - d2 * d2), 0.0, 1.0));
      s = std::sqrt(1.0 - c * c);
    }
    RMat g2(2, 2), g1(2, 2);
    g2 << c, -s, s, c;
    g1 << c * d1, -s * d2, s * d2, c * d1;
    g1 /= target;
    r.middleRows(i, 2) = (g1.transpose() * r.middleRows(i, 2)).eval();
    r.middleCols(i, 2) = (r.middleCols(i, 2) * g2).eval();
    q.middleCols(i, 2) = (q.middleCols(i, 2) * g1.cast<cd>()).eval();
    p.middleCols(i, 2) = (p.middleCols(i, 2) * g2.cast<cd>()).eval();
    r(i + 1, i) = 0.0;
  }
  return {q, r.cast<cd>(), p};
}

CMat su_beamformer(SuScheme scheme, const CMat& h, const BfParams& p) {
  if (h.size() == 0) throw DomainError("su_beamformer: empty channel");
  if (!(p.tx_power > 0)) throw DomainError("su_beamformer: transmit power must be positive");
  CMat w;
  switch (scheme) {
    case SuScheme::SVD: {
      require(p.streams >= 1 && p.streams <= std::min(h.rows(), h.cols()),
              "su_beamformer: stream count exceeds channel dimensions");
      w = dominant_right(h, p.streams);
      break;
    }
    case SuScheme::MRT: w = h.adjoint(); break;
    case SuScheme::ZF: w = regularized_inverse_form(h, 0.0, "su_beamformer(zf)"); break;
    case SuScheme::RZF: w = regularized_inverse_form(h, p.xi, "su_beamformer(rzf)"); break;
    case SuScheme::MMSE:
      w = regularized_inverse_form(h, p.noise_var / p.tx_power, "su_beamformer(mmse)");
      break;
    case SuScheme::GMD: {
      const Gmd g = gmd(h);
      require(p.streams >= 1 && p.streams <= g.P.cols(), "su_beamformer: stream count exceeds rank");
      w = g.P.leftCols(p.streams);
      break;
    }
  }
  if (p.normalize) scale_to_power(w, p.tx_power);
  return w;
}

double weighted_sum_rate(const std::vector<CMat>& h, const MuBeamformer& bf,
                         const std::vector<double>& noise_var,
                         const std::vector<double>& priorities) {
  std::vector<std::vector<CMat>> hh{h};
  std::vector<CMat> blocks;
  for (size_t k = 0; k < h.size(); ++k) blocks.push_back(bf.block(static_cast<int>(k)));
  const auto r = rate(hh, {blocks}, noise_var);
  double acc = 0;
  for (size_t k = 0; k < r.size(); ++k) acc += (priorities.empty() ? 1.0 : priorities[k]) * r[k];
  return acc;
}

namespace {

CMat stack_rows(const std::vector<CMat>& h, int skip = -1) {
  int rows = 0;
  for (size_t k = 0; k < h.size(); ++k)
    if (static_cast<int>(k) != skip) rows += h[k].rows();
  CMat out(rows, h[0].cols());
  int r = 0;
  for (size_t k = 0; k < h.size(); ++k) {
    if (static_cast<int>(k) == skip) continue;
    out.middleRows(r, h[k].rows()) = h[k];
    r += h[k].rows();
  }
  return out;
}

void fill_layout(MuBeamformer& bf, const std::vector<int>& widths) {
  bf.widths = widths;
  bf.offsets.assign(widths.size(), 0);
  for (size_t k = 1; k < widths.size(); ++k) bf.offsets[k] = bf.offsets[k - 1] + widths[k - 1];
}

MuBeamformer run_wmmse(const std::vector<CMat>& h, const BfParams& p) {
  const int users = static_cast<int>(h.size());
  const int nt = h[0].cols();
  std::vector<int> widths;
  for (const auto& hk : h) widths.push_back(std::min<int>(p.streams, hk.rows()));
  std::vector<double> chi = p.priorities.empty() ? std::vector<double>(users, 1.0) : p.priorities;
  require(static_cast<int>(chi.size()) == users, "wmmse: one priority per user is required");
  const std::vector<double> sigma(users, p.noise_var);

  MuBeamformer bf;
  fill_layout(bf, widths);
  const int cols = std::accumulate(widths.begin(), widths.end(), 0);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  int total_rows = 0;
  for (const auto& hk : h) total_rows += hk.rows();
  if (p.wmmse_rzf_start && cols == total_rows && total_rows <= nt) {
    bf.w = regularized_inverse_form(stack_rows(h), p.xi > 0 ? p.xi : p.noise_var / p.tx_power, "wmmse start");
  } else {
    bf.w = CMat(nt, cols);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < cols; ++j) bf.w(i, j) = cd(nd(rng), nd(rng));
  }
  scale_to_power(bf.w, p.tx_power);

  auto normalized_rate = [&](const CMat& w) {
    MuBeamformer t = bf;
    t.w = w;
    scale_to_power(t.w, p.tx_power);
    return weighted_sum_rate(h, t, sigma, chi);
  };

  double prev = normalized_rate(bf.w);
  bf.history.push_back(prev);
  std::vector<CMat> c(users), b(users);
  for (int it = 0; it < p.iterations; ++it) {
    const double power = bf.w.squaredNorm();
    for (int k = 0; k < users; ++k) {
      const double g1 = sigma[k] / p.tx_power * power;
      const CMat hw = h[k] * bf.w;
      const CMat a = hw * hw.adjoint() + g1 * CMat::Identity(h[k].rows(), h[k].rows());
      c[k] = inverse_checked(a, "wmmse combiner") * h[k] * bf.block(k);
      CMat e = CMat::Identity(widths[k], widths[k]) - bf.block(k).adjoint() * h[k].adjoint() * c[k];
      e = 0.5 * (e + e.adjoint()).eval();
      b[k] = inverse_checked(e, "wmmse weight");
    }
    double g2 = 0;
    CMat acc = CMat::Zero(nt, nt);
    for (int k = 0; k < users; ++k) {
      const CMat cbc = c[k] * b[k] * c[k].adjoint();
      g2 += chi[k] * sigma[k] / p.tx_power * cbc.trace().real();
      acc += chi[k] * h[k].adjoint() * cbc * h[k];
    }
    const CMat inv = inverse_checked(acc + g2 * CMat::Identity(nt, nt), "wmmse beamformer");
    CMat next(nt, cols);
    for (int k = 0; k < users; ++k)
      next.middleCols(bf.offsets[k], widths[k]) = chi[k] * inv * h[k].adjoint() * c[k] * b[k];
    bf.w = next;
    const double cur = normalized_rate(bf.w);
    bf.history.push_back(cur);
    if (std::abs(cur - prev) < p.tolerance) break;
    prev = cur;
  }
  scale_to_power(bf.w, p.tx_power);
  return bf;
}

}  // namespace

MuBeamformer mu_beamformer(MuScheme scheme, const std::vector<CMat>& h, const BfParams& p) {
  if (h.empty()) throw DomainError("mu_beamformer: no users");
  for (const auto& hk : h)
    require(hk.cols() == h[0].cols() && hk.rows() > 0, "mu_beamformer: inconsistent channels");
  MuBeamformer bf;
  std::vector<int> widths;
  switch (scheme) {
    case MuScheme::ZF:
    case MuScheme::RZF:
    case MuScheme::MMSE: {
      const double xi = scheme == MuScheme::ZF ? 0.0
                        : scheme == MuScheme::RZF ? p.xi
                                                  : p.noise_var / p.tx_power;
      bf.w = regularized_inverse_form(stack_rows(h), xi, "mu_beamformer");
      for (const auto& hk : h) widths.push_back(hk.rows());
      fill_layout(bf, widths);
      break;
    }
    case MuScheme::EZF: {
      std::vector<CMat> vs;
      int cols = 0;
      for (const auto& hk : h) {
        const int v = std::min<int>(p.streams, std::min(hk.rows(), hk.cols()));
        vs.push_back(dominant_right(hk, v));
        widths.push_back(v);
        cols += v;
      }
      CMat veff(h[0].cols(), cols);
      for (int k = 0, off = 0; k < static_cast<int>(vs.size()); off += widths[k], ++k)
        veff.middleCols(off, widths[k]) = vs[k];
      const CMat g = veff.adjoint() * veff + p.xi * CMat::Identity(cols, cols);
      bf.w = veff * inverse_checked(g, "mu_beamformer(ezf)");
      fill_layout(bf, widths);
      break;
    }
    case MuScheme::BD: {
      const int nt = h[0].cols();
      std::vector<CMat> blocks;
      for (int k = 0; k < static_cast<int>(h.size()); ++k) {
        CMat v0;
        if (h.size() == 1) {
          v0 = CMat::Identity(nt, nt);
        } else {
          const CMat hbar = stack_rows(h, k);
          const Svd d = svd(hbar, true);
          const int rank = numerical_rank(d.s);
          if (rank >= nt)
            throw InfeasibleError("mu_beamformer(bd): other users leave no null space");
          v0 = d.V.rightCols(nt - rank);
        }
        const CMat heff = h[k] * v0;
        const Svd e = svd(heff, true);
        const int v = std::min<int>(p.streams, numerical_rank(e.s));
        if (v < 1) throw InfeasibleError("mu_beamformer(bd): user has no interference-free gain");
        blocks.push_back(v0 * e.V.leftCols(v));
        widths.push_back(v);
      }
      fill_layout(bf, widths);
      bf.w = CMat(nt, bf.offsets.back() + widths.back());
      for (size_t k = 0; k < blocks.size(); ++k) bf.w.middleCols(bf.offsets[k], widths[k]) = blocks[k];
      break;
    }
    case MuScheme::WMMSE: return run_wmmse(h, p);
  }
  if (p.normalize) scale_to_power(bf.w, p.tx_power);
  return bf;
}

std::vector<double> waterfilling(const std::vector<double>& gains, double pt) {
  require(pt > 0, "waterfilling: total power must be positive");
  const size_t n = gains.size();
  require(n > 0, "waterfilling: no subchannels");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (double g : gains) require(g >= 0, "waterfilling: gains must be nonnegative");
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return gains[a] > gains[b]; });
  require(gains[order[0]] > 0, "waterfilling: all gains are zero");
  double mu = 0;
  size_t active = 0;
  double inv_sum = 0;
  for (size_t j = 0; j < n; ++j) {
    const double g = gains[order[j]];
    if (!(g > 0)) break;
    const double cand = (pt + inv_sum + 1.0 / g) / static_cast<double>(j + 1);
    if (cand <= 1.0 / g) break;
    inv_sum += 1.0 / g;
    mu = cand;
    active = j + 1;
  }
  std::vector<double> out(n, 0.0);
  for (size_t j = 0; j < active; ++j) out[order[j]] = mu - 1.0 / gains[order[j]];
  return out;
}

std::vector<double> harmonic_allocation(const std::vector<double>& gains, double pt) {
  require(pt > 0, "harmonic_allocation: total power must be positive");
  require(!gains.empty(), "harmonic_allocation: no subchannels");
  double s = 0;
  for (double g : gains) {
    require(g > 0, "harmonic_allocation: gains must be positive");
    s += 1.0 / std::sqrt(g);
  }
  const double beta = pt / s;
  std::vector<double> out;
  for (double g : gains) out.push_back(beta / std::sqrt(g));
  return out;
}

std::vector<double> qos_sinr(const RMat& g, const std::vector<double>& power, double noise) {
  const int k = g.rows();
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) {
    double interf = noise;
    for (int j = 0; j < k; ++j)
      if (j != i) interf += power[j] * g(i, j);
    out[i] = power[i] * g(i, i) / interf;
  }
  return out;
}

QosResult qos_allocation(const RMat& g, const std::vector<double>& targets, double noise,
                         int max_iterations, double tolerance) {
  const int k = g.rows();
  require(g.cols() == k && static_cast<int>(targets.size()) == k,
          "qos_allocation: gain matrix and targets disagree in size");
  require(noise > 0, "qos_allocation: noise variance must be positive");
  RMat f = RMat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    require(g(i, i) > 0 && targets[i] >= 0, "qos_allocation: invalid gain or target");
    for (int j = 0; j < k; ++j)
      if (j != i) f(i, j) = targets[i] / g(i, i) * g(i, j);
  }
  if (spectral_radius(f) >= 1.0)
    throw InfeasibleError("qos_allocation: SINR targets are jointly infeasible");
  QosResult res;
  res.power.assign(k, 0.0);
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<double> next(k);
    double delta = 0;
    for (int i = 0; i < k; ++i) {
      double interf = noise;
      for (int j = 0; j < k; ++j)
        if (j != i) interf += res.power[j] * g(i, j);
      next[i] = targets[i] / g(i, i) * interf;
      delta = std::max(delta, std::abs(next[i] - res.power[i]));
    }
    res.power = next;
    res.iterations = it;
    if (delta < tolerance) return res;
  }
  throw InfeasibleError("qos_allocation: fixed point did not converge");
}

}  // namespace nrcb
