#include "nrcb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "nrcb/beamforming.hpp"
#include "nrcb/quantization.hpp"
#include "nrcb/search_tools.hpp"
#include "nrcb/type2_r15.hpp"

namespace nrcb {

namespace {

struct Stats {
  double sum = 0, sq = 0;
  int n = 0;
  void add(double x) {
    sum += x;
    sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double ci95() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sq - n * m * m) / (n - 1));
    return 1.96 * std::sqrt(var / n);
  }
};

std::string array_name(int n1, int n2) { return std::to_string(n1) + "x" + std::to_string(n2); }

double mean_rate(const std::vector<CMat>& h, const CMat& w, double noise) {
  double r = 0;
  for (size_t m = 0; m < h.size(); ++m) r += su_rate(h[m], w.col(m), noise);
  return r / h.size();
}

}  // namespace

CMat se_type1_precoder(const std::vector<CMat>& h, const ArrayGeometry& g) {
  double best = -1;
  CVec beam;
  for (int l = 0; l < g.n1 * g.o1; ++l)
    for (int m = 0; m < g.n2 * g.o2; ++m) {
      const CVec v = dft_beam(g, l, m);
      double e = 0;
      for (const auto& x : h) e += (x * v).squaredNorm();
      if (e > best * (1 + 1e-12)) {
        best = e;
        beam = v;
      }
    }
  return beam.normalized().replicate(1, h.size());
}

CMat se_type2_precoder(const std::vector<CMat>& h, const ArrayGeometry& g, int L, int n_psk) {
  std::vector<CVec> targets;
  for (const auto& x : layer_targets(h, 1)) targets.push_back(x.col(0));
  const auto [gq1, gq2] = best_group(g, targets, L);
  const auto group = orthogonal_group(g, gq1, gq2);
  std::vector<CVec> basis;
  for (int j : omp_select(group, targets, L)) basis.push_back(group[j]);
  const int M = static_cast<int>(h.size());
  std::vector<CVec> coef;
  for (const auto& t : targets) coef.push_back(least_squares(basis, t));
  const int nb = static_cast<int>(basis.size());
  std::vector<double> wide(nb, 0.0);
  for (int i = 0; i < nb; ++i) {
    for (int m = 0; m < M; ++m) wide[i] += std::norm(coef[m](i));
    wide[i] = std::sqrt(wide[i] / M);
  }
  const int strongest = static_cast<int>(std::max_element(wide.begin(), wide.end()) - wide.begin());
  CMat w(g.n1 * g.n2, M);
  for (int m = 0; m < M; ++m) {
    const cd anchor = coef[m](strongest);
    CVec v = CVec::Zero(g.n1 * g.n2);
    for (int i = 0; i < nb; ++i) {
      if (i == strongest) {
        v += basis[i];
        continue;
      }
      const double p1 = wide[strongest] > 0 ? amp_r15_wideband(quantize_r15_wideband(wide[i] / wide[strongest])) : 0.0;
      if (p1 == 0) continue;
      const cd rel = std::abs(anchor) > 0 ? coef[m](i) / anchor : cd(0);
      v += p1 * phase(quantize_phase(rel, n_psk), n_psk) * basis[i];
    }
    w.col(m) = v.normalized();
  }
  return w;
}

SeResult spectral_efficiency_experiment(const SeConfig& c) {
  require(c.trials >= 1, "experiment: at least one trial");
  SeResult out;
  for (const auto& [n1, n2] : c.arrays) {
    const ArrayGeometry g{n1, n2, c.o1, c.o2};
    validate_geometry(g);
    std::vector<Stats> s1(c.snr_db.size()), s2(c.snr_db.size()), gap(c.snr_db.size());
    for (int trial = 0; trial < c.trials; ++trial) {
      ChannelModel model = c.channel;
      model.seed = c.seed;
      const auto real = draw_channel(model, g, c.nr, trial);
      std::vector<CMat> h;
      for (const auto& x : real.h[0]) h.push_back(ChannelRealization::half(x, 0));
      const CMat w1 = se_type1_precoder(h, g);
      const CMat w2 = se_type2_precoder(h, g, c.L, c.n_psk);
      for (size_t k = 0; k < c.snr_db.size(); ++k) {
        const double noise = std::pow(10.0, -c.snr_db[k] / 10.0);
        const double r1 = mean_rate(h, w1, noise);
        const double r2 = mean_rate(h, w2, noise);
        s1[k].add(r1);
        s2[k].add(r2);
        gap[k].add(r2 - r1);
      }
    }
    const std::string name = array_name(n1, n2);
    for (size_t k = 0; k < c.snr_db.size(); ++k) {
      out.points.push_back({c.snr_db[k], "type1-" + name, s1[k].mean(), s1[k].ci95()});
      out.points.push_back({c.snr_db[k], "type2-" + name, s2[k].mean(), s2[k].ci95()});
      out.gaps.push_back({n1, n2, c.snr_db[k], gap[k].mean(), gap[k].ci95()});
    }
  }
  return out;
}

BaselineResult baselines_experiment(const BaselineConfig& c) {
  require(c.users >= 1 && c.trials >= 1, "baselines: users and trials must be positive");
  const std::vector<MuScheme> schemes{MuScheme::ZF, MuScheme::RZF, MuScheme::MMSE,
                                      MuScheme::EZF, MuScheme::BD, MuScheme::WMMSE};
  BaselineResult out;
  std::vector<std::vector<Stats>> st(c.snr_db.size(), std::vector<Stats>(schemes.size()));
  std::vector<int> wins(c.snr_db.size(), 0), counted(c.snr_db.size(), 0);
  for (int trial = 0; trial < c.trials; ++trial) {
    std::vector<CMat> h;
    for (int k = 0; k < c.users; ++k) {
      ChannelModel model = c.channel;
      model.seed = c.seed;
      model.units = 1;
      model.intervals = 1;
      h.push_back(draw_channel(model, c.geom, c.nr, static_cast<std::uint64_t>(trial) * c.users + k).h[0][0]);
    }
    for (size_t s = 0; s < c.snr_db.size(); ++s) {
      const double noise = std::pow(10.0, -c.snr_db[s] / 10.0);
      BfParams p;
      p.noise_var = noise;
      p.xi = c.users * noise;  // RZF regularization at the MMSE point
      p.streams = c.nr;
      p.seed = c.seed + trial;
      const std::vector<double> nv(c.users, noise), pri(c.users, 1.0);
      double rzf = 0, wm = 0;
      bool ok[2] = {false, false};
      for (size_t j = 0; j < schemes.size(); ++j) {
        try {
          const MuBeamformer bf = mu_beamformer(schemes[j], h, p);
          const double r = weighted_sum_rate(h, bf, nv, pri);
          st[s][j].add(r);
          if (schemes[j] == MuScheme::RZF) {
            rzf = r;
            ok[0] = true;
          }
          if (schemes[j] == MuScheme::WMMSE) {
            wm = r;
            ok[1] = true;
          }
        } catch (const InfeasibleError&) {
        } catch (const SingularError&) {
        }
      }
      if (ok[0] && ok[1]) {
        ++counted[s];
        if (wm >= rzf - 1e-9) ++wins[s];
      }
    }
  }
  for (size_t s = 0; s < c.snr_db.size(); ++s) {
    for (size_t j = 0; j < schemes.size(); ++j)
      out.points.push_back({c.snr_db[s], to_string(schemes[j]), st[s][j].mean(), st[s][j].ci95()});
    out.wmmse_wins.emplace_back(c.snr_db[s], counted[s] ? static_cast<double>(wins[s]) / counted[s] : 0.0);
  }
  return out;
}

void write_points_csv(std::ostream& os, const std::vector<SePoint>& pts) {
  os << "snr_db,scheme,mean_rate,ci95\n";
  os << std::setprecision(10);
  for (const auto& p : pts) os << p.snr_db << ',' << p.scheme << ',' << p.mean_rate << ',' << p.ci95 << '\n';
}

}  // namespace nrcb
