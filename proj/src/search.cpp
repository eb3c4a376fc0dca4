#include "nrcb/search_tools.hpp"

#include <algorithm>
#include <cmath>

#include "nrcb/linalg.hpp"

namespace nrcb {

CVec least_squares(const std::vector<CVec>& atoms, const CVec& target) {
  if (atoms.empty()) return CVec();
  CMat a(target.size(), atoms.size());
  for (size_t j = 0; j < atoms.size(); ++j) a.col(j) = atoms[j];
  return a.colPivHouseholderQr().solve(target);
}

std::vector<int> omp_select(const std::vector<CVec>& atoms, const std::vector<CVec>& targets,
                            int count, const std::vector<bool>& allowed) {
  require(count >= 0 && count <= static_cast<int>(atoms.size()), "omp_select: count exceeds atom set");
  std::vector<int> chosen;
  std::vector<bool> used(atoms.size(), false);
  std::vector<CVec> residual = targets;
  for (int step = 0; step < count; ++step) {
    int best = -1;
    double best_score = -1;
    for (size_t j = 0; j < atoms.size(); ++j) {
      if (used[j] || (!allowed.empty() && !allowed[j])) continue;
      const double nrm = atoms[j].squaredNorm();
      if (!(nrm > 0)) continue;
      double score = 0;
      for (const auto& r : residual) score += std::norm(atoms[j].dot(r)) / nrm;
      if (score > best_score * (1 + 1e-12) + 1e-300) {
        best_score = score;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    used[best] = true;
    chosen.push_back(best);
    std::vector<CVec> sel;
    for (int j : chosen) sel.push_back(atoms[j]);
    for (size_t t = 0; t < targets.size(); ++t) {
      CVec coef = least_squares(sel, targets[t]);
      CVec fit = CVec::Zero(targets[t].size());
      for (size_t j = 0; j < sel.size(); ++j) fit += coef(j) * sel[j];
      residual[t] = targets[t] - fit;
    }
  }
  return chosen;
}

std::vector<CMat> layer_targets(const std::vector<CMat>& channels, int rank) {
  require(!channels.empty(), "layer_targets: no channels");
  const int nr = channels[0].rows();
  const int nt = channels[0].cols();
  require(rank >= 1 && rank <= nt, "layer_targets: rank exceeds transmit ports");
  CMat wide(nr, nt * static_cast<int>(channels.size()));
  for (size_t m = 0; m < channels.size(); ++m) wide.middleCols(nt * m, nt) = channels[m];
  if (!(wide.squaredNorm() > 0)) throw DegenerateError("layer_targets: zero channel");
  const int live = std::min(rank, nr);
  const CMat u = dominant_left(wide, live);
  std::vector<CMat> out;
  for (const auto& h : channels) out.push_back(h.adjoint() * u);
  if (rank > live) {
    // Layers beyond the receive rank get the next covariance eigenvectors,
    // which carry (almost) no gain but keep the report well formed.
    CMat cov = CMat::Zero(nt, nt);
    for (const auto& h : channels) cov += h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<CMat> es(cov);
    for (auto& t : out) {
      CMat ext(nt, rank);
      ext.leftCols(live) = t;
      for (int l = live; l < rank; ++l) ext.col(l) = es.eigenvectors().col(nt - 1 - l);
      t = ext;
    }
  }
  return out;
}

double correlation(const CVec& a, const CVec& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0) || !(nb > 0)) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace nrcb
