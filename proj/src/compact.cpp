#include "nrcb/compact.hpp"

#include <cmath>

namespace nrcb {

CMat Tensor3::slice(int k) const {
  CMat m(dims[0], dims[1]);
  for (int j = 0; j < dims[1]; ++j)
    for (int i = 0; i < dims[0]; ++i) m(i, j) = (*this)(i, j, k);
  return m;
}

Tensor3 mode_product(const Tensor3& t, const CMat& m, int mode) {
  require(mode >= 0 && mode <= 2, "mode_product: mode must be 0, 1 or 2");
  require(m.cols() == t.dims[mode], "mode_product: dimension mismatch");
  std::array<int, 3> d = t.dims;
  d[mode] = static_cast<int>(m.rows());
  Tensor3 out(d[0], d[1], d[2]);
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i) {
        cd acc = 0.0;
        for (int x = 0; x < t.dims[mode]; ++x) {
          const cd v = mode == 0 ? t(x, j, k) : mode == 1 ? t(i, x, k) : t(i, j, x);
          const int row = mode == 0 ? i : mode == 1 ? j : k;
          acc += m(row, x) * v;
        }
        out(i, j, k) = acc;
      }
  return out;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat normalize_columns(const CMat& m) {
  CMat out = m;
  for (int j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0) out.col(j) /= n;
  }
  return out;
}

namespace {

CMat dft_matrix(int n) {
  CMat m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = spectral_basis(n, j);
  return m;
}

// Full per-polarization basis with columns in flat beam order n1 + N1*n2.
CMat regular_full_basis(const ArrayGeometry& g, int q1, int q2) {
  const int nb = g.n1 * g.n2;
  CMat b(nb, nb);
  for (int k = 0; k < nb; ++k) {
    const auto [n1, n2] = split_beam_index(k, g.n1, g.n2);
    b.col(k) = dft_beam(g, g.o1 * n1 + q1, g.o2 * n2 + q2);
  }
  return b;
}

struct Layout {
  CompactFactors f;
  std::vector<int> rows;  // P-row of coefficient i
};

Layout make_layout(const CMat& full_half, const std::vector<int>& sel, const std::vector<int>& taps,
                   int n3, const std::vector<int>& shifts, int n4) {
  const int half = static_cast<int>(full_half.rows());
  const int L = static_cast<int>(sel.size());
  Layout out;
  CompactFactors& f = out.f;
  f.ws = CMat::Zero(2 * half, 2 * half);
  f.ws.topLeftCorner(half, half) = full_half;
  f.ws.bottomRightCorner(half, half) = full_half;
  f.ws_hat = CMat::Zero(2 * half, 2 * L);
  for (int i = 0; i < 2 * L; ++i) {
    const int pol = i / L;
    f.ws_hat.col(i).segment(pol * half, half) = full_half.col(sel[i % L]);
    out.rows.push_back(pol * half + sel[i % L]);
  }
  f.wf = dft_matrix(n3);
  f.wf_hat.resize(n3, taps.size());
  for (size_t k = 0; k < taps.size(); ++k) f.wf_hat.col(k) = f.wf.col(taps[k]);
  f.wt = dft_matrix(n4);
  f.wt_hat.resize(n4, shifts.size());
  for (size_t k = 0; k < shifts.size(); ++k) f.wt_hat.col(k) = f.wt.col(shifts[k]);
  f.core = Tensor3(2 * L, static_cast<int>(taps.size()), static_cast<int>(shifts.size()));
  f.pmi = Tensor3(2 * half, n3, n4);
  return out;
}

void place(Layout& lay, const std::vector<int>& taps, const std::vector<int>& shifts, int i, int fi,
           int tau, cd value) {
  lay.f.core(i, fi, tau) = value;
  lay.f.pmi(lay.rows[i], taps[fi], shifts[tau]) = value;
}

}  // namespace

CompactFactors factors_r15(const T2R15Config& c, const T2R15Pmi& p, int layer, int subband) {
  validate_pmi(c, p);
  const int half = c.ports() / 2;
  CMat full;
  std::vector<int> sel;
  if (c.variant == CodebookVariant::Regular) {
    full = regular_full_basis(c.geom, p.q1, p.q2);
    sel = decode_combination(p.i12, c.geom.n1 * c.geom.n2, c.L);
  } else {
    full = CMat::Identity(half, half);
    for (int i = 0; i < c.L; ++i) sel.push_back((p.i11 * c.d + i) % half);
  }
  const std::vector<int> zero{0};
  Layout lay = make_layout(full, sel, zero, 1, zero, 1);
  const auto a = r15_coefficients(c, p, layer, subband);
  for (int i = 0; i < 2 * c.L; ++i) place(lay, zero, zero, i, 0, 0, a[i]);
  return lay.f;
}

CompactFactors factors_r16(const R16Config& c, const R16Pmi& p, int layer) {
  validate_pmi(c, p);
  const int L = c.L();
  const int half = c.ports() / 2;
  CMat full;
  std::vector<int> sel;
  if (c.variant == CodebookVariant::Regular) {
    full = regular_full_basis(c.geom, p.q1, p.q2);
    sel = decode_combination(p.i12, c.geom.n1 * c.geom.n2, L);
  } else {
    full = CMat::Identity(half, half);
    for (int i = 0; i < L; ++i) sel.push_back((p.i11 * c.d + i) % half);
  }
  const auto taps = decode_taps(p, c).at(layer);
  const std::vector<int> zero{0};
  Layout lay = make_layout(full, sel, taps, c.n3, zero, 1);
  for (int i = 0; i < 2 * L; ++i)
    for (size_t f = 0; f < taps.size(); ++f)
      place(lay, taps, zero, i, static_cast<int>(f), 0, r16_coefficient(p.layers[layer], L, i, f));
  return lay.f;
}

CompactFactors factors_r17(const R17Config& c, const R17Pmi& p, int layer) {
  validate_pmi(c, p);
  const int half = c.p_csirs / 2;
  const int L = c.L();
  const auto sel = decode_ports(p.i12, c);
  const auto taps = decode_tap_offset(p.i16, c);
  const std::vector<int> zero{0};
  Layout lay = make_layout(CMat::Identity(half, half), sel, taps, c.n3, zero, 1);
  for (int i = 0; i < 2 * L; ++i)
    for (size_t f = 0; f < taps.size(); ++f)
      place(lay, taps, zero, i, static_cast<int>(f), 0, r17_coefficient(p.layers[layer], L, i, f));
  return lay.f;
}

CompactFactors factors_r18(const R18Config& c, const R18Pmi& p, int layer) {
  validate_pmi(c, p);
  const int L = c.L();
  const auto sel = decode_combination(p.i12, c.geom.n1 * c.geom.n2, L);
  const auto taps = decode_taps(p, c).at(layer);
  const auto shifts = decode_shifts(p.layers[layer].i110, c.n4);
  Layout lay = make_layout(regular_full_basis(c.geom, p.q1, p.q2), sel, taps, c.n3, shifts, c.n4);
  for (size_t tau = 0; tau < shifts.size(); ++tau)
    for (int i = 0; i < 2 * L; ++i)
      for (size_t f = 0; f < taps.size(); ++f)
        place(lay, taps, shifts, i, static_cast<int>(f), static_cast<int>(tau),
              r18_coefficient(p.layers[layer], L, static_cast<int>(tau), i, static_cast<int>(f)));
  return lay.f;
}

CompactForms compact_r15(const CompactFactors& f) {
  return {f.ws_hat * f.core.slice(0), f.ws * f.pmi.slice(0)};
}

CompactForms compact_r16(const CompactFactors& f) {
  return {f.ws_hat * f.core.slice(0) * f.wf_hat.transpose(),
          f.ws * f.pmi.slice(0) * f.wf.transpose()};
}

namespace {

// Columns are the vectorized frontal slices.
CMat unfold_slices(const Tensor3& t) {
  CMat m(static_cast<Eigen::Index>(t.dims[0]) * t.dims[1], t.dims[2]);
  for (int k = 0; k < t.dims[2]; ++k) {
    const CMat s = t.slice(k);
    m.col(k) = Eigen::Map<const CVec>(s.data(), s.size());
  }
  return m;
}

}  // namespace

TuckerForms compact_r18_tucker(const CompactFactors& f) {
  TuckerForms out;
  out.effective = mode_product(mode_product(mode_product(f.core, f.ws_hat, 0), f.wf_hat, 1), f.wt_hat, 2);
  out.full = mode_product(mode_product(mode_product(f.pmi, f.ws, 0), f.wf, 1), f.wt, 2);
  out.flat_effective = kron(f.wf_hat, f.ws_hat) * unfold_slices(f.core) * f.wt_hat.transpose();
  out.flat_full = kron(f.wf, f.ws) * unfold_slices(f.pmi) * f.wt.transpose();
  return out;
}

}  // namespace nrcb
