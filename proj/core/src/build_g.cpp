// Greedy construction of the deterministic map g: X^n -> U^n u {u0}.
//
// Each typical u^n owns the x^n words conditionally typical with it under
// the reverse channel P(x|u). Repeatedly pick the u^n whose owned words
// carry the most uncovered probability (lexicographically first on ties),
// assign those words to it, and stop once the uncovered mass is at most
// epsilon. Words never assigned map to u0.

#include <algorithm>
#include <cmath>

#include "crdist/error.hpp"
#include "crdist/info.hpp"
#include "crdist/typicality.hpp"

namespace crdist {

namespace {

void decode(std::size_t idx, int base, std::vector<int>& word) {
  for (int i = static_cast<int>(word.size()) - 1; i >= 0; --i) {
    word[i] = static_cast<int>(idx % static_cast<std::size_t>(base));
    idx /= static_cast<std::size_t>(base);
  }
}

std::size_t power(int base, int n, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) {
    r *= static_cast<std::size_t>(base);
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

GFunction build_g(const CQEnsemble& e, const AuxChannel& w, int n, double delta, double epsilon) {
  const int nx = static_cast<int>(e.size()), nu = w.out_size();
  if (w.in_size() != nx) throw Error(ErrorCode::SizeMismatch, "channel input size differs from the ensemble");
  if (n < 1) throw Error(ErrorCode::BadParam, "n must be >= 1");
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParam, "delta must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorCode::BadParam, "epsilon must lie in [0, 1)");
  const std::size_t xwords = power(nx, n, std::size_t{1} << 20);
  const std::size_t uwords = power(nu, n, std::size_t{1} << 16);
  if (xwords > (std::size_t{1} << 20)) throw Error(ErrorCode::EnvelopeExceeded, "|X|^n must be <= 2^20");
  if (uwords > (std::size_t{1} << 16)) throw Error(ErrorCode::EnvelopeExceeded, "|U|^n must be <= 2^16");

  const auto& p = e.probs();
  std::vector<double> pu(nu, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int u = 0; u < nu; ++u) pu[u] += p[x] * w(x, u);
  std::vector<double> pu_norm = pu;
  Eigen::MatrixXd reverse(nu, nx);
  for (int u = 0; u < nu; ++u)
    for (int x = 0; x < nx; ++x) reverse(u, x) = pu[u] > 0.0 ? p[x] * w(x, u) / pu[u] : 1.0 / nx;
  const AuxChannel rev(reverse, 1e-7);
  const TypicalSetSpec u_set(nu, n, delta, ProbVector::normalized(pu_norm));

  std::vector<double> px(xwords);
  std::vector<int> word(n), uword(n);
  for (std::size_t i = 0; i < xwords; ++i) {
    decode(i, nx, word);
    double q = 1.0;
    for (int a : word) q *= p[a];
    px[i] = q;
  }

  // Candidates and the x^n words each one owns.
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < uwords; ++i) {
    decode(i, nu, uword);
    // Words using a letter of zero probability never occur.
    const bool in_support = std::all_of(uword.begin(), uword.end(), [&](int u) { return pu[u] > 0.0; });
    if (in_support && typical_membership(u_set, uword)) cand.push_back(i);
  }
  if (static_cast<double>(cand.size()) * static_cast<double>(xwords) > static_cast<double>(std::size_t{1} << 26))
    throw Error(ErrorCode::EnvelopeExceeded, "typical U^n x X^n search exceeds 2^26 pairs");
  std::vector<std::vector<int>> owned(cand.size());
  std::vector<std::vector<int>> owners(xwords);
  std::vector<double> mass(cand.size(), 0.0);
  for (std::size_t c = 0; c < cand.size(); ++c) {
    decode(cand[c], nu, uword);
    for (std::size_t i = 0; i < xwords; ++i) {
      if (px[i] == 0.0) continue;
      decode(i, nx, word);
      if (!conditionally_typical_membership(rev, uword, word, delta)) continue;
      owned[c].push_back(static_cast<int>(i));
      owners[i].push_back(static_cast<int>(c));
      mass[c] += px[i];
    }
  }

  GFunction g;
  g.n = n;
  g.table.assign(xwords, -1);
  double residual = 1.0;
  while (residual > epsilon) {
    int best = -1;
    for (std::size_t c = 0; c < cand.size(); ++c)
      if (mass[c] > 1e-15 && (best < 0 || mass[c] > mass[best])) best = static_cast<int>(c);
    if (best < 0) {
      g.stalled = true;
      break;
    }
    const int id = static_cast<int>(g.codewords.size());
    decode(cand[best], nu, uword);
    g.codewords.push_back(uword);
    for (int i : owned[best]) {
      if (g.table[i] >= 0) continue;
      g.table[i] = id;
      residual -= px[i];
      for (int c : owners[i]) mass[c] -= px[i];
    }
    mass[best] = 0.0;
  }
  g.residual_mass = std::max(residual, 0.0);

  // Classes: one per codeword plus u0 (index = codewords.size()).
  const int classes = static_cast<int>(g.codewords.size()) + 1;
  std::vector<double> pclass(classes, 0.0);
  auto class_of = [&](std::size_t i) { return g.table[i] < 0 ? classes - 1 : g.table[i]; };
  for (std::size_t i = 0; i < xwords; ++i) pclass[class_of(i)] += px[i];
  double hx = 0.0;
  for (std::size_t i = 0; i < xwords; ++i)
    if (px[i] > 0.0) hx -= px[i] * std::log2(px[i] / pclass[class_of(i)]);
  g.h_x_given_g = hx / n;

  // Blockwise subadditivity bound on H(Q^n | g).
  int b = 1;
  while (b < n && std::pow(static_cast<double>(e.dim()), b + 1) <= 32.0) ++b;
  std::vector<int> block_len;
  for (int left = n; left > 0; left -= b) block_len.push_back(std::min(b, left));
  std::vector<std::vector<CMatrix>> products(b + 1);  // products[len][x_block]
  for (int len : block_len) {
    if (!products[len].empty()) continue;
    const std::size_t count = power(nx, len, std::size_t{1} << 20);
    std::vector<int> xb(len);
    for (std::size_t k = 0; k < count; ++k) {
      decode(k, nx, xb);
      CMatrix m = CMatrix::Identity(1, 1);
      for (int a : xb) m = tensor(m, e.state(a).matrix());
      products[len].push_back(std::move(m));
    }
  }
  double hq = 0.0;
  for (int cl = 0; cl < classes; ++cl) {
    if (pclass[cl] <= 0.0) continue;
    int start = 0;
    for (int len : block_len) {
      std::vector<double> marg(products[len].size(), 0.0);
      for (std::size_t i = 0; i < xwords; ++i) {
        if (class_of(i) != cl || px[i] == 0.0) continue;
        decode(i, nx, word);
        std::size_t k = 0;
        for (int j = start; j < start + len; ++j) k = k * static_cast<std::size_t>(nx) + static_cast<std::size_t>(word[j]);
        marg[k] += px[i];
      }
      CMatrix m = CMatrix::Zero(products[len][0].rows(), products[len][0].cols());
      for (std::size_t k = 0; k < marg.size(); ++k)
        if (marg[k] > 0.0) m += (marg[k] / pclass[cl]) * products[len][k];
      hq += pclass[cl] * vn_entropy_of(m);
      start += len;
    }
  }
  g.h_q_given_g = hq / n;

  g.h_x_given_u = shannon_entropy(p) - mutual_info_ux(p, w);
  for (int u = 0; u < nu; ++u) {
    if (pu[u] <= 0.0) continue;
    CMatrix m = CMatrix::Zero(e.dim(), e.dim());
    for (int x = 0; x < nx; ++x) m += (p[x] * w(x, u) / pu[u]) * e.state(x).matrix();
    g.h_q_given_u += pu[u] * vn_entropy_of(m);
  }
  g.x_window_ok = std::abs(g.h_x_given_g - g.h_x_given_u) <= 4.0 * delta + 1e-12;
  g.q_window_ok = g.h_q_given_g <= g.h_q_given_u + 4.0 * delta + 1e-12;
  return g;
}

}  // namespace crdist
