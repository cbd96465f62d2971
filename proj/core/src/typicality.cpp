// Typical sets and projectors evaluated through letter-count types. Every
// quantity here is a sum over types (count vectors), never over words, so
// blocklengths in the tens stay cheap and exact.

#include "crdist/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "crdist/error.hpp"
#include "crdist/info.hpp"

namespace crdist {

namespace {

__extension__ using u128 = unsigned __int128;
constexpr u128 kNoFit = ~static_cast<u128>(0);
constexpr double kSlack = 1e-9;

struct Bounds {
  std::vector<int> lo, hi;
};

// Admissible counts for each letter of a length-m block.
Bounds count_bounds(int m, double delta, const std::vector<double>& probs) {
  Bounds b;
  for (double p : probs) {
    if (p <= 0.0) {
      b.lo.push_back(0);
      b.hi.push_back(0);
      continue;
    }
    const double c = m * p, w = m * delta;
    b.lo.push_back(std::max(0, static_cast<int>(std::ceil(c - w - kSlack))));
    b.hi.push_back(std::min(m, static_cast<int>(std::floor(c + w + kSlack))));
  }
  return b;
}

// Calls f on every count vector with sum m inside the bounds.
void for_each_type(int m, const Bounds& b, const std::function<void(const std::vector<int>&)>& f) {
  const int k = static_cast<int>(b.lo.size());
  std::vector<int> t(k, 0);
  std::function<void(int, int)> rec = [&](int a, int left) {
    if (a == k - 1) {
      if (left < b.lo[a] || left > b.hi[a]) return;
      t[a] = left;
      f(t);
      return;
    }
    for (int c = b.lo[a]; c <= std::min(b.hi[a], left); ++c) {
      t[a] = c;
      rec(a + 1, left - c);
    }
  };
  if (k > 0) rec(0, m);
}

u128 mul_sat(u128 a, u128 b) {
  if (a == kNoFit || b == kNoFit) return kNoFit;
  if (a != 0 && b > kNoFit / a) return kNoFit;
  return a * b;
}

u128 add_sat(u128 a, u128 b) {
  if (a == kNoFit || b == kNoFit || a > kNoFit - b) return kNoFit;
  return a + b;
}

u128 binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    const u128 num = mul_sat(r, static_cast<u128>(n - k + i));
    if (num == kNoFit) return kNoFit;
    r = num / static_cast<u128>(i);
  }
  return r;
}

u128 multinomial(const std::vector<int>& t) {
  int n = 0;
  u128 r = 1;
  for (int c : t) {
    n += c;
    r = mul_sat(r, binomial(n, c));
  }
  return r;
}

double log2_multinomial(const std::vector<int>& t) {
  int n = 0;
  double s = 0.0;
  for (int c : t) {
    n += c;
    s -= std::lgamma(c + 1.0);
  }
  return (s + std::lgamma(n + 1.0)) / std::log(2.0);
}

// Running log2-sum-exp2 accumulator.
struct Log2Sum {
  double v = -std::numeric_limits<double>::infinity();
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (v < x) std::swap(v, x);
    v += std::log2(1.0 + std::exp2(x - v));
  }
};

Count finish(u128 exact, double log2v) {
  Count c;
  if (exact != kNoFit && exact <= std::numeric_limits<std::uint64_t>::max())
    c.exact = static_cast<std::uint64_t>(exact);
  c.log2 = log2v;
  return c;
}

void check_word(std::span<const int> word, int n, int alphabet) {
  if (static_cast<int>(word.size()) != n)
    throw Error(ErrorCode::LengthMismatch, "word length " + std::to_string(word.size()) + " != n = " + std::to_string(n));
  for (int a : word)
    if (a < 0 || a >= alphabet) throw Error(ErrorCode::BadParam, "letter out of range: " + std::to_string(a));
}

// Letter groups of a state: eigen-indices with equal eigenvalues share a
// group, zero eigenvalues form groups of probability zero.
ProjectorHandle::Block make_block(const CMatrix& rho, std::vector<int> positions, double delta) {
  const Spectrum sp = eig_hermitian(rho);
  ProjectorHandle::Block b;
  b.positions = std::move(positions);
  b.basis = sp.vectors;
  b.delta = delta;
  const int d = static_cast<int>(sp.values.size());
  std::vector<double> rep;
  for (int k = 0; k < d; ++k) {
    double lam = sp.values[k];
    if (lam < 1e-12) lam = 0.0;
    int g = -1;
    for (int j = 0; j < static_cast<int>(rep.size()); ++j)
      if (std::abs(rep[j] - lam) <= 1e-9) g = j;
    if (g < 0) {
      g = static_cast<int>(rep.size());
      rep.push_back(lam);
      b.group_prob.push_back(0.0);
    }
    b.group_of_index.push_back(g);
    b.group_prob[g] += lam;
  }
  return b;
}

std::vector<int> group_sizes(const ProjectorHandle::Block& b) {
  std::vector<int> m(b.group_prob.size(), 0);
  for (int g : b.group_of_index) ++m[g];
  return m;
}

}  // namespace

TypicalSetSpec::TypicalSetSpec(int alphabet_size_, int n_, double delta_, ProbVector distribution_)
    : alphabet_size(alphabet_size_), n(n_), delta(delta_), distribution(std::move(distribution_)) {
  if (alphabet_size < 1) throw Error(ErrorCode::BadParam, "alphabet size must be >= 1");
  if (n < 0) throw Error(ErrorCode::BadParam, "n must be >= 0");
  if (!(delta >= 0.0)) throw Error(ErrorCode::BadParam, "delta must be >= 0");
  if (static_cast<int>(distribution.size()) != alphabet_size)
    throw Error(ErrorCode::SizeMismatch, "distribution size differs from alphabet size");
}

bool typical_membership(const TypicalSetSpec& ts, std::span<const int> word) {
  check_word(word, ts.n, ts.alphabet_size);
  std::vector<int> counts(ts.alphabet_size, 0);
  for (int a : word) ++counts[a];
  for (int a = 0; a < ts.alphabet_size; ++a)
    if (std::abs(counts[a] - ts.n * ts.distribution[a]) > ts.n * ts.delta + kSlack) return false;
  return true;
}

Count typical_set_size(const TypicalSetSpec& ts) {
  // Same inequality as typical_membership, including letters of zero
  // probability (whose count is then bounded by n*delta).
  Bounds b;
  for (int a = 0; a < ts.alphabet_size; ++a) {
    const double c = ts.n * ts.distribution[a], w = ts.n * ts.delta;
    b.lo.push_back(std::max(0, static_cast<int>(std::ceil(c - w - kSlack))));
    b.hi.push_back(std::min(ts.n, static_cast<int>(std::floor(c + w + kSlack))));
  }
  u128 exact = 0;
  Log2Sum lg;
  for_each_type(ts.n, b, [&](const std::vector<int>& t) {
    exact = add_sat(exact, multinomial(t));
    lg.add(log2_multinomial(t));
  });
  return finish(exact, lg.v);
}

bool conditionally_typical_membership(const AuxChannel& p, std::span<const int> u_word, std::span<const int> x_word,
                                      double delta) {
  if (u_word.size() != x_word.size())
    throw Error(ErrorCode::LengthMismatch, "u and x words differ in length");
  const int n = static_cast<int>(u_word.size());
  const int nu = p.in_size(), nx = p.out_size();
  check_word(u_word, n, nu);
  check_word(x_word, n, nx);
  std::vector<int> nu_count(nu, 0), joint(static_cast<std::size_t>(nu) * nx, 0);
  for (int i = 0; i < n; ++i) {
    ++nu_count[u_word[i]];
    ++joint[static_cast<std::size_t>(u_word[i]) * nx + x_word[i]];
  }
  for (int u = 0; u < nu; ++u)
    for (int x = 0; x < nx; ++x)
      if (std::abs(joint[static_cast<std::size_t>(u) * nx + x] - p(u, x) * nu_count[u]) > n * delta + kSlack)
        return false;
  return true;
}

ProjectorHandle::ProjectorHandle(int n, std::vector<Block> blocks) : n_(n), dim_(0), blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) dim_ = std::max(dim_, static_cast<int>(b.basis.rows()));
}

Count ProjectorHandle::trace() const {
  u128 exact = 1;
  double lg_total = 0.0;
  for (const auto& b : blocks_) {
    const int m = static_cast<int>(b.positions.size());
    const Bounds bd = count_bounds(m, b.delta, b.group_prob);
    const std::vector<int> sizes = group_sizes(b);
    u128 e = 0;
    Log2Sum lg;
    for_each_type(m, bd, [&](const std::vector<int>& t) {
      u128 c = multinomial(t);
      double l = log2_multinomial(t);
      for (std::size_t g = 0; g < t.size(); ++g) {
        for (int r = 0; r < t[g]; ++r) c = mul_sat(c, static_cast<u128>(sizes[g]));
        l += t[g] * std::log2(static_cast<double>(sizes[g]));
      }
      e = add_sat(e, c);
      lg.add(l);
    });
    exact = mul_sat(exact, e);
    lg_total += lg.v;
  }
  if (blocks_.empty()) return finish(1, 0.0);
  return finish(exact, lg_total);
}

double ProjectorHandle::mass(const std::vector<const CMatrix*>& position_states) const {
  if (static_cast<int>(position_states.size()) != n_)
    throw Error(ErrorCode::LengthMismatch, "need one state per position");
  double total = 1.0;
  for (const auto& b : blocks_) {
    const int m = static_cast<int>(b.positions.size());
    const int groups = static_cast<int>(b.group_prob.size());
    // Counts of all groups but the last, encoded in base m + 1.
    std::vector<std::size_t> stride(groups, 1);
    for (int g = 1; g < groups; ++g) stride[g] = stride[g - 1] * static_cast<std::size_t>(m + 1);
    const std::size_t states = groups > 1 ? stride[groups - 1] : 1;
    std::vector<double> dp(states, 0.0), next(states);
    dp[0] = 1.0;
    for (int i = 0; i < m; ++i) {
      const CMatrix& s = *position_states[b.positions[i]];
      if (s.rows() != b.basis.rows()) throw Error(ErrorCode::DimensionMismatch, "position state dimension");
      std::vector<double> q(groups, 0.0);
      for (int k = 0; k < static_cast<int>(b.group_of_index.size()); ++k)
        q[b.group_of_index[k]] += std::max(0.0, (b.basis.col(k).adjoint() * s * b.basis.col(k))(0, 0).real());
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t st = 0; st < states; ++st) {
        if (dp[st] == 0.0) continue;
        for (int g = 0; g < groups; ++g) {
          if (q[g] == 0.0) continue;
          const std::size_t to = g < groups - 1 ? st + stride[g] : st;
          next[to] += dp[st] * q[g];
        }
      }
      dp.swap(next);
    }
    const Bounds bd = count_bounds(m, b.delta, b.group_prob);
    double kept = 0.0;
    std::vector<int> t(groups);
    for (std::size_t st = 0; st < states; ++st) {
      if (dp[st] == 0.0) continue;
      std::size_t r = st;
      int used = 0;
      bool ok = true;
      for (int g = 0; g + 1 < groups; ++g) {
        t[g] = static_cast<int>(r % static_cast<std::size_t>(m + 1));
        r /= static_cast<std::size_t>(m + 1);
        used += t[g];
      }
      t[groups - 1] = m - used;
      if (t[groups - 1] < 0) ok = false;
      for (int g = 0; ok && g < groups; ++g) ok = t[g] >= bd.lo[g] && t[g] <= bd.hi[g];
      if (ok) kept += dp[st];
    }
    total *= kept;
  }
  return total;
}

CMatrix ProjectorHandle::dense() const {
  if (dim_ == 0) return CMatrix::Identity(1, 1);
  const double bits = n_ * std::log2(static_cast<double>(dim_));
  if (bits > 12.0 + 1e-9) throw Error(ErrorCode::EnvelopeExceeded, "dense projector needs n log2 d <= 12");
  std::vector<int> block_of(n_, -1), slot(n_, 0);
  for (int bi = 0; bi < static_cast<int>(blocks_.size()); ++bi)
    for (int j = 0; j < static_cast<int>(blocks_[bi].positions.size()); ++j) {
      block_of[blocks_[bi].positions[j]] = bi;
      slot[blocks_[bi].positions[j]] = j;
    }
  std::vector<Bounds> bounds;
  for (const auto& b : blocks_) bounds.push_back(count_bounds(static_cast<int>(b.positions.size()), b.delta, b.group_prob));

  std::size_t total = 1;
  for (int i = 0; i < n_; ++i) total *= static_cast<std::size_t>(dim_);
  std::vector<CVector> kept;
  std::vector<int> k(n_, 0);
  for (std::size_t w = 0; w < total; ++w) {
    std::size_t r = w;
    for (int i = n_ - 1; i >= 0; --i) {
      k[i] = static_cast<int>(r % static_cast<std::size_t>(dim_));
      r /= static_cast<std::size_t>(dim_);
    }
    bool ok = true;
    for (int bi = 0; ok && bi < static_cast<int>(blocks_.size()); ++bi) {
      std::vector<int> t(blocks_[bi].group_prob.size(), 0);
      for (int pos : blocks_[bi].positions) ++t[blocks_[bi].group_of_index[k[pos]]];
      for (std::size_t g = 0; ok && g < t.size(); ++g) ok = t[g] >= bounds[bi].lo[g] && t[g] <= bounds[bi].hi[g];
    }
    if (!ok) continue;
    CVector v = CVector::Ones(1);
    for (int i = 0; i < n_; ++i) {
      const CVector col = blocks_[block_of[i]].basis.col(k[i]);
      CVector nv(v.size() * col.size());
      for (Eigen::Index a = 0; a < v.size(); ++a) nv.segment(a * col.size(), col.size()) = v[a] * col;
      v = std::move(nv);
    }
    kept.push_back(std::move(v));
  }
  CMatrix vs(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) vs.col(static_cast<Eigen::Index>(c)) = kept[c];
  (void)slot;
  return vs * vs.adjoint();
}

ProjectorHandle typical_projector(const DensityMatrix& rho, int n, double delta) {
  if (n < 0) throw Error(ErrorCode::BadParam, "n must be >= 0");
  if (!(delta >= 0.0)) throw Error(ErrorCode::BadParam, "delta must be >= 0");
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[i] = i;
  std::vector<ProjectorHandle::Block> blocks;
  blocks.push_back(make_block(rho.matrix(), std::move(pos), delta));
  return ProjectorHandle(n, std::move(blocks));
}

ProjectorHandle cond_typical_projector(const std::vector<DensityMatrix>& rho_u, std::span<const int> u_word,
                                       double delta) {
  if (rho_u.empty()) throw Error(ErrorCode::BadParam, "need at least one conditional state");
  if (!(delta >= 0.0)) throw Error(ErrorCode::BadParam, "delta must be >= 0");
  const int n = static_cast<int>(u_word.size());
  check_word(u_word, n, static_cast<int>(rho_u.size()));
  for (const auto& r : rho_u)
    if (r.dim() != rho_u.front().dim()) throw Error(ErrorCode::DimensionMismatch, "conditional states differ in dimension");
  std::vector<ProjectorHandle::Block> blocks;
  for (int u = 0; u < static_cast<int>(rho_u.size()); ++u) {
    std::vector<int> pos;
    for (int i = 0; i < n; ++i)
      if (u_word[i] == u) pos.push_back(i);
    if (pos.empty()) continue;
    blocks.push_back(make_block(rho_u[u].matrix(), std::move(pos), delta));
  }
  return ProjectorHandle(n, std::move(blocks));
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054, n = trials, ph = successes / n;
  const double den = 1.0 + z * z / n;
  const double center = (ph + z * z / (2.0 * n)) / den;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / den;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TraceBoundReport verify_trace_bounds(const CQEnsemble& e, const AuxChannel& w, const std::vector<int>& n_list,
                                     double delta, int trials, std::mt19937_64& rng) {
  const int nx = static_cast<int>(e.size()), nu = w.out_size();
  if (w.in_size() != nx) throw Error(ErrorCode::SizeMismatch, "channel input size differs from the ensemble");
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParam, "delta must be positive");
  if (trials < 1) throw Error(ErrorCode::BadParam, "trials must be >= 1");
  for (int n : n_list)
    if (n < 1 || n > 4096) throw Error(ErrorCode::BadParam, "blocklengths must lie in [1, 4096]");

  const DensityMatrix avg(e.average_state());
  const double h_q = vn_entropy(avg);
  double h_q_given_x = 0.0;
  for (int x = 0; x < nx; ++x) h_q_given_x += e.probs()[x] * vn_entropy(e.state(x));

  // rho_u = sum_x p(x|u) rho_x for the letters that occur.
  std::vector<double> pu(nu, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int u = 0; u < nu; ++u) pu[u] += e.probs()[x] * w(x, u);
  std::vector<DensityMatrix> rho_u;
  for (int u = 0; u < nu; ++u) {
    if (pu[u] <= 0.0) {
      rho_u.push_back(DensityMatrix::maximally_mixed(e.dim()));
      continue;
    }
    CMatrix m = CMatrix::Zero(e.dim(), e.dim());
    for (int x = 0; x < nx; ++x) m += (e.probs()[x] * w(x, u) / pu[u]) * e.state(x).matrix();
    rho_u.push_back(DensityMatrix::normalized(m));
  }

  TraceBoundReport rep;
  const RVector lam = eigenvalues_hermitian(avg.matrix());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > 1e-12) rep.c_bound += std::abs(std::log2(lam[k]));

  const double delta_prime = delta / nx;
  const double delta_u = delta + nx * delta_prime;
  std::discrete_distribution<int> draw_x(e.probs().values().begin(), e.probs().values().end());
  std::vector<std::discrete_distribution<int>> draw_u;
  for (int x = 0; x < nx; ++x) {
    std::vector<double> row(nu);
    for (int u = 0; u < nu; ++u) row[u] = w(x, u);
    draw_u.emplace_back(row.begin(), row.end());
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double last_mass = -1.0;
  for (int n : n_list) {
    const ProjectorHandle pq = typical_projector(avg, n, delta);
    const double lt = pq.trace().log2;
    std::vector<const CMatrix*> same(n, &avg.matrix());
    const double mq = pq.mass(same);
    rep.rows.push_back({n, delta, "log2_trace_q", lt, lt, lt});
    rep.rows.push_back({n, delta, "log2_trace_q_bound", n * (h_q + rep.c_bound * delta), 0, 0});
    rep.rows.back().ci_low = rep.rows.back().ci_high = rep.rows.back().value;
    rep.rows.push_back({n, delta, "mass_q", mq, mq, mq});
    rep.c_fit = std::max(rep.c_fit, (lt / n - h_q) / delta);
    if (mq < last_mass - 1e-12) rep.mass_nondecreasing = false;
    last_mass = mq;

    double exp_x = 0.0, mass_x = 0.0, mass_u = 0.0;
    int hit_x = 0, hit_u = 0;
    std::vector<int> xw(n), uw(n);
    std::vector<const CMatrix*> states(n);
    for (int t = 0; t < trials; ++t) {
      for (int i = 0; i < n; ++i) {
        xw[i] = draw_x(rng);
        uw[i] = draw_u[xw[i]](rng);
        states[i] = &e.state(xw[i]).matrix();
      }
      const ProjectorHandle px = cond_typical_projector(e.states(), xw, delta);
      exp_x += px.trace().log2 / n;
      const double mx = px.mass(states);
      mass_x += mx;
      if (unif(rng) < mx) ++hit_x;
      const ProjectorHandle pu_proj = cond_typical_projector(rho_u, uw, delta_u);
      const double mu = pu_proj.mass(states);
      mass_u += mu;
      if (unif(rng) < mu) ++hit_u;
    }
    exp_x /= trials;
    const auto ci_x = wilson_interval(hit_x, trials);
    const auto ci_u = wilson_interval(hit_u, trials);
    rep.rows.push_back({n, delta, "log2_trace_q_given_x_per_letter", exp_x, exp_x, exp_x});
    rep.rows.push_back({n, delta, "mass_q_given_x", mass_x / trials, ci_x.first, ci_x.second});
    rep.rows.push_back({n, delta_u, "mass_q_given_u", mass_u / trials, ci_u.first, ci_u.second});
    rep.c_fit_cond = std::max(rep.c_fit_cond, (exp_x - h_q_given_x) / delta);
  }
  return rep;
}

std::string TraceBoundReport::csv() const {
  std::string out = "n,delta,quantity,value,ci_low,ci_high\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%s,%.9g,%.9g,%.9g\n", r.n, r.delta, r.quantity.c_str(), r.value, r.ci_low,
                  r.ci_high);
    out += buf;
  }
  return out;
}

std::string TraceBoundReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "c_fit %.6g  c_fit_cond %.6g  c_bound %.6g  mass_nondecreasing %s\n", c_fit, c_fit_cond,
                c_bound, mass_nondecreasing ? "yes" : "no");
  return buf;
}

EntropyBoundReport entropy_bound_check(int dim, int trials, std::mt19937_64& rng) {
  if (dim < 1) throw Error(ErrorCode::BadParam, "dimension must be >= 1");
  if (dim > 64) throw Error(ErrorCode::EnvelopeExceeded, "dimension must be <= 64");
  if (trials < 1) throw Error(ErrorCode::BadParam, "trials must be >= 1");
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> rank_of(1, dim), mode_of(0, 3);
  auto ginibre = [&](int r, int c) {
    CMatrix g(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
    return g;
  };
  EntropyBoundReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const CMatrix g = ginibre(dim, rank_of(rng));
    const CMatrix sigma = g * g.adjoint() / (g * g.adjoint()).trace().real();
    CMatrix b;
    const int mode = mode_of(rng);
    if (mode == 3) {
      // Projector onto the top eigenvectors of sigma: the tight regime.
      const Spectrum sp = eig_hermitian(sigma);
      const int k = rank_of(rng) - 1;
      b = sp.vectors.leftCols(k) * sp.vectors.leftCols(k).adjoint();
    } else {
      Eigen::HouseholderQR<CMatrix> qr(ginibre(dim, dim));
      const CMatrix u = qr.householderQ();
      RVector ev(dim);
      for (int i = 0; i < dim; ++i) {
        const double r = unif(rng);
        ev[i] = mode == 0 ? r : (mode == 1 ? (r < 0.5 ? 0.0 : 1.0) : r * r);
      }
      b = u * ev.cast<cplx>().asDiagonal() * u.adjoint();
    }
    const double eps = std::clamp(1.0 - trace_product_real(sigma, b), 0.0, 1.0);
    const double tr_b = b.trace().real();
    const double bound = 1.0 + eps * std::log2(static_cast<double>(dim)) + (1.0 - eps) * std::log2(tr_b + 1.0);
    const double v = vn_entropy_of(sigma) - bound;
    rep.max_violation = std::max(rep.max_violation, v);
    if (v > 1e-9) ++rep.violations;
  }
  return rep;
}

}  // namespace crdist
