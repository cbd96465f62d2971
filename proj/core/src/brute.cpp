// Exhaustive mesh search for D*(R).
//
// Both I(U;X) and I(U;Q) are sums of per-column terms, and the columns of a
// channel with entries in {0, 1/m, ..., 1} are integer vectors summing to
// m*(1,...,1). Splitting the |X|+1 columns into two groups, each group's
// best (rate, gain) trade-offs for a given partial column sum form a Pareto
// front, and the optimum pairs a front with the front of the complementary
// sum. This visits every mesh channel implicitly.

#include <algorithm>
#include <cmath>

#include "crdist/error.hpp"
#include "crdist/tradeoff.hpp"
#include "solver_internal.hpp"

namespace crdist {

namespace {

struct FrontEntry {
  double rate;
  double gain;
  int first;  // index of the first column; the second is sum - first
};

class MeshColumns {
 public:
  MeshColumns(const ChannelObjective& obj, int nx, int mesh) : nx_(nx), m_(mesh), base_(mesh + 1) {
    count_ = 1;
    for (int x = 0; x < nx; ++x) count_ *= base_;
    rate_.resize(count_);
    gain_.resize(count_);
    std::vector<double> c(nx);
    for (int idx = 0; idx < count_; ++idx) {
      decode(idx, c.data());
      for (double& v : c) v /= m_;
      const MutualInfoPair t = obj.column(c.data());
      rate_[idx] = t.iux - t.iuq;
      gain_[idx] = t.iuq;
    }
  }

  int count() const { return count_; }
  double rate(int i) const { return rate_[i]; }
  double gain(int i) const { return gain_[i]; }

  void decode(int idx, double* out) const {
    for (int x = 0; x < nx_; ++x) {
      out[x] = idx % base_;
      idx /= base_;
    }
  }
  std::vector<int> digits(int idx) const {
    std::vector<int> d(nx_);
    for (int x = 0; x < nx_; ++x) {
      d[x] = idx % base_;
      idx /= base_;
    }
    return d;
  }
  int encode(const std::vector<int>& d) const {
    int idx = 0;
    for (int x = nx_ - 1; x >= 0; --x) idx = idx * base_ + d[x];
    return idx;
  }
  int complement(int idx) const {
    auto d = digits(idx);
    for (int& v : d) v = m_ - v;
    return encode(d);
  }
  int difference(int s, int c) const {
    auto ds = digits(s), dc = digits(c);
    for (int x = 0; x < nx_; ++x) ds[x] -= dc[x];
    return encode(ds);
  }

  /// Pareto front over column pairs (c, s - c) for a sum s within [0, m]^nx.
  std::vector<FrontEntry> pair_front(int s) const {
    const auto ds = digits(s);
    std::vector<FrontEntry> all;
    std::vector<int> dc(nx_, 0);
    while (true) {
      const int c = encode(dc);
      const int rest = difference(s, c);
      all.push_back({rate_[c] + rate_[rest], gain_[c] + gain_[rest], c});
      int x = 0;
      while (x < nx_ && dc[x] == ds[x]) dc[x++] = 0;
      if (x == nx_) break;
      ++dc[x];
    }
    std::sort(all.begin(), all.end(), [](const FrontEntry& a, const FrontEntry& b) {
      return a.rate < b.rate || (a.rate == b.rate && a.gain > b.gain);
    });
    std::vector<FrontEntry> front;
    for (const auto& e : all)
      if (front.empty() || e.gain > front.back().gain) front.push_back(e);
    return front;
  }

 private:
  int nx_, m_, base_;
  int count_;
  std::vector<double> rate_, gain_;
};

}  // namespace

CurvePoint brute_dstar(const CQEnsemble& e, double rate, int mesh) {
  const int nx = static_cast<int>(e.size());
  if (nx > 3) throw Error(ErrorCode::EnvelopeExceeded, "brute_dstar supports |X| <= 3");
  if (mesh < 1) throw Error(ErrorCode::BadParam, "mesh must be >= 1");
  if (!(rate >= 0.0)) throw Error(ErrorCode::BadParam, "rate must be nonnegative");
  const ChannelObjective obj(e);
  const MeshColumns cols(obj, nx, mesh);
  const double budget = rate + 1e-12;

  double best = -1.0;
  std::vector<int> witness;  // column indices, nx + 1 of them
  if (nx == 1) {
    for (int c = 0; c < cols.count(); ++c) {
      const int d = cols.complement(c);
      const double r = cols.rate(c) + cols.rate(d), g = cols.gain(c) + cols.gain(d);
      if (r <= budget && g > best) {
        best = g;
        witness = {c, d};
      }
    }
  } else {
    // Fronts are needed for every partial sum in [0, m]^nx.
    std::vector<std::vector<FrontEntry>> fronts(static_cast<std::size_t>(cols.count()));
    for (int s = 0; s < cols.count(); ++s) fronts[s] = cols.pair_front(s);
    for (int s = 0; s < cols.count(); ++s) {
      const int t = cols.complement(s);
      const auto& fa = fronts[s];
      if (nx == 2) {
        // Two columns summing to s plus the single column t.
        const double left = budget - cols.rate(t);
        auto it = std::upper_bound(fa.begin(), fa.end(), left,
                                   [](double v, const FrontEntry& fe) { return v < fe.rate; });
        if (it == fa.begin()) continue;
        --it;
        const double g = it->gain + cols.gain(t);
        if (g > best) {
          best = g;
          witness = {it->first, cols.difference(s, it->first), t};
        }
      } else {
        if (t < s) continue;  // the pair of fronts is symmetric
        const auto& fb = fronts[t];
        // Two pointers: fa ascending in rate, the matching fb entry moves down.
        int j = static_cast<int>(fb.size()) - 1;
        for (const auto& a : fa) {
          while (j >= 0 && a.rate + fb[j].rate > budget) --j;
          if (j < 0) break;
          const double g = a.gain + fb[j].gain;
          if (g > best) {
            best = g;
            witness = {a.first, cols.difference(s, a.first), fb[j].first, cols.difference(t, fb[j].first)};
          }
        }
      }
    }
  }

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nx, nx + 1);
  std::vector<double> digits(nx);
  for (std::size_t u = 0; u < witness.size(); ++u) {
    cols.decode(witness[u], digits.data());
    for (int x = 0; x < nx; ++x) q(x, static_cast<Eigen::Index>(u)) = digits[x] / mesh;
  }
  const AuxChannel w(q);
  const RateGain v = eval_pair(e, w);
  CurvePoint pt;
  pt.comm_rate = rate;
  pt.distilled = v.gain;
  pt.cr_rate = rate + v.gain;
  pt.channel = w;
  pt.witness_rate = v.rate;
  return pt;
}

}  // namespace crdist
