#pragma once

// Text format for ensembles, bipartite states, channels and POVMs (JSON).
//
//   ensemble:  {"dim": 2, "probs": [0.5, 0.5],
//               "states": [{"ket": [[1,0],[0,0]]}, {"dm": [[[..],[..]], ...]}],
//               "label": "two_state"}
//   bipartite: {"dim_a": 2, "dim_b": 2, "dm": [...]}  or  {"dim_a", "dim_b", "ket": [...]}
//              optional "separable": [{"q": 0.5, "a": {state}, "b": {state}}, ...]
//   channel:   {"channel": [[row], ...]}
//   povm:      {"dim": 2, "povm": [[[re,im]..]..], ...}
//
// Complex numbers are [re, im] pairs. Kets are normalized on load when their
// norm is within 1e-6 of one; otherwise loading fails.

#include <optional>
#include <string>
#include <vector>

#include "crdist/ensembles.hpp"

namespace crdist {

/// A product-state decomposition sum_j q_j a_j (x) b_j.
struct SeparableDecomposition {
  std::vector<double> weights;
  std::vector<DensityMatrix> alice;
  std::vector<DensityMatrix> bob;
};

struct BipartiteFile {
  BipartiteState state;
  std::optional<SeparableDecomposition> separable;
};

CQEnsemble parse_ensemble(const std::string& text);
CQEnsemble read_ensemble(const std::string& path);
std::string format_ensemble(const CQEnsemble& e);

BipartiteFile parse_bipartite(const std::string& text);
BipartiteFile read_bipartite(const std::string& path);
std::string format_bipartite(const BipartiteState& s);

/// Bipartite file or ensemble file; an ensemble becomes the state
/// sum_x p(x)|x><x| (x) rho_x with the label on Alice's side.
BipartiteFile read_state_or_ensemble(const std::string& path);

AuxChannel parse_channel(const std::string& text);
std::string format_channels(const std::vector<double>& rates, const std::vector<AuxChannel>& channels);

Povm parse_povm(const std::string& text);
std::string format_povm(const Povm& m);

/// Builds a product-state separable state from its decomposition.
BipartiteState separable_state(const SeparableDecomposition& dec);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string slurp(const std::string& path);

}  // namespace crdist
