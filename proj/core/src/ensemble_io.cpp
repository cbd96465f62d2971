#include "crdist/ensemble_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crdist/error.hpp"

namespace crdist {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::ParseError, where + ": " + msg);
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    // nlohmann reports "line L, column C" in the message.
    throw Error(ErrorCode::ParseError, ex.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long>() <= 0) fail(where, "expected a positive integer");
  return v.get<int>();
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

cplx as_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(where, "expected [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

CVector read_ket(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(where, "ket must have " + std::to_string(dim) + " entries");
  CVector k(dim);
  for (int i = 0; i < dim; ++i) k(i) = as_complex(v[i], where + "[" + std::to_string(i) + "]");
  const double norm = k.norm();
  if (std::abs(norm - 1.0) > 1e-6) fail(where, "ket norm " + std::to_string(norm) + " is not 1");
  return k / norm;
}

CMatrix read_matrix(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(where, "matrix must have " + std::to_string(dim) + " rows");
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim) fail(row, "row must have " + std::to_string(dim) + " entries");
    for (int j = 0; j < dim; ++j) m(i, j) = as_complex(v[i][j], row + "[" + std::to_string(j) + "]");
  }
  return m;
}

DensityMatrix read_state(const json& v, int dim, const std::string& where) {
  if (v.contains("ket")) return DensityMatrix::from_ket(read_ket(v["ket"], dim, where + ".ket"));
  if (v.contains("dm")) {
    try {
      return DensityMatrix(read_matrix(v["dm"], dim, where + ".dm"));
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::ParseError) throw;
      fail(where + ".dm", ex.what());
    }
  }
  fail(where, "state needs a 'ket' or 'dm' field");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CQEnsemble parse_ensemble(const std::string& text) {
  const json doc = parse_text(text);
  const int dim = as_int(field(doc, "dim", "ensemble"), "ensemble.dim");
  const json& probs = field(doc, "probs", "ensemble");
  const json& states = field(doc, "states", "ensemble");
  if (!probs.is_array() || probs.empty()) fail("ensemble.probs", "expected a nonempty array");
  if (!states.is_array()) fail("ensemble.states", "expected an array");
  if (probs.size() != states.size()) {
    fail("ensemble", std::to_string(probs.size()) + " probabilities but " + std::to_string(states.size()) + " states");
  }
  std::vector<double> p;
  std::vector<DensityMatrix> rho;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    p.push_back(as_real(probs[x], "ensemble.probs[" + std::to_string(x) + "]"));
    rho.push_back(read_state(states[x], dim, "ensemble.states[" + std::to_string(x) + "]"));
  }
  std::string label = doc.value("label", std::string{});
  try {
    return CQEnsemble(ProbVector(std::move(p), 1e-9), std::move(rho), std::move(label));
  } catch (const Error& ex) {
    fail("ensemble.probs", ex.what());
  }
}

CQEnsemble read_ensemble(const std::string& path) { return parse_ensemble(slurp(path)); }

std::string format_ensemble(const CQEnsemble& e) {
  json doc;
  doc["dim"] = e.dim();
  doc["probs"] = e.probs().values();
  json states = json::array();
  for (const auto& s : e.states()) states.push_back({{"dm", matrix_json(s.matrix())}});
  doc["states"] = states;
  if (!e.label().empty()) doc["label"] = e.label();
  return doc.dump(2) + "\n";
}

BipartiteFile parse_bipartite(const std::string& text) {
  const json doc = parse_text(text);
  const int da = as_int(field(doc, "dim_a", "state"), "state.dim_a");
  const int db = as_int(field(doc, "dim_b", "state"), "state.dim_b");
  std::optional<SeparableDecomposition> sep;
  if (doc.contains("separable")) {
    const json& parts = doc["separable"];
    if (!parts.is_array() || parts.empty()) fail("state.separable", "expected a nonempty array");
    SeparableDecomposition dec;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const std::string where = "state.separable[" + std::to_string(j) + "]";
      dec.weights.push_back(as_real(field(parts[j], "q", where), where + ".q"));
      dec.alice.push_back(read_state(field(parts[j], "a", where), da, where + ".a"));
      dec.bob.push_back(read_state(field(parts[j], "b", where), db, where + ".b"));
    }
    sep = std::move(dec);
  }
  auto build = [&]() -> BipartiteState {
    if (doc.contains("ket")) return BipartiteState::from_ket(da, db, read_ket(doc["ket"], da * db, "state.ket"));
    if (doc.contains("dm")) {
      try {
        return BipartiteState(da, db, DensityMatrix(read_matrix(doc["dm"], da * db, "state.dm")));
      } catch (const Error& ex) {
        if (ex.code() == ErrorCode::ParseError) throw;
        fail("state.dm", ex.what());
      }
    }
    if (sep) {
      try {
        return separable_state(*sep);
      } catch (const Error& ex) {
        fail("state.separable", ex.what());
      }
    }
    fail("state", "needs 'dm', 'ket' or 'separable'");
  };
  BipartiteState s = build();
  if (sep) {
    const CMatrix diff = separable_state(*sep).state.matrix() - s.state.matrix();
    if (diff.cwiseAbs().maxCoeff() > 1e-8) fail("state.separable", "decomposition does not reproduce 'dm'");
  }
  return BipartiteFile{std::move(s), std::move(sep)};
}

BipartiteFile read_bipartite(const std::string& path) { return parse_bipartite(slurp(path)); }

BipartiteFile read_state_or_ensemble(const std::string& path) {
  const std::string text = slurp(path);
  const json doc = parse_text(text);
  if (doc.is_object() && doc.contains("dim_a")) return parse_bipartite(text);
  return BipartiteFile{ehs_bipartite(parse_ensemble(text)), std::nullopt};
}

std::string format_bipartite(const BipartiteState& s) {
  json doc;
  doc["dim_a"] = s.dim_a;
  doc["dim_b"] = s.dim_b;
  doc["dm"] = matrix_json(s.state.matrix());
  return doc.dump(2) + "\n";
}

BipartiteState separable_state(const SeparableDecomposition& dec) {
  if (dec.weights.empty() || dec.alice.size() != dec.weights.size() || dec.bob.size() != dec.weights.size()) {
    throw Error(ErrorCode::SizeMismatch, "separable decomposition lists differ in length");
  }
  const ProbVector q(dec.weights, 1e-9);
  const int da = dec.alice.front().dim(), db = dec.bob.front().dim();
  CMatrix m = CMatrix::Zero(da * db, da * db);
  for (std::size_t j = 0; j < q.size(); ++j) m += q[j] * tensor(dec.alice[j].matrix(), dec.bob[j].matrix());
  return BipartiteState(da, db, DensityMatrix(m, 1e-9));
}

AuxChannel parse_channel(const std::string& text) {
  const json doc = parse_text(text);
  const json& rows = doc.is_object() ? field(doc, "channel", "channel") : doc;
  if (!rows.is_array() || rows.empty()) fail("channel", "expected a nonempty array of rows");
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  if (cols == 0) fail("channel[0]", "expected a nonempty row");
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const std::string where = "channel[" + std::to_string(x) + "]";
    if (!rows[x].is_array() || rows[x].size() != cols) fail(where, "rows differ in length");
    for (std::size_t u = 0; u < cols; ++u) m(x, u) = as_real(rows[x][u], where);
  }
  try {
    return AuxChannel(m);
  } catch (const Error& ex) {
    fail("channel", ex.what());
  }
}

std::string format_channels(const std::vector<double>& rates, const std::vector<AuxChannel>& channels) {
  json doc = json::array();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    json rows = json::array();
    const auto& m = channels[i].matrix();
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
      json row = json::array();
      for (Eigen::Index u = 0; u < m.cols(); ++u) row.push_back(m(x, u));
      rows.push_back(row);
    }
    doc.push_back({{"R", i < rates.size() ? rates[i] : 0.0}, {"channel", rows}});
  }
  return doc.dump(2) + "\n";
}

Povm parse_povm(const std::string& text) {
  const json doc = parse_text(text);
  const int dim = as_int(field(doc, "dim", "povm"), "povm.dim");
  const json& el = field(doc, "povm", "povm");
  if (!el.is_array() || el.empty()) fail("povm.povm", "expected a nonempty array");
  std::vector<CMatrix> elements;
  for (std::size_t i = 0; i < el.size(); ++i) elements.push_back(read_matrix(el[i], dim, "povm.povm[" + std::to_string(i) + "]"));
  return Povm(dim, std::move(elements));
}

std::string format_povm(const Povm& m) {
  json doc;
  doc["dim"] = m.dim();
  json el = json::array();
  for (const auto& e : m.elements()) el.push_back(matrix_json(e));
  doc["povm"] = el;
  return doc.dump(2) + "\n";
}

}  // namespace crdist
