#include "nctheta/serialization.hpp"

#include <cmath>
#include <cstdio>

namespace nctheta {

namespace {

void write(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(key).dump() + (indent > 0 ? ": " : ":");
        write(val, indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ",";
          out += flat ? " " : nl;
        }
        first = false;
        if (!flat) out += pad;
        write(v, indent, depth + 1, out);
      }
      if (!flat) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

int get_dim(const Json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("embedding.") + key + " is required");
  if (!j.at(key).is_number_integer() || j.at(key).get<int>() < 0) {
    config_error(std::string("embedding.") + key + " must be a non-negative integer");
  }
  return j.at(key).get<int>();
}

RMatrix optional_rmatrix(const Json& j, const char* key, int n) {
  if (!j.contains(key)) {
    if (n == 0) return RMatrix(0, 0);
    config_error(std::string("embedding.") + key + " is required");
  }
  RMatrix m = rmatrix_from_json(j.at(key));
  if (n == 0 && m.size() == 0) return RMatrix(0, 0);
  return m;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Index& k) { return Json(k); }

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  config_error("complex entries must be a number or a [re, im] pair, got " + j.dump());
}

CMatrix cmatrix_from_json(const Json& j) {
  if (!j.is_array()) config_error("matrix must be an array of rows");
  if (j.empty()) return CMatrix(0, 0);
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) config_error("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
    }
  }
  return m;
}

RMatrix rmatrix_from_json(const Json& j) {
  if (!j.is_array()) config_error("matrix must be an array of rows");
  if (j.empty()) return RMatrix(0, 0);
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  RMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) config_error("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) config_error("real matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Json to_json(const QuantumElement& x) {
  Json coeffs = Json::array();
  for (const auto& [k, c] : x.coeffs()) {
    coeffs.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"radius", x.radius()}, {"coeffs", std::move(coeffs)}};
}

QuantumElement quantum_element_from_json(const EmbeddingMap& emb, const Json& j) {
  if (!j.is_object() || !j.contains("radius") || !j.contains("coeffs")) {
    config_error("quantum element needs radius and coeffs");
  }
  QuantumElement x(emb, j.at("radius").get<std::int64_t>());
  for (const auto& e : j.at("coeffs")) {
    x.set(e.at("k").get<Index>(), {e.at("re").get<double>(), e.at("im").get<double>()});
  }
  return x;
}

EmbeddingMap embedding_from_json(const Json& j) {
  if (!j.is_object()) config_error("embedding must be an object");
  try {
    if (j.contains("phi")) {
      const RMatrix phi = rmatrix_from_json(j.at("phi"));
      int p = 0, q = 0;
      if (j.contains("p") || j.contains("q")) {
        p = get_dim(j, "p");
        q = get_dim(j, "q");
      } else {
        // rows = 2p + 2q, cols = 2p + q
        q = static_cast<int>(phi.rows() - phi.cols());
        p = static_cast<int>(phi.cols() - q) / 2;
        if (q < 0 || 2 * p + q != phi.cols()) config_error("phi shape is not (2p+2q) x (2p+q)");
      }
      return EmbeddingMap::from_phi(p, q, phi);
    }
    const int p = get_dim(j, "p");
    const int q = get_dim(j, "q");
    if (p + q == 0) config_error("p + q must be positive");
    RVector theta(p);
    if (p > 0) {
      if (!j.contains("theta") || !j.at("theta").is_array() || j.at("theta").size() != static_cast<std::size_t>(p)) {
        config_error("embedding.theta must list p numbers");
      }
      for (int i = 0; i < p; ++i) theta(i) = j.at("theta")[static_cast<std::size_t>(i)].get<double>();
    }
    return canonical_embedding(p, q, theta, optional_rmatrix(j, "Q", q), optional_rmatrix(j, "Delta", q));
  } catch (const Json::exception& e) {
    config_error(std::string("embedding: ") + e.what());
  }
}

Json to_json(const EmbeddingMap& emb) { return {{"p", emb.p()}, {"q", emb.q()}, {"phi", to_json(emb.phi())}}; }

ComplexStructure complex_structure_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("T1") || !j.contains("T2")) {
    config_error("complex structure needs kind, T1 and T2");
  }
  ComplexStructure cs;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "full") {
    cs.kind = ComplexStructure::Kind::Full;
  } else if (kind == "partial") {
    cs.kind = ComplexStructure::Kind::Partial;
  } else {
    config_error("complex structure kind must be \"full\" or \"partial\"");
  }
  cs.t1 = cmatrix_from_json(j.at("T1"));
  cs.t2 = cmatrix_from_json(j.at("T2"));
  return cs;
}

Json to_json(const HolomorphyResult& r) {
  const auto& w = r.witness;
  Json out = {
      {"variant", std::string(to_string(r.variant))},
      {"note", r.note},
      {"witness",
       {{"left_rank", w.left_rank},
        {"required_rank", w.required_rank},
        {"symmetry_residual", w.symmetry_residual},
        {"min_imag_eigenvalue", w.min_imag_eigenvalue},
        {"substitution_residual", w.substitution_residual},
        {"failed_condition", w.failed_condition},
        {"A", to_json(w.a)},
        {"C", to_json(w.c)},
        {"F", to_json(w.f)}}},
  };
  if (r.variant == HolomorphyResult::Variant::UniqueSolution) out["omega"] = to_json(r.omega);
  if (r.g) out["G"] = to_json(*r.g);
  return out;
}

Json to_json(const NonexistenceSearchReport& r) {
  return {{"left_rank", r.left_rank},
          {"required_rank", r.required_rank},
          {"rank_certificate", r.rank_certificate},
          {"best_residual", r.best_residual},
          {"best_residual_max", r.best_residual_max},
          {"min_trial_residual", r.min_trial_residual},
          {"trials", r.trials}};
}

Json to_json(const ThetaVectorResult& r) {
  return {{"omega", to_json(r.vector.omega)},
          {"G", to_json(r.g)},
          {"symmetry_residual", r.symmetry_residual},
          {"min_imag_eigenvalue", r.min_imag_eigenvalue},
          {"substitution_residual", r.substitution_residual},
          {"holomorphy_residual", r.holomorphy_residual}};
}

Json to_json(const FunctionalEquationReport& r) {
  return {{"g", r.g},
          {"kind", std::string(to_string(r.kind))},
          {"interior_radius", r.interior_radius},
          {"compared", r.compared},
          {"max_residual", r.max_residual},
          {"threshold", r.threshold},
          {"passed", r.passed}};
}

Json to_json(const CocycleReport& r) {
  return {{"kind", std::string(to_string(r.kind))},
          {"pairs", r.pairs},
          {"max_modulus_residual", r.max_modulus_residual},
          {"max_phase_residual", r.max_phase_residual},
          {"max_definitional_residual", r.max_definitional_residual},
          {"threshold", r.threshold},
          {"passed", r.passed}};
}

Json to_json(const AdditivityReport& r) {
  Json out = {{"kind", std::string(to_string(r.kind))},
              {"verdict", std::string(to_string(r.verdict))},
              {"search_radius", r.search_radius},
              {"exhaustive", r.exhaustive},
              {"triples_searched", r.triples_searched},
              {"triples_skipped_degenerate", r.triples_skipped_degenerate},
              {"max_deviation", r.max_deviation}};
  if (r.witness) {
    const auto& w = *r.witness;
    out["witness"] = {{"g1", w.g1},           {"g2", w.g2},         {"h", w.h},
                      {"T_g1", to_json(w.t_g1)}, {"T_g2", to_json(w.t_g2)}, {"T_g1_plus_g2", to_json(w.t_sum)},
                      {"deviation", w.deviation}};
  }
  return out;
}

}  // namespace nctheta
