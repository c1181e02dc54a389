#include "nctheta/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <thread>

namespace nctheta {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const std::set<std::string> kReportNames = {"classification", "theta", "verification"};

double positive(const Json& tol, const char* key) {
  if (!tol.contains(key) || !tol.at(key).is_number()) config_error(std::string("tolerances.") + key + " is required");
  const double v = tol.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) config_error(std::string("tolerances.") + key + " must be positive");
  return v;
}

template <typename T>
T non_negative_int(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    config_error(std::string(key) + " must be a non-negative integer");
  }
  return static_cast<T>(v.get<std::int64_t>());
}

bool wants(const RunConfig& cfg, Stage stage, const std::string& name) {
  const bool eligible = stage == Stage::All || (stage == Stage::Classify && name == "classification") ||
                        (stage == Stage::Theta && name == "theta") || (stage == Stage::Verify && name == "verification");
  if (!eligible) return false;
  return cfg.outputs.empty() || std::find(cfg.outputs.begin(), cfg.outputs.end(), name) != cfg.outputs.end();
}

Json failure_json(const std::vector<Failure>& fs) {
  Json out = Json::array();
  for (const auto& f : fs) out.push_back({{"reason", f.reason}, {"detail", f.detail}});
  return out;
}

// Gaussian envelope of |theta coefficient at h| used to scale the formula check.
double coefficient_envelope(const HermitianFormContext& ctx, const LatticePoint& h) {
  double e = h.p() > 0 ? -0.5 * kPi * hermitian_form(ctx, h, h).real() : 0.0;
  for (int j = 0; j < h.q(); ++j) {
    const double m = static_cast<double>(h.m(j));
    e -= 0.25 * kPi * m * m;
  }
  return std::exp(e);
}

struct VectorStage {
  std::optional<GaussianVector> vector;
  Json report;
};

VectorStage classify_and_build(const RunConfig& cfg, std::vector<Failure>& failures) {
  const auto& emb = cfg.embedding;
  const int p = emb.p();
  const int q = emb.q();
  VectorStage out;
  out.report = {{"schema_version", kSchemaVersion}, {"embedding", to_json(emb)}};

  auto build_partial = [&](const ComplexStructure& cs) {
    try {
      const auto tv = build_theta_vector(emb, cs);
      out.report["partial"] = to_json(tv);
      out.report["partial"]["status"] = "ok";
      if (tv.substitution_residual >= cfg.tolerances.residual_abs) {
        failures.push_back({"substitution_residual", "partial structure residual exceeds residual_abs"});
      }
      out.vector = tv.vector;
    } catch (const Error& e) {
      out.report["partial"] = {{"status", std::string(to_string(e.code()))}, {"detail", e.what()}};
      failures.push_back({"no_theta_vector", e.what()});
    }
  };

  if (cfg.complex_structure.kind == ComplexStructure::Kind::Partial) {
    out.report["structure"] = "partial";
    build_partial(cfg.complex_structure);
    return out;
  }

  out.report["structure"] = "full";
  const auto res = classify_holomorphic(emb, cfg.complex_structure);
  out.report["full"] = to_json(res);
  switch (res.variant) {
    case HolomorphyResult::Variant::UniqueSolution:
      if (res.witness.substitution_residual >= cfg.tolerances.residual_abs) {
        failures.push_back({"substitution_residual", "C Omega - A exceeds residual_abs"});
      }
      out.vector = GaussianVector::theta_vector(res.omega, q);
      break;
    case HolomorphyResult::Variant::DeltaOnly:
      out.vector = GaussianVector::theta_vector(CMatrix(0, 0), q);
      break;
    case HolomorphyResult::Variant::NonExistent:
      if (p > 0 && q > 0) {
        const auto search = verify_nonexistence_by_search(emb, cfg.complex_structure,
                                                          static_cast<int>(cfg.verify.nonexistence_trials), cfg.seed);
        out.report["nonexistence_search"] = to_json(search);
        if (!search.rank_certificate) {
          failures.push_back({"rank_certificate", "rank(C) <= p < rank(A, C, F) does not hold"});
        }
      }
      if (cfg.partial_structure) {
        build_partial(*cfg.partial_structure);
      } else {
        out.report["partial"] = {{"status", "not_configured"}};
      }
      break;
  }
  return out;
}

Json verify_stage(const RunConfig& cfg, const GaussianVector& f, const QuantumElement& theta, RunOutcome& outcome) {
  const auto& emb = cfg.embedding;
  const HermitianFormContext ctx(f.omega);
  const TranslationKind kind =
      cfg.verify.kind.value_or(emb.q() == 0 ? TranslationKind::Manin : TranslationKind::Modified);
  const double thr = cfg.tolerances.residual_abs;

  Json rep = {{"schema_version", kSchemaVersion},
              {"kind", std::string(to_string(kind))},
              {"g_radius", cfg.verify.g_radius},
              {"truncation_R", cfg.truncation_R}};
  std::set<Index> offending;

  // Functional equation, one task per slice of the g-ball; merged in ball order.
  const auto ball = index_ball(emb.d(), cfg.verify.g_radius);
  struct Slot {
    std::optional<FunctionalEquationReport> report;
    std::vector<Index> degenerate;
  };
  std::vector<Slot> slots(ball.size());
  const std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      FactorTable table(ctx, emb, kind);
      for (std::size_t i = w; i < ball.size(); i += workers) {
        try {
          auto r = verify_functional_equation(table, theta, lattice_point(emb, ball[i]));
          r.threshold = thr;
          r.passed = r.max_residual < thr;
          slots[i].report = r;
        } catch (const DegenerateTranslationError& e) {
          slots[i].degenerate = e.offending();
        }
      }
    }));
  }
  for (auto& t : tasks) t.get();

  Json fe = Json::array();
  double fe_max = 0.0;
  std::size_t fe_failed = 0, fe_degenerate = 0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (slots[i].report) {
      fe.push_back(to_json(*slots[i].report));
      fe_max = std::max(fe_max, slots[i].report->max_residual);
      if (!slots[i].report->passed) ++fe_failed;
    } else {
      ++fe_degenerate;
      offending.insert(slots[i].degenerate.begin(), slots[i].degenerate.end());
      fe.push_back({{"g", ball[i]}, {"degenerate", true}});
    }
  }
  rep["functional_equation"] = {{"per_g", fe},
                                {"max_residual", fe_max},
                                {"failed", fe_failed},
                                {"degenerate", fe_degenerate},
                                {"threshold", thr}};
  if (fe_failed > 0) {
    outcome.failures.push_back({"functional_equation", std::to_string(fe_failed) + " g exceed residual_abs"});
  }

  // Cocycle consistency on seeded pairs from the same ball.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
  for (std::size_t i = 0; i < cfg.verify.cocycle_samples; ++i) {
    const auto& a = ball[pick(rng)];
    const auto& b = ball[pick(rng)];
    pairs.emplace_back(lattice_point(emb, a), lattice_point(emb, b));
  }
  try {
    const auto cr = verify_cocycle_consistency(ctx, emb, kind, pairs);
    rep["cocycle"] = to_json(cr);
    if (!cr.passed) outcome.failures.push_back({"cocycle", "cocycle consistency exceeds its threshold"});
  } catch (const DegenerateTranslationError& e) {
    offending.insert(e.offending().begin(), e.offending().end());
    rep["cocycle"] = {{"degenerate", true}, {"detail", e.what()}};
  }

  // Additivity dichotomy.
  const auto ar = additivity_probe(ctx, emb, kind, cfg.verify.additivity_search_radius, cfg.seed);
  rep["additivity"] = to_json(ar);
  const bool expect_witness = kind == TranslationKind::Modified && emb.q() > 0;
  rep["additivity"]["expected"] = expect_witness ? "witness" : "additive";
  if (expect_witness && ar.verdict != AdditivityReport::Verdict::Witness) {
    outcome.failures.push_back({"additivity", "no non-additivity witness within the search radius"});
  }
  if (!expect_witness && ar.max_deviation >= 1e-10) {
    outcome.failures.push_back({"additivity", "translations are not multiplicative to 1e-10"});
  }

  if (!offending.empty()) {
    outcome.degenerate_translation = true;
    Json idx = Json::array();
    for (const auto& k : offending) idx.push_back(k);
    rep["degenerate_translation"] = {{"flag", true}, {"offending", idx}};
    outcome.failures.push_back({"degenerate_translation",
                                std::to_string(offending.size()) + " lattice point(s) with vanishing C^"});
  } else {
    rep["degenerate_translation"] = {{"flag", false}};
  }
  return rep;
}

}  // namespace

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Classify: return "classify";
    case Stage::Theta: return "theta";
    case Stage::Verify: return "verify";
    case Stage::All: return "all";
  }
  return "unknown";
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> known = {"embedding", "complex_structure", "partial_structure", "truncation_R",
                                              "tolerances", "seed", "outputs", "verify"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) config_error("unknown config key \"" + key + "\"");
  }
  for (const char* key : {"embedding", "complex_structure", "truncation_R", "tolerances", "seed"}) {
    if (!j.contains(key)) config_error(std::string("missing required key \"") + key + "\"");
  }
  try {
    EmbeddingMap emb = [&] {
      try {
        return embedding_from_json(j.at("embedding"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        config_error(e.what());
      }
    }();
    ComplexStructure cs = complex_structure_from_json(j.at("complex_structure"));
    const int p = emb.p();
    const int half = emb.d() / 2;
    const int n = cs.kind == ComplexStructure::Kind::Full ? half : p;
    if (cs.kind == ComplexStructure::Kind::Full && emb.d() % 2 != 0) {
      config_error("a full complex structure needs an even dimension d = 2p + q");
    }
    if (cs.t1.rows() != n || cs.t1.cols() != n || cs.t2.rows() != n || cs.t2.cols() != n) {
      config_error("T1 and T2 must be " + std::to_string(n) + " x " + std::to_string(n));
    }
    std::optional<ComplexStructure> partial;
    if (j.contains("partial_structure")) {
      partial = complex_structure_from_json(j.at("partial_structure"));
      if (partial->kind != ComplexStructure::Kind::Partial) config_error("partial_structure.kind must be \"partial\"");
      if (partial->t1.rows() != p || partial->t1.cols() != p || partial->t2.rows() != p || partial->t2.cols() != p) {
        config_error("partial_structure T1 and T2 must be p x p");
      }
    }
    if (cs.kind == ComplexStructure::Kind::Partial && p == 0) config_error("a partial structure needs p >= 1");

    if (!j.at("truncation_R").is_number_integer() || j.at("truncation_R").get<std::int64_t>() < 1) {
      config_error("truncation_R must be an integer >= 1");
    }
    const auto& tol = j.at("tolerances");
    if (!tol.is_object()) config_error("tolerances must be an object");
    Tolerances t{positive(tol, "inner_rel"), positive(tol, "residual_abs"), positive(tol, "tail_eps")};

    if (!j.at("seed").is_number_unsigned()) config_error("seed must be an unsigned integer");

    std::vector<std::string> outputs;
    if (j.contains("outputs")) {
      for (const auto& o : j.at("outputs")) {
        const auto name = o.get<std::string>();
        if (!kReportNames.count(name)) config_error("unknown output \"" + name + "\"");
        outputs.push_back(name);
      }
    }

    VerifyOptions v;
    if (j.contains("verify")) {
      const auto& vj = j.at("verify");
      if (!vj.is_object()) config_error("verify must be an object");
      v.g_radius = non_negative_int<std::int64_t>(vj, "g_radius", v.g_radius);
      v.cocycle_samples = non_negative_int<std::size_t>(vj, "cocycle_samples", v.cocycle_samples);
      v.additivity_search_radius =
          non_negative_int<std::int64_t>(vj, "additivity_search_radius", v.additivity_search_radius);
      v.nonexistence_trials = non_negative_int<std::size_t>(vj, "nonexistence_trials", v.nonexistence_trials);
      if (vj.contains("kind")) {
        const auto k = vj.at("kind").get<std::string>();
        if (k == "manin") {
          v.kind = TranslationKind::Manin;
        } else if (k == "modified") {
          v.kind = TranslationKind::Modified;
        } else if (k != "auto") {
          config_error("verify.kind must be manin, modified or auto");
        }
      }
    }
    const auto radius = j.at("truncation_R").get<std::int64_t>();
    if (2 * v.g_radius > radius) config_error("verify.g_radius must be at most truncation_R / 2");

    return RunConfig{std::move(emb), std::move(cs), std::move(partial), radius, t, j.at("seed").get<std::uint64_t>(),
                     std::move(outputs), v};
  } catch (const Json::exception& e) {
    config_error(e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunOutcome run_pipeline(const RunConfig& cfg, Stage stage) {
  RunOutcome outcome;
  auto vs = classify_and_build(cfg, outcome.failures);
  if (wants(cfg, stage, "classification")) outcome.reports["classification"] = vs.report;

  if (stage != Stage::Classify) {
    if (!vs.vector) {
      outcome.failures.push_back({"no_theta_vector", "no holomorphic vector to build the quantum theta from"});
    } else {
      const auto& f = *vs.vector;
      const auto& emb = cfg.embedding;
      const auto theta = quantum_theta(emb, f, cfg.truncation_R, cfg.tolerances.tail_eps);
      const HermitianFormContext ctx(f.omega);

      double formula_dev = 0.0;
      for (const auto& [k, c] : theta.coeffs()) {
        const auto h = lattice_point(emb, k);
        const cplx ref = theta_coefficient_formula(ctx, h, cfg.tolerances.tail_eps);
        formula_dev = std::max(formula_dev, std::abs(c - ref) / coefficient_envelope(ctx, h));
      }
      if (formula_dev >= cfg.tolerances.inner_rel) {
        outcome.failures.push_back({"coefficient_formula", "closed-form coefficients disagree with b~ exp(-pi/2 H)"});
      }
      const auto fit = decay_fit(theta);
      if (wants(cfg, stage, "theta")) {
        outcome.reports["theta"] = {
            {"schema_version", kSchemaVersion},
            {"omega", to_json(f.omega)},
            {"truncation_R", cfg.truncation_R},
            {"normalization", theta_normalization(f.omega)},
            {"tail_bound", truncation_tail_bound(emb, f.omega, cfg.truncation_R)},
            {"decay_fit", {{"slope", fit.slope}, {"intercept", fit.intercept}, {"points", fit.points}}},
            {"formula_max_relative_deviation", formula_dev},
            {"coefficients", to_json(theta)}};
      }
      if (stage == Stage::Verify || stage == Stage::All) {
        auto rep = verify_stage(cfg, f, theta, outcome);
        if (wants(cfg, stage, "verification")) outcome.reports["verification"] = std::move(rep);
      }
    }
  }
  outcome.exit_code = outcome.failures.empty() ? 0 : 2;
  return outcome;
}

void write_reports(const RunOutcome& outcome, Stage stage, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::string& name, const Json& j) {
    std::ofstream out(dir / (name + ".json"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + (dir / (name + ".json")).string());
    out << dump_json(j);
  };
  for (const auto& [name, rep] : outcome.reports) emit(name, rep);
  Json reports = Json::array();
  for (const auto& [name, _] : outcome.reports) reports.push_back(name + ".json");
  emit("summary", {{"schema_version", kSchemaVersion},
                   {"stage", std::string(to_string(stage))},
                   {"exit_code", outcome.exit_code},
                   {"status", outcome.exit_code == 0 ? "pass" : "fail"},
                   {"failures", failure_json(outcome.failures)},
                   {"degenerate_translation", outcome.degenerate_translation},
                   {"reports", reports}});
}

}  // namespace nctheta
