#include "sicgram/json_io.hpp"

#include <stdexcept>

namespace sicgram {

namespace {

template <class Map>
Json census(const Map& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

Json encode(const RecordResiduals& r) {
  return {{"s", r.s}, {"f_error", r.f_error}, {"g_error", r.g_error}, {"grad_norm", r.grad_norm}};
}

Json encode(const ExtendedResiduals& r) {
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  return {{"log10_f_error", num(r.f_error)}, {"log10_g_error", num(r.g_error)},
          {"log10_grad_f", num(r.grad_f)}, {"log10_grad_g", num(r.grad_g)}};
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json encode(const PhaseVector& phases) { return {{"n", phases.n()}, {"phases", phases.vector()}}; }

PhaseVector decode_phase_vector(const Json& j) {
  return guarded("phase vector", [&] {
    return PhaseVector(j.at("n").get<int>(), j.at("phases").get<std::vector<double>>());
  });
}

Json encode(const Fiducial& fiducial) {
  std::vector<double> re, im;
  for (const Complex& z : fiducial.amplitudes()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"n", fiducial.n()}, {"re", re}, {"im", im}};
}

Fiducial decode_fiducial(const Json& j) {
  return guarded("fiducial", [&] {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    const int n = j.at("n").get<int>();
    if (re.size() != im.size() || static_cast<int>(re.size()) != n) {
      throw std::invalid_argument("fiducial component lengths differ from n");
    }
    ComplexVector v(n);
    for (int k = 0; k < n; ++k) v[k] = Complex(re[k], im[k]);
    return Fiducial(std::move(v));
  });
}

Json encode(const SolutionRecord& record) {
  Json j{{"schema_version", record.schema_version},
         {"kind", "solution"},
         {"n", record.n},
         {"phases", record.phases},
         {"residuals", encode(record.residuals)},
         {"island_hash", record.island_hash},
         {"gen_set_size", record.gen_set_size},
         {"matched_reference", record.matched_reference ? Json(*record.matched_reference) : Json(nullptr)},
         {"reference_label", record.reference_label},
         {"aut_summary", nullptr},
         {"provenance",
          {{"seed", record.provenance.seed},
           {"trial", record.provenance.trial},
           {"timestamp", record.provenance.timestamp},
           {"tool_version", record.provenance.tool_version}}},
         {"collision", record.collision}};
  if (record.aut_group_order || record.aut_h_order) {
    Json aut = Json::object();
    if (record.aut_group_order) aut["group_order"] = *record.aut_group_order;
    if (record.aut_h_order) aut["H_order"] = *record.aut_h_order;
    j["aut_summary"] = aut;
  }
  if (!record.refined_phases.empty()) j["refined_phases"] = record.refined_phases;
  return j;
}

SolutionRecord decode_solution_record(const Json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw std::invalid_argument("record without schema_version");
  if (j["schema_version"] != kSchemaVersion) {
    throw std::runtime_error("unsupported schema_version " + j["schema_version"].dump());
  }
  return guarded("solution record", [&] {
    SolutionRecord r;
    r.n = j.at("n").get<int>();
    r.phases = j.at("phases").get<std::vector<double>>();
    require_dimension(r.n);
    if (r.phases.size() != phase_count(r.n)) throw std::invalid_argument("phase count does not match n");
    const Json& res = j.at("residuals");
    r.residuals = {res.at("s").get<double>(), res.at("f_error").get<double>(), res.at("g_error").get<double>(),
                   res.at("grad_norm").get<double>()};
    r.island_hash = j.at("island_hash").get<std::string>();
    r.gen_set_size = j.at("gen_set_size").get<std::size_t>();
    if (j.contains("matched_reference") && !j["matched_reference"].is_null()) {
      r.matched_reference = j["matched_reference"].get<std::vector<std::uint32_t>>();
    }
    r.reference_label = j.value("reference_label", "");
    if (j.contains("aut_summary") && j["aut_summary"].is_object()) {
      const Json& aut = j["aut_summary"];
      if (aut.contains("group_order")) r.aut_group_order = aut["group_order"].get<std::size_t>();
      if (aut.contains("H_order")) r.aut_h_order = aut["H_order"].get<std::size_t>();
    }
    const Json& prov = j.at("provenance");
    r.provenance = {prov.at("seed").get<std::uint64_t>(), prov.at("trial").get<std::uint64_t>(),
                    prov.value("timestamp", ""), prov.value("tool_version", "")};
    r.collision = j.value("collision", false);
    if (j.contains("refined_phases")) r.refined_phases = j["refined_phases"].get<std::vector<std::string>>();
    return r;
  });
}

Json encode(const BatchSummary& s) {
  return {{"trials", s.trials},
          {"converged", s.converged},
          {"local_minima", s.local_minima},
          {"budget_exhausted", s.budget_exhausted},
          {"stored", s.stored},
          {"duplicates", s.duplicates},
          {"collisions", s.collisions},
          {"store_errors", s.store_errors},
          {"matched_to_reference", s.matched_to_reference},
          {"distinct_islands", s.distinct_islands}};
}

BatchSummary decode_batch_summary(const Json& j) {
  return guarded("batch summary", [&] {
    BatchSummary s;
    s.trials = j.at("trials").get<std::uint64_t>();
    s.converged = j.at("converged").get<std::uint64_t>();
    s.local_minima = j.at("local_minima").get<std::uint64_t>();
    s.budget_exhausted = j.at("budget_exhausted").get<std::uint64_t>();
    s.stored = j.value("stored", std::uint64_t{0});
    s.duplicates = j.value("duplicates", std::uint64_t{0});
    s.collisions = j.value("collisions", std::uint64_t{0});
    s.store_errors = j.value("store_errors", std::uint64_t{0});
    s.matched_to_reference = j.value("matched_to_reference", std::uint64_t{0});
    s.distinct_islands = j.value("distinct_islands", std::uint64_t{0});
    return s;
  });
}

Json encode(const GeneratingSet& set) {
  return {{"size", set.size()},
          {"phases", set.phases},
          {"multiplicities", set.multiplicities},
          {"cluster_radius", set.cluster_radius},
          {"ambiguous", set.ambiguous}};
}

Json encode(const AutomorphismSummary& s) {
  return {{"group_order", s.group_order},
          {"H_order", s.h_order},
          {"element_order_census", census(s.element_orders)},
          {"fixed_point_census", census(s.fixed_point_census)},
          {"anchored_generators", s.anchored_generators},
          {"complete", s.complete}};
}

Json encode(const ClassificationReport& r) {
  Json j{{"island_hash", r.island_hash},
         {"gen_set", encode(r.gen_set)},
         {"frequencies", r.frequencies},
         {"matched_reference", r.matched_reference},
         {"reference_label", r.reference_label},
         {"match_status", to_string(r.match_status)},
         {"permutation", r.permutation ? Json(r.permutation->one_based()) : Json(nullptr)},
         {"aut_group_order", nullptr},
         {"H_order", nullptr},
         {"element_order_census", nullptr}};
  if (r.automorphisms) {
    j["aut_group_order"] = r.automorphisms->group_order;
    j["H_order"] = r.automorphisms->h_order;
    j["element_order_census"] = census(r.automorphisms->element_orders);
    j["automorphisms"] = encode(*r.automorphisms);
  }
  return j;
}

Json encode(const NullSpaceReport& r) {
  return {{"n", r.n},
          {"dim_f", r.dim_f},
          {"dim_g", r.dim_g},
          {"dim_intersection", r.dim_intersection},
          {"threshold", r.threshold},
          {"indeterminate", r.indeterminate}};
}

Json encode(const VectorSystem& system) {
  Json cols = Json::array();
  for (Eigen::Index k = 0; k < system.v().cols(); ++k) {
    const Eigen::VectorXcd v = system.vector(k);
    std::vector<double> re, im;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      re.push_back(v[i].real());
      im.push_back(v[i].imag());
    }
    cols.push_back({{"re", re}, {"im", im}});
  }
  return {{"n", system.n()}, {"columns", cols}};
}

Json encode(const RefineResult& r) {
  return {{"status", to_string(r.status)}, {"n", r.n},       {"target_digits", r.target_digits},
          {"phases", r.phases},            {"rounded", r.rounded}, {"residuals", encode(r.residuals)},
          {"steps", r.steps}};
}

Json encode(const VerifyReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back({{"record", f.record}, {"n", f.n}, {"reason", f.reason}});
  Json unreadable = Json::array();
  for (const auto& u : r.unreadable) unreadable.push_back({{"line", u.line}, {"message", u.message}});
  return {{"checked", r.checked}, {"ok", r.ok()}, {"failures", failures}, {"unreadable", unreadable}};
}

Json encode(const AtlasReport& r) {
  return {{"n", r.n},
          {"solutions", r.solutions},
          {"distinct_islands", r.distinct_islands},
          {"matched", r.matched},
          {"matched_fraction", r.matched_fraction},
          {"gen_set_census", census(r.gen_set_census)},
          {"aut_group_order_census", census(r.aut_group_order_census)},
          {"H_order_census", census(r.h_order_census)},
          {"trials", r.trials},
          {"local_minima", r.local_minima},
          {"local_minimum_rate", r.local_minimum_rate}};
}

}  // namespace sicgram
