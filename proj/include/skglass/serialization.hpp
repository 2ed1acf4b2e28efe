#pragma once

// skglass: JSON serialization of specs / results and fixed-schema CSV output.
// Floating point is printed with 17 significant digits so CSV bodies
// round-trip losslessly and reproduce byte-identically across runs.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skglass/environment.hpp"
#include "skglass/estimators.hpp"
#include "skglass/exact_engine.hpp"
#include "skglass/spin_model.hpp"
#include "skglass/universality.hpp"

namespace skglass {

inline constexpr int kCsvSchemaVersion = 1;

inline std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// --- environments -----------------------------------------------------------

inline void to_json(nlohmann::json& j, const EnvironmentSpec& env) {
  j = nlohmann::json{{"family", env.name()}, {"params", nlohmann::json::object()}};
  if (env.family() == EnvFamily::discrete_custom) {
    auto atoms = nlohmann::json::array();
    for (const auto& a : env.atoms())
      atoms.push_back({{"value", a.value}, {"prob", a.prob}});
    j["params"]["atoms"] = std::move(atoms);
  }
}

inline EnvironmentSpec environment_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "discrete_custom") {
    std::vector<DiscreteAtom> atoms;
    for (const auto& a : j.at("params").at("atoms"))
      atoms.push_back({a.at("value").get<double>(), a.at("prob").get<double>()});
    return EnvironmentSpec::discrete_custom(std::move(atoms));
  }
  return EnvironmentSpec::from_name(family);
}

// Accepts either a catalog family name or an inline JSON spec.
inline EnvironmentSpec parse_environment(const std::string& text) {
  if (!text.empty() && text.front() == '{')
    return environment_from_json(nlohmann::json::parse(text));
  return EnvironmentSpec::from_name(text);
}

inline void to_json(nlohmann::json& j, const MomentReport& m) {
  j = {{"mean", m.mean},           {"variance", m.variance},
       {"abs_third", m.abs_third}, {"third", m.third},
       {"fourth", m.fourth},       {"symmetric_class", m.symmetric_class}};
}

// --- model / engine ----------------------------------------------------------

inline void to_json(nlohmann::json& j, const ModelParams& p) {
  j = {{"n", p.n}, {"p", p.p}, {"beta", p.beta}, {"h", p.h}};
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
  j.at("n").get_to(p.n);
  j.at("p").get_to(p.p);
  j.at("beta").get_to(p.beta);
  j.at("h").get_to(p.h);
}

inline void to_json(nlohmann::json& j, const CouplingTensor& t) {
  j = {{"n", t.n}, {"p", t.p}, {"values", t.values}, {"env", t.env_id},
       {"seed", t.seed}};
}

inline void from_json(const nlohmann::json& j, CouplingTensor& t) {
  j.at("n").get_to(t.n);
  j.at("p").get_to(t.p);
  j.at("values").get_to(t.values);
  j.at("env").get_to(t.env_id);
  j.at("seed").get_to(t.seed);
  if (t.entry_count() != tensor_entry_count(t.n, t.p))
    throw validation_error("coupling tensor JSON: values length != n^p");
}

inline void to_json(nlohmann::json& j, const LogPartitionResult& r) {
  j = {{"log_z", r.log_z}, {"n", r.n}, {"beta", r.beta}, {"h", r.h},
       {"enumerated_count", r.enumerated_count}};
}

// --- estimates ---------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ReplicaValue& v) {
  j = {{"index", v.index}, {"seed", v.seed}, {"value", v.value}};
}

inline void to_json(nlohmann::json& j, const FreeEnergyEstimate& e) {
  j = {{"alpha_hat", e.alpha_hat}, {"stderr", e.stderr_value},
       {"replicas", e.replicas},   {"env", e.env_id},
       {"params", e.params},       {"master_seed", e.master_seed}};
  if (!e.per_replica.empty()) j["per_replica"] = e.per_replica;
}

inline void to_json(nlohmann::json& j, const FluctuationEstimate& e) {
  j = {{"third_abs_central", e.third_abs_central},
       {"stderr", e.stderr_value},
       {"d", e.d},
       {"beta_scaled", e.beta_scaled},
       {"replicas", e.replicas},
       {"env", e.env_id},
       {"params", e.params},
       {"master_seed", e.master_seed}};
}

inline void to_json(nlohmann::json& j, const GroundStateDensityEstimate& e) {
  j = {{"density_hat", e.density_hat}, {"stderr", e.stderr_value},
       {"replicas", e.replicas},       {"n", e.n},
       {"env", e.env_id},              {"master_seed", e.master_seed}};
  if (!e.per_replica.empty()) j["per_replica"] = e.per_replica;
}

inline void to_json(nlohmann::json& j, const ScanSample& s) {
  j = {{"s", s.s},
       {"alpha", s.alpha},
       {"alpha_stderr", s.alpha_stderr},
       {"interior", s.interior}};
  if (s.interior) {
    j["deriv_fd"] = s.deriv_fd;
    j["deriv_stderr"] = s.deriv_stderr;
  }
}

inline void to_json(nlohmann::json& j, const InterpolationScan& scan) {
  j = {{"t0", scan.t0},
       {"d", scan.d},
       {"replicas", scan.replicas},
       {"n", scan.model.n},
       {"p", scan.model.p},
       {"h", scan.model.h},
       {"env", scan.env_id},
       {"master_seed", scan.master_seed},
       {"samples", scan.samples}};
}

inline void to_json(nlohmann::json& j, const IbpReport& r) {
  j = {{"function", r.function_id},
       {"env", r.env_id},
       {"defect", r.defect},
       {"bound3", r.bound3},
       {"method", r.method == IbpMethod::exact_discrete_sum
                      ? "exact_discrete_sum"
                      : "quadrature"}};
  if (r.bound4) j["bound4"] = *r.bound4;
}

inline void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = {{"env_a", r.env_a},
       {"env_b", r.env_b},
       {"quantity", r.quantity == CompareQuantity::free_energy
                        ? "free_energy"
                        : "ground_state_density"},
       {"gap_hat", r.gap_hat},
       {"combined_stderr", r.combined_stderr},
       {"theoretical_bound", r.theoretical_bound},
       {"bound_kind", r.bound_kind},
       {"constant_used", r.constant_used},
       {"verdict", to_string(r.verdict)},
       {"params", r.params},
       {"replicas", r.replicas},
       {"master_seed", r.master_seed},
       {"mean_a", r.mean_a},
       {"stderr_a", r.stderr_a},
       {"mean_b", r.mean_b},
       {"stderr_b", r.stderr_b}};
}

inline void to_json(nlohmann::json& j, const ExtrapolationResult& r) {
  j = {{"limit_hat", r.limit_hat},
       {"fit_residual", r.fit_residual},
       {"slope", r.slope},
       {"limit_stderr", r.limit_stderr}};
}

// --- CSV ---------------------------------------------------------------------

// Fixed-schema CSV: a "# schema_version=1" line, a header row, then rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  class Row {
   public:
    explicit Row(CsvTable* table) : table_(table) {}
    Row& add(const std::string& s) {
      fields_.push_back(s);
      return *this;
    }
    Row& add(const char* s) { return add(std::string(s)); }
    Row& add(double x) { return add(format_float(x)); }
    Row& add(int x) { return add(std::to_string(x)); }
    Row& add(std::int64_t x) { return add(std::to_string(x)); }
    Row& add(std::uint64_t x) { return add(std::to_string(x)); }
    ~Row() { table_->rows_.push_back(std::move(fields_)); }

   private:
    CsvTable* table_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(this); }

  std::string to_string() const {
    std::string out =
        "# schema_version=" + std::to_string(kCsvSchemaVersion) + "\n";
    out += join(columns_);
    for (const auto& row : rows_) out += join(row);
    return out;
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) line += ',';
      line += fields[i];
    }
    line += '\n';
    return line;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Per-replica export, columns replica_index,seed,value.
inline CsvTable per_replica_csv(const std::vector<ReplicaValue>& values) {
  CsvTable table({"replica_index", "seed", "value"});
  for (const auto& v : values)
    table.row().add(v.index).add(v.seed).add(v.value);
  return table;
}

// Debug export: every configuration's unnormalized energy.
inline void write_energies_csv(const CouplingTensor& tensor,
                               std::ostream& os) {
  os << "# schema_version=" << kCsvSchemaVersion << "\n";
  os << "bits,magnetization,energy\n";
  const std::uint64_t total = std::uint64_t{1} << tensor.n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    const SpinConfiguration sigma{tensor.n, bits};
    os << bits << ',' << sigma.magnetization() << ','
       << format_float(energy(tensor, sigma)) << '\n';
  }
}

}  // namespace skglass
