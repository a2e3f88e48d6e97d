#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fiaplab/analytics.hpp"
#include "fiaplab/extensions.hpp"
#include "fiaplab/fiap.hpp"
#include "fiaplab/montecarlo.hpp"
#include "fiaplab/pmf.hpp"

namespace fiaplab {

// JSON forms: "zero" | "identity" | "decrement" | "half" | "increment"
// | {"constant": v} | {"table": [...]}.
nlohmann::json state_fn_to_json(const StateFn& fn);
StateFn state_fn_from_json(const nlohmann::json& j);

// Spec file schema: {"K": n, "sigma": table-or-list, "g1": fn-or-list,
// "g2": fn-or-list, "h": fn-or-matrix, "H_max": bound}. Single entries are
// shared by every node; "h" as a single function applies off-diagonal.
// H_max may be omitted when every h is bounded (the max bound is used).
nlohmann::json fiap_spec_to_json(const FiapSpec& spec);
FiapSpec fiap_spec_from_json(const nlohmann::json& j);
FiapSpec load_fiap_spec(const std::string& path);

// Law forms: {"uniform": [lo, hi]} | {"delta": k} | {"geometric": p}
// | {"pmf": [...], "tail": t} | a bare probability array.
nlohmann::json pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const nlohmann::json& j);

// One shared law or a per-node list.
std::vector<Pmf> initial_laws_from_json(const nlohmann::json& j, int node_count);

// Compound-law files: {"rate": r, "jumps": law}.
nlohmann::json compound_law_to_json(const CompoundPoissonLaw& law);
CompoundPoissonLaw compound_law_from_json(const nlohmann::json& j);

// Optional spec file sections. A spec file may carry "partition" (a list
// of node sets) and "exogenous" ({"inputs": law-or-{"poisson": rate} per
// node, "outputs": state-fn per node}); absent sections mean the base
// model.
struct ExtendedSpec {
  FiapSpec base;
  std::optional<std::vector<std::vector<int>>> partition;
  std::optional<ExogenousIO> exogenous;
};

ExtendedSpec extended_spec_from_json(const nlohmann::json& j);
ExogenousIO exogenous_io_from_json(const nlohmann::json& j, int node_count);

RecordSpec record_spec_from_json(const nlohmann::json& j);

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& config);

nlohmann::json load_json_file(const std::string& path);

}  // namespace fiaplab
