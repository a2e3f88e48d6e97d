#include "fiaplab/spec_io.hpp"

#include <fstream>
#include <stdexcept>

namespace fiaplab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::invalid_argument(context + ": " + what);
}

const json& require(const json& j, const char* field, const std::string& context) {
  auto it = j.find(field);
  if (it == j.end()) fail(context, std::string("missing field '") + field + "'");
  return *it;
}

std::vector<std::int64_t> int_vector(const json& j, const std::string& context) {
  if (!j.is_array()) fail(context, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) fail(context, "expected an array of integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

}  // namespace

json state_fn_to_json(const StateFn& fn) {
  switch (fn.kind()) {
    case StateFn::Kind::zero:
      return "zero";
    case StateFn::Kind::identity:
      return "identity";
    case StateFn::Kind::decrement:
      return "decrement";
    case StateFn::Kind::half:
      return "half";
    case StateFn::Kind::increment:
      return "increment";
    case StateFn::Kind::constant:
      return json{{"constant", fn.constant_value()}};
    case StateFn::Kind::table:
      return json{{"table", fn.table_values()}};
  }
  return "zero";
}

StateFn state_fn_from_json(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "zero") return StateFn::zero();
    if (name == "identity") return StateFn::identity();
    if (name == "decrement") return StateFn::decrement();
    if (name == "half") return StateFn::half();
    if (name == "increment") return StateFn::increment();
    fail("state function", "unknown builtin '" + name + "'");
  }
  if (j.is_object()) {
    if (j.contains("constant")) return StateFn::constant(j["constant"].get<std::int64_t>());
    if (j.contains("table")) {
      return StateFn::table(int_vector(j["table"], "state function table"));
    }
  }
  fail("state function", "expected a builtin name, {\"constant\": v} or {\"table\": [...]}");
}

json fiap_spec_to_json(const FiapSpec& spec) {
  json j;
  j["K"] = spec.node_count;
  json sigma = json::array();
  for (const auto& s : spec.sigma) sigma.push_back(s.values());
  j["sigma"] = sigma;
  json g1 = json::array(), g2 = json::array();
  for (const auto& f : spec.frag_on) g1.push_back(state_fn_to_json(f));
  for (const auto& f : spec.frag_off) g2.push_back(state_fn_to_json(f));
  j["g1"] = g1;
  j["g2"] = g2;
  json h = json::array();
  for (const auto& row : spec.interaction) {
    json r = json::array();
    for (const auto& fn : row) r.push_back(state_fn_to_json(fn));
    h.push_back(r);
  }
  j["h"] = h;
  j["H_max"] = spec.interaction_bound;
  return j;
}

namespace {

std::vector<SigmaTable> sigma_from_json(const json& j, int k) {
  const std::string ctx = "spec field 'sigma'";
  if (!j.is_array() || j.empty()) fail(ctx, "expected a table or a per-node list of tables");
  std::vector<SigmaTable> out;
  if (j[0].is_number()) {
    out.assign(k, SigmaTable(j.get<std::vector<double>>()));
  } else {
    if (j.size() != static_cast<std::size_t>(k)) fail(ctx, "need one table per node");
    for (const auto& t : j) out.emplace_back(t.get<std::vector<double>>());
  }
  return out;
}

std::vector<StateFn> fns_from_json(const json& j, int k, const std::string& ctx) {
  std::vector<StateFn> out;
  if (j.is_array()) {
    if (j.size() != static_cast<std::size_t>(k)) fail(ctx, "need one entry per node");
    for (const auto& f : j) out.push_back(state_fn_from_json(f));
  } else {
    out.assign(k, state_fn_from_json(j));
  }
  return out;
}

}  // namespace

FiapSpec fiap_spec_from_json(const json& j) {
  const std::string ctx = "spec";
  FiapSpec spec;
  spec.node_count = require(j, "K", ctx).get<int>();
  const int k = spec.node_count;
  if (k < 2) fail(ctx, "K must be at least 2");
  spec.sigma = sigma_from_json(require(j, "sigma", ctx), k);
  spec.frag_on = fns_from_json(require(j, "g1", ctx), k, "spec field 'g1'");
  spec.frag_off = fns_from_json(require(j, "g2", ctx), k, "spec field 'g2'");

  const auto& h = require(j, "h", ctx);
  if (h.is_array()) {
    if (h.size() != static_cast<std::size_t>(k)) fail(ctx, "h matrix must be K x K");
    spec.interaction.resize(k);
    for (int i = 0; i < k; ++i) {
      if (h[i].size() != static_cast<std::size_t>(k)) fail(ctx, "h matrix must be K x K");
      for (const auto& fn : h[i]) spec.interaction[i].push_back(state_fn_from_json(fn));
      spec.interaction[i][i] = StateFn::zero();
    }
  } else {
    const auto fn = state_fn_from_json(h);
    spec.interaction.assign(k, std::vector<StateFn>(k, StateFn::zero()));
    for (int i = 0; i < k; ++i) {
      for (int jj = 0; jj < k; ++jj) {
        if (i != jj) spec.interaction[i][jj] = fn;
      }
    }
  }

  if (j.contains("H_max")) {
    spec.interaction_bound = j["H_max"].get<std::int64_t>();
  } else {
    std::int64_t bound = 0;
    for (int i = 0; i < k; ++i) {
      for (int jj = 0; jj < k; ++jj) {
        if (i == jj) continue;
        const auto b = spec.interaction[i][jj].bound();
        if (!b.has_value()) fail(ctx, "H_max required when h is not a bounded builtin");
        bound = std::max(bound, *b);
      }
    }
    spec.interaction_bound = bound;
  }

  validate_spec(spec);
  return spec;
}

FiapSpec load_fiap_spec(const std::string& path) {
  return fiap_spec_from_json(load_json_file(path));
}

json pmf_to_json(const Pmf& pmf) {
  json j;
  j["pmf"] = pmf.probabilities();
  j["tail"] = pmf.tail();
  return j;
}

Pmf pmf_from_json(const json& j) {
  const std::string ctx = "law";
  if (j.is_array()) return Pmf(j.get<std::vector<double>>());
  if (!j.is_object()) fail(ctx, "expected an object or a probability array");
  if (j.contains("uniform")) {
    const auto range = int_vector(j["uniform"], ctx);
    if (range.size() != 2) fail(ctx, "uniform needs [lo, hi]");
    return Pmf::uniform_range(range[0], range[1]);
  }
  if (j.contains("delta")) return Pmf::delta(j["delta"].get<std::int64_t>());
  if (j.contains("geometric")) return Pmf::geometric(j["geometric"].get<double>());
  if (j.contains("pmf")) {
    return Pmf(j["pmf"].get<std::vector<double>>(), j.value("tail", 0.0));
  }
  fail(ctx, "expected uniform/delta/geometric/pmf");
}

json compound_law_to_json(const CompoundPoissonLaw& law) {
  json j;
  j["rate"] = law.rate;
  j["jumps"] = pmf_to_json(law.jumps);
  return j;
}

CompoundPoissonLaw compound_law_from_json(const json& j) {
  return CompoundPoissonLaw::make(require(j, "rate", "compound law").get<double>(),
                                  pmf_from_json(require(j, "jumps", "compound law")));
}

ExogenousIO exogenous_io_from_json(const json& j, int node_count) {
  const std::string ctx = "exogenous section";
  ExogenousIO io;
  const auto& inputs = require(j, "inputs", ctx);
  auto parse_input = [&ctx](const json& law) {
    ExogenousIO::InputLaw input;
    if (law.is_object() && law.contains("poisson")) {
      input.poisson = true;
      input.rate = law["poisson"].get<double>();
      if (!(input.rate >= 0.0)) fail(ctx, "poisson rate must be >= 0");
    } else {
      input.pmf = pmf_from_json(law);
    }
    return input;
  };
  if (inputs.is_array() && !inputs.empty() &&
      !(inputs[0].is_number())) {  // per-node list of laws
    if (inputs.size() != static_cast<std::size_t>(node_count)) {
      fail(ctx, "need one input law per node");
    }
    for (const auto& law : inputs) io.inputs.push_back(parse_input(law));
  } else {
    io.inputs.assign(node_count, parse_input(inputs));
  }
  const auto& outputs = require(j, "outputs", ctx);
  io.output = fns_from_json(outputs, node_count, ctx + " outputs");
  return io;
}

ExtendedSpec extended_spec_from_json(const json& j) {
  ExtendedSpec extended;
  extended.base = fiap_spec_from_json(j);
  if (j.contains("partition")) {
    extended.partition = j["partition"].get<std::vector<std::vector<int>>>();
    PartitionSpec pspec;
    pspec.base = extended.base;
    pspec.sets = *extended.partition;
    pspec.validate();
  }
  if (j.contains("exogenous")) {
    extended.exogenous = exogenous_io_from_json(j["exogenous"], extended.base.node_count);
  }
  return extended;
}

std::vector<Pmf> initial_laws_from_json(const json& j, int node_count) {
  std::vector<Pmf> laws;
  if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    if (j.size() != static_cast<std::size_t>(node_count)) {
      fail("initial laws", "need one law per node");
    }
    for (const auto& law : j) laws.push_back(pmf_from_json(law));
  } else {
    laws.assign(node_count, pmf_from_json(j));
  }
  return laws;
}

namespace {

json record_spec_to_json(const RecordSpec& rec) {
  json j;
  json pairs = json::array();
  for (const auto& p : rec.pairs) pairs.push_back(json::array({p.replica, p.node}));
  j["pairs"] = pairs;
  j["columns"] = rec.node_columns;
  json kinds = json::array();
  for (auto k : rec.kinds) kinds.push_back(observable_kind_name(k));
  j["kinds"] = kinds;
  j["step_zero"] = rec.record_step_zero;
  j["steps"] = rec.steps;
  return j;
}

}  // namespace

RecordSpec record_spec_from_json(const json& j) {
  RecordSpec rec;
  if (j.contains("pairs")) {
    for (const auto& p : j["pairs"]) {
      if (!p.is_array() || p.size() != 2) fail("record.pairs", "expected [replica, node]");
      rec.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
    }
  }
  if (j.contains("columns")) rec.node_columns = j["columns"].get<std::vector<int>>();
  if (j.contains("kinds")) {
    rec.kinds.clear();
    for (const auto& k : j["kinds"]) {
      rec.kinds.push_back(observable_kind_from_name(k.get<std::string>()));
    }
  }
  rec.record_step_zero = j.value("step_zero", false);
  if (j.contains("steps")) rec.steps = j["steps"].get<std::vector<int>>();
  return rec;
}

RunConfig run_config_from_json(const json& j) {
  const std::string ctx = "run config";
  RunConfig config;
  config.spec = fiap_spec_from_json(require(j, "spec", ctx));
  config.replica_count = require(j, "M", ctx).get<int>();
  config.horizon = j.value("horizon", 1);
  config.runs = j.value("R", 1);
  if (j.contains("deterministic_init")) {
    config.deterministic_init = int_vector(j["deterministic_init"], ctx);
  } else {
    config.initial =
        initial_laws_from_json(require(j, "initial", ctx), config.spec.node_count);
  }
  config.constant_replica_init = j.value("constant_replica_init", false);
  config.master_seed = require(j, "seed", ctx).get<std::uint64_t>();
  if (j.contains("record")) config.record = record_spec_from_json(j["record"]);
  config.workers = j.value("workers", 1);
  return config;
}

json run_config_to_json(const RunConfig& config) {
  json j;
  j["spec"] = fiap_spec_to_json(config.spec);
  j["M"] = config.replica_count;
  j["horizon"] = config.horizon;
  j["R"] = config.runs;
  if (config.deterministic_init.has_value()) {
    j["deterministic_init"] = *config.deterministic_init;
  } else {
    json laws = json::array();
    for (const auto& pmf : config.initial) laws.push_back(pmf_to_json(pmf));
    j["initial"] = laws;
  }
  j["constant_replica_init"] = config.constant_replica_init;
  j["seed"] = config.master_seed;
  j["record"] = record_spec_to_json(config.record);
  j["workers"] = config.workers;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
}

}  // namespace fiaplab
