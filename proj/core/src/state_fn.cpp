#include "fiaplab/state_fn.hpp"

#include <algorithm>
#include <stdexcept>

namespace fiaplab {

StateFn StateFn::constant(std::int64_t value) {
  if (value < 0) throw std::invalid_argument("StateFn: constant value must be >= 0");
  return StateFn(Kind::constant, value);
}

StateFn StateFn::table(std::vector<std::int64_t> values) {
  if (values.empty()) throw std::invalid_argument("StateFn: table must not be empty");
  for (auto v : values) {
    if (v < 0) throw std::invalid_argument("StateFn: table entries must be >= 0");
  }
  StateFn fn(Kind::table);
  fn.table_ = std::move(values);
  return fn;
}

std::int64_t StateFn::operator()(std::int64_t state) const {
  switch (kind_) {
    case Kind::zero:
      return 0;
    case Kind::identity:
      return state;
    case Kind::decrement:
      return state > 0 ? state - 1 : 0;
    case Kind::half:
      return state / 2;
    case Kind::increment:
      return state + 1;
    case Kind::constant:
      return value_;
    case Kind::table: {
      const auto idx = static_cast<std::size_t>(
          std::min<std::int64_t>(state, static_cast<std::int64_t>(table_.size()) - 1));
      return table_[idx];
    }
  }
  return 0;
}

std::optional<std::int64_t> StateFn::bound() const {
  switch (kind_) {
    case Kind::zero:
      return 0;
    case Kind::constant:
      return value_;
    case Kind::table:
      return *std::max_element(table_.begin(), table_.end());
    default:
      return std::nullopt;
  }
}

std::string StateFn::describe() const {
  switch (kind_) {
    case Kind::zero:
      return "zero";
    case Kind::identity:
      return "identity";
    case Kind::decrement:
      return "decrement";
    case Kind::half:
      return "half";
    case Kind::increment:
      return "increment";
    case Kind::constant:
      return "constant(" + std::to_string(value_) + ")";
    case Kind::table:
      return "table[" + std::to_string(table_.size()) + "]";
  }
  return "?";
}

SigmaTable::SigmaTable(std::vector<double> values) : values_(std::move(values)) {}

SigmaTable SigmaTable::flat(double p) { return SigmaTable({0.0, p}); }

double SigmaTable::operator()(std::int64_t state) const {
  if (state < 0) throw std::invalid_argument("SigmaTable: negative state");
  const auto idx = static_cast<std::size_t>(
      std::min<std::int64_t>(state, static_cast<std::int64_t>(values_.size()) - 1));
  return values_[idx];
}

void SigmaTable::validate() const {
  if (values_.size() < 2) {
    throw std::invalid_argument("sigma: table needs entries for states 0 and 1");
  }
  if (values_[0] != 0.0) {
    throw std::invalid_argument("sigma: state 0 must not activate (sigma(0) != 0)");
  }
  if (!(values_[1] > 0.0)) {
    throw std::invalid_argument("sigma: sigma(1) must be positive");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] < 0.0 || values_[k] > 1.0) {
      throw std::invalid_argument("sigma: entries must lie in [0, 1]");
    }
    if (k > 0 && values_[k] < values_[k - 1]) {
      throw std::invalid_argument("sigma: table must be non-decreasing");
    }
  }
}

}  // namespace fiaplab
