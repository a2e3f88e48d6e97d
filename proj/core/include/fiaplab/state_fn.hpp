#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fiaplab {

// Map from a node state to an integer, used for the fragmentation maps
// g1/g2 and the interaction maps h. Either a closed-form builtin or a
// finite table whose last entry continues for states past the table end.
class StateFn {
 public:
  enum class Kind { zero, identity, decrement, half, increment, constant, table };

  StateFn() : kind_(Kind::zero) {}

  static StateFn zero() { return StateFn(Kind::zero); }
  static StateFn identity() { return StateFn(Kind::identity); }
  static StateFn decrement() { return StateFn(Kind::decrement); }
  static StateFn half() { return StateFn(Kind::half); }
  static StateFn increment() { return StateFn(Kind::increment); }
  static StateFn constant(std::int64_t value);
  static StateFn table(std::vector<std::int64_t> values);

  std::int64_t operator()(std::int64_t state) const;

  Kind kind() const { return kind_; }
  std::int64_t constant_value() const { return value_; }
  const std::vector<std::int64_t>& table_values() const { return table_; }

  // Largest value the map can take, or nullopt for unbounded builtins.
  std::optional<std::int64_t> bound() const;

  std::string describe() const;

  bool operator==(const StateFn&) const = default;

 private:
  explicit StateFn(Kind kind, std::int64_t value = 0) : kind_(kind), value_(value) {}

  Kind kind_;
  std::int64_t value_ = 0;
  std::vector<std::int64_t> table_;
};

// Activation probability table on {0,...,S}; states past the table end
// keep the last entry (constant tail continuation).
class SigmaTable {
 public:
  SigmaTable() = default;
  explicit SigmaTable(std::vector<double> values);

  // Constant probability p for every positive state, 0 at state zero.
  static SigmaTable flat(double p);

  double operator()(std::int64_t state) const;

  const std::vector<double>& values() const { return values_; }

  // Throws std::invalid_argument naming the first violated condition:
  // sigma(0) = 0, non-decreasing, sigma(1) > 0, range [0, 1].
  void validate() const;

  bool operator==(const SigmaTable&) const = default;

 private:
  std::vector<double> values_;
};

}  // namespace fiaplab
