#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dynkin {

using NodeId = std::int32_t;

// Structural problem with a scenario tree or a value attached to it.
class TreeError : public std::runtime_error {
 public:
  explicit TreeError(const std::string& what,
                     std::optional<NodeId> node = std::nullopt)
      : std::runtime_error(what), node_(node) {}

  std::optional<NodeId> node() const { return node_; }

 private:
  std::optional<NodeId> node_;
};

// Two objects that must live on the same tree (or have the same length) do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration of stopping times refused because the count exceeds the cap.
class EnumerationCapError : public std::runtime_error {
 public:
  EnumerationCapError(std::uint64_t count, std::uint64_t cap, bool saturated)
      : std::runtime_error(
            "stopping-time enumeration refused: tree has " +
            std::string(saturated ? "at least " : "") + std::to_string(count) +
            " stopping times, cap is " + std::to_string(cap)),
        count_(count),
        cap_(cap) {}

  std::uint64_t count() const { return count_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t count_;
  std::uint64_t cap_;
};

// Malformed input document. `line` is 1-based when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::optional<int> line = std::nullopt,
             std::string field = {})
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  std::optional<int> line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::optional<int> line_;
  std::string field_;
};

}  // namespace dynkin
