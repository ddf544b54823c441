#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace levy_spde {

/// Largest cell count accepted for a single grid.
inline constexpr std::uint64_t kMaxGridCells = 1ULL << 31;

/**
 * @brief Axis-aligned box in R^d split into a tensor grid of equal cells.
 *
 * For space-time problems axis 0 is time. Cells are addressed in row-major
 * order with the last axis varying fastest.
 */
struct GridSpec final {
  std::vector<double> origin;
  std::vector<double> extent;
  std::vector<std::int64_t> cells;

  std::size_t dim() const noexcept { return origin.size(); }

  /// Throws ParameterError on malformed specs, ResourceError above kMaxGridCells.
  void validate() const;

  double cell_width(std::size_t axis) const { return extent[axis] / static_cast<double>(cells[axis]); }
  double cell_volume() const;
  double box_volume() const;
  std::size_t total_cells() const;

  std::vector<std::int64_t> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::int64_t> index) const;

  void midpoint(std::size_t flat, std::span<double> out) const;
  std::vector<double> midpoint(std::size_t flat) const;

  bool contains(std::span<const double> point) const;

  /// Same box with every axis split `factor` times finer.
  GridSpec refined(std::int64_t factor) const;

  bool operator==(const GridSpec&) const = default;
};

/// Convenience constructor for a d-dimensional grid.
GridSpec make_grid(std::vector<double> origin, std::vector<double> extent,
                   std::vector<std::int64_t> cells);

}  // namespace levy_spde
