#include "levy_spde/grid.hpp"

#include <cmath>
#include <string>

#include "levy_spde/errors.hpp"

namespace levy_spde {

void GridSpec::validate() const {
  const std::size_t d = origin.size();
  if (d == 0) throw ParameterError("grid dimension must be at least 1");
  if (extent.size() != d || cells.size() != d) {
    throw ParameterError("grid origin, extent and cells must have the same length");
  }
  long double total = 1.0L;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(origin[i])) throw ParameterError("grid origin must be finite");
    if (!(extent[i] > 0.0) || !std::isfinite(extent[i])) {
      throw ParameterError("grid extent must be positive and finite on axis " + std::to_string(i));
    }
    if (cells[i] <= 0) throw ParameterError("grid cell count must be positive on axis " + std::to_string(i));
    total *= static_cast<long double>(cells[i]);
  }
  if (total > static_cast<long double>(kMaxGridCells)) {
    throw ResourceError("grid has more than 2^31 cells");
  }
  if (!(cell_volume() > 0.0)) throw ParameterError("grid cell volume underflows to zero");
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= cell_width(i);
  return v;
}

double GridSpec::box_volume() const {
  double v = 1.0;
  for (double e : extent) v *= e;
  return v;
}

std::size_t GridSpec::total_cells() const {
  std::size_t n = 1;
  for (auto c : cells) n *= static_cast<std::size_t>(c);
  return n;
}

std::vector<std::int64_t> GridSpec::multi_index(std::size_t flat) const {
  std::vector<std::int64_t> idx(dim());
  for (std::size_t k = dim(); k-- > 0;) {
    const auto n = static_cast<std::size_t>(cells[k]);
    idx[k] = static_cast<std::int64_t>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridSpec::flat_index(std::span<const std::int64_t> index) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dim(); ++k) {
    flat = flat * static_cast<std::size_t>(cells[k]) + static_cast<std::size_t>(index[k]);
  }
  return flat;
}

void GridSpec::midpoint(std::size_t flat, std::span<double> out) const {
  for (std::size_t k = dim(); k-- > 0;) {
    const auto n = static_cast<std::size_t>(cells[k]);
    const std::size_t i = flat % n;
    flat /= n;
    out[k] = origin[k] + (static_cast<double>(i) + 0.5) * cell_width(k);
  }
}

std::vector<double> GridSpec::midpoint(std::size_t flat) const {
  std::vector<double> p(dim());
  midpoint(flat, p);
  return p;
}

bool GridSpec::contains(std::span<const double> point) const {
  if (point.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (point[k] < origin[k] || point[k] > origin[k] + extent[k]) return false;
  }
  return true;
}

GridSpec GridSpec::refined(std::int64_t factor) const {
  if (factor <= 0) throw ParameterError("refinement factor must be positive");
  GridSpec out = *this;
  for (auto& c : out.cells) c *= factor;
  out.validate();
  return out;
}

GridSpec make_grid(std::vector<double> origin, std::vector<double> extent,
                   std::vector<std::int64_t> cells) {
  GridSpec g{std::move(origin), std::move(extent), std::move(cells)};
  g.validate();
  return g;
}

}  // namespace levy_spde
