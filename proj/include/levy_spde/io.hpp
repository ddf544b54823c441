#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "levy_spde/greens.hpp"
#include "levy_spde/grid.hpp"
#include "levy_spde/noise.hpp"
#include "levy_spde/norms.hpp"
#include "levy_spde/solutions.hpp"
#include "levy_spde/stats.hpp"

namespace levy_spde {

inline constexpr const char* kVersion = "0.3.0";

// Binary noise container, little-endian:
//   "LVYN" | u32 version | u32 dim | f64 origin[dim] | f64 extent[dim] |
//   u64 cells[dim] | f64 alpha | u64 seed | u64 count | f64 increments[count]
inline constexpr std::uint32_t kNoiseFormatVersion = 1;

void write_noise_binary(std::ostream& out, const NoiseRealization& noise);
/// Throws ParameterError on a bad magic, version or truncated payload.
NoiseRealization read_noise_binary(std::istream& in);

/// One row per cell: i0,...,i{d-1},increment.
void write_noise_csv(std::ostream& out, const NoiseRealization& noise);

/// Columns t,x1,...,value for space-time kernels and x1,...,value otherwise.
void write_field_csv(std::ostream& out, const Field& field, bool space_time);

/// Columns equation,d,alpha,mild,generalized,random_field.
void write_verdict_csv(std::ostream& out, const std::vector<ExistenceVerdict>& rows);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GreenFunction& g);
GreenFunction green_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TestFunction& phi);
TestFunction test_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NormResult& r);
nlohmann::json to_json(const FubiniReport& r);
nlohmann::json to_json(const ProbeReport& r);
nlohmann::json to_json(const CFTest& r);
nlohmann::json to_json(const QuantileReport& r);
nlohmann::json to_json(const ExistenceVerdict& v);

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::json number(double x);

}  // namespace levy_spde
