#pragma once

#include "talenti/mesh.hpp"
#include "talenti/rearrangement.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace talenti {

// All writers go through a temp-file-plus-rename so partially written
// artifacts never appear under the final name.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::string format_double(double x); // shortest round-trip (%.17g trimmed)

// value,weight rows.
WeightedFunction read_weighted_csv(const std::filesystem::path& path);
// breakpoint,value rows (trailing breakpoint on its own row is the mass).
std::string step_function_csv(const StepFunction& f);

// vertex_index,value rows.
std::vector<double> read_vertex_csv(const std::filesystem::path& path, std::size_t n_vertices);
std::string vertex_csv(const std::vector<double>& values);

// vertex_index,inside(0|1) rows.
std::vector<std::uint8_t> read_mask_csv(const std::filesystem::path& path,
                                        std::size_t n_vertices);

// triangle_index,a11,a12,a22 rows.
std::vector<std::array<double, 3>> read_coeff_csv(const std::filesystem::path& path,
                                                  std::size_t n_triangles);

// rho,u_star,w curve (comparison dumps) and rho,w,w_prime (model solutions).
std::string curve_csv(const std::vector<double>& rho, const std::vector<double>& a,
                      const std::vector<double>& b, const std::string& header);

} // namespace talenti
