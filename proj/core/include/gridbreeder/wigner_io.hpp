#pragma once

#include <filesystem>
#include <string>

#include "gridbreeder/gaussian_state.hpp"

namespace gridbreeder {

/// CSV layout (documented, byte-stable): the header row holds the q axis
/// after one empty cell, each following row starts with its p value, and
/// the body is W(q, p). Numbers are printed with %.17g.
std::string wigner_to_csv(const WignerGrid& grid);

/// JSON layout: {"q_axis": [...], "p_axis": [...],
///               "w": [...row-major, rows indexed by p...]}.
std::string wigner_to_json(const WignerGrid& grid);

void save_wigner_csv(const WignerGrid& grid, const std::filesystem::path& path);
void save_wigner_json(const WignerGrid& grid, const std::filesystem::path& path);

/// %.17g rendering used for every exported number.
std::string format_double(double v);

}  // namespace gridbreeder
