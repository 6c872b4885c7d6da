#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "blstab/grid.hpp"

namespace blstab {

// grid functions serialize as Y,Re,Im rows
inline void write_grid_function_csv(const std::filesystem::path& path,
                                    const HalfLineGrid& grid,
                                    const std::vector<std::pair<std::string, CVec>>& cols) {
  std::ofstream out(path);
  out.precision(17);
  out << "Y";
  for (const auto& [name, v] : cols) out << ",Re_" << name << ",Im_" << name;
  out << "\n";
  for (int j = 0; j < grid.size(); ++j) {
    out << grid.nodes()[j];
    for (const auto& [name, v] : cols) out << "," << v[j].real() << "," << v[j].imag();
    out << "\n";
  }
}

} // namespace blstab
