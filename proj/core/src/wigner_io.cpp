#include "gridbreeder/wigner_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace gridbreeder {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string wigner_to_csv(const WignerGrid& grid) {
  std::string out;
  out.reserve(grid.w.size() * 20);
  for (double q : grid.q) {
    out += ',';
    out += format_double(q);
  }
  out += '\n';
  for (std::size_t i = 0; i < grid.p.size(); ++i) {
    out += format_double(grid.p[i]);
    for (std::size_t j = 0; j < grid.q.size(); ++j) {
      out += ',';
      out += format_double(grid.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string wigner_to_json(const WignerGrid& grid) {
  nlohmann::json j;
  j["q_axis"] = grid.q;
  j["p_axis"] = grid.p;
  j["w"] = grid.w;
  return j.dump();
}

namespace {
void write_file(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}
}  // namespace

void save_wigner_csv(const WignerGrid& grid, const std::filesystem::path& path) {
  write_file(wigner_to_csv(grid), path);
}

void save_wigner_json(const WignerGrid& grid, const std::filesystem::path& path) {
  write_file(wigner_to_json(grid), path);
}

}  // namespace gridbreeder
