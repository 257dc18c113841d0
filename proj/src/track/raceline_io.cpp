#include "racestack/track/raceline_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rs::track {
namespace {

std::array<double, 8> parse_row(const std::string& row, int line_no) {
  std::array<double, 8> out{};
  std::size_t begin = 0;
  for (int i = 0; i < 8; ++i) {
    const std::size_t end = row.find(';', begin);
    const std::string field = row.substr(begin, end == std::string::npos ? end : end - begin);
    try {
      out[i] = std::stod(field);
    } catch (const std::exception&) {
      throw TrackError("raceline csv: bad field on line " + std::to_string(line_no));
    }
    if (end == std::string::npos) {
      if (i != 7) throw TrackError("raceline csv: short row on line " + std::to_string(line_no));
      break;
    }
    begin = end + 1;
  }
  return out;
}

}  // namespace

Raceline load_raceline_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TrackError("raceline csv: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("s;x;y;psi;kappa;v;d_left;d_right", 0) != 0)
    throw TrackError("raceline csv: unexpected header in " + path);

  Raceline line;
  std::string row;
  int line_no = 1;
  while (std::getline(in, row)) {
    ++line_no;
    if (row.empty()) continue;
    const auto f = parse_row(row, line_no);
    line.s.push_back(f[0]);
    line.x.push_back(f[1]);
    line.y.push_back(f[2]);
    line.psi.push_back(f[3]);
    line.kappa.push_back(f[4]);
    line.v.push_back(f[5]);
    line.d_left.push_back(f[6]);
    line.d_right.push_back(f[7]);
  }
  if (line.s.size() < 2) throw TrackError("raceline csv: too few waypoints in " + path);
  line.step = line.s[1] - line.s[0];
  line.s_max = static_cast<double>(line.size()) * line.step;
  line.closed = true;
  if (!line.valid()) throw TrackError("raceline csv: invalid raceline in " + path);
  return line;
}

void save_raceline_csv(const Raceline& line, const std::string& path) {
  if (!line.valid()) throw TrackError("raceline csv: refusing to write invalid raceline");
  std::ofstream out(path);
  if (!out) throw TrackError("raceline csv: cannot write " + path);
  out << "s;x;y;psi;kappa;v;d_left;d_right\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < line.size(); ++i) {
    out << line.s[i] << ';' << line.x[i] << ';' << line.y[i] << ';' << line.psi[i] << ';'
        << line.kappa[i] << ';' << line.v[i] << ';' << line.d_left[i] << ';'
        << line.d_right[i] << '\n';
  }
}

}  // namespace rs::track
