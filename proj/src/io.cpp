#include "gravreg/io.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gravreg {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool is_blank_or_comment(const std::string& line) {
  for (char ch : strip_comment(line)) {
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::vector<double> parse_numbers(const std::string& line) {
  std::istringstream ss(strip_comment(line));
  std::vector<double> values;
  double v;
  while (ss >> v) values.push_back(v);
  if (!ss.eof()) {
    ss.clear();
    std::string trailing;
    ss >> trailing;
    if (!trailing.empty()) return {};  // non-numeric token
  }
  return values;
}

std::vector<Vec3> read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Vec3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != 3) {
      throw ParseError(path, line_no, "expected 3 numbers");
    }
    points.emplace_back(v[0], v[1], v[2]);
  }
  return points;
}

std::vector<Vec3> read_ply_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };

  if (!next_line() || line.substr(0, 3) != "ply") {
    throw ParseError(path, line_no, "missing 'ply' magic");
  }

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  bool saw_format = false;

  while (next_line()) {
    std::istringstream ss(line);
    std::string keyword;
    ss >> keyword;
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") {
        throw UnsupportedFormat(path + ": binary PLY is not supported");
      }
      saw_format = true;
    } else if (keyword == "element") {
      Element e;
      ss >> e.name >> e.count;
      if (ss.fail()) throw ParseError(path, line_no, "bad element line");
      elements.push_back(e);
    } else if (keyword == "property") {
      if (elements.empty()) {
        throw ParseError(path, line_no, "property before element");
      }
      std::string type, name;
      ss >> type;
      if (type == "list") {
        if (elements.back().name == "vertex") {
          throw UnsupportedFormat(path + ": list property on vertex element");
        }
        elements.back().properties.push_back("list");
        continue;
      }
      ss >> name;
      if (ss.fail()) throw ParseError(path, line_no, "bad property line");
      elements.back().properties.push_back(name);
    } else if (keyword == "end_header") {
      break;
    } else {
      throw ParseError(path, line_no, "unknown header keyword '" + keyword +
                                          "'");
    }
  }
  if (!saw_format) throw ParseError(path, line_no, "missing format line");

  std::vector<Vec3> points;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      // Skip this element's data lines (list properties make the layout
      // line-based in ASCII PLY, one line per item).
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!next_line()) {
          throw ParseError(path, line_no, "unexpected end of file");
        }
      }
      continue;
    }
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t k = 0; k < e.properties.size(); ++k) {
      if (e.properties[k] == "x") ix = static_cast<int>(k);
      if (e.properties[k] == "y") iy = static_cast<int>(k);
      if (e.properties[k] == "z") iz = static_cast<int>(k);
    }
    if (ix < 0 || iy < 0 || iz < 0) {
      throw ParseError(path, line_no, "vertex element lacks x/y/z");
    }
    points.reserve(e.count);
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line()) {
        throw ParseError(path, line_no, "unexpected end of file");
      }
      const std::vector<double> v = parse_numbers(line);
      if (static_cast<int>(v.size()) <= std::max({ix, iy, iz})) {
        throw ParseError(path, line_no, "short vertex line");
      }
      points.emplace_back(v[ix], v[iy], v[iz]);
    }
  }
  return points;
}

/// Writes via a temporary sibling file and renames into place.
class AtomicWriter {
 public:
  explicit AtomicWriter(const std::string& path)
      : path_(path), tmp_(path + ".tmp"), out_(tmp_) {
    if (!out_) throw IoError("cannot open " + tmp_ + " for writing");
  }

  std::ofstream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + tmp_);
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw IoError("cannot rename " + tmp_ + " to " + path_);
  }

  ~AtomicWriter() {
    if (out_.is_open()) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
};

}  // namespace

std::vector<Vec3> read_cloud(const std::string& path, CloudFormat format) {
  if (!std::filesystem::exists(path)) {
    throw IoError("no such file: " + path);
  }
  if (format == CloudFormat::kAuto) {
    format = std::filesystem::path(path).extension() == ".ply"
                 ? CloudFormat::kPlyAscii
                 : CloudFormat::kXyz;
  }
  return format == CloudFormat::kPlyAscii ? read_ply_ascii(path)
                                          : read_xyz(path);
}

void write_cloud_xyz(const std::string& path,
                     const std::vector<Vec3>& points) {
  AtomicWriter writer(path);
  for (const Vec3& p : points) {
    writer.stream() << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' '
                    << fmt_double(p.z()) << '\n';
  }
  writer.commit();
}

CorrespondenceSet read_correspondences(const std::string& path,
                                       const std::vector<Vec3>* source,
                                       const std::vector<Vec3>* target) {
  std::ifstream in(path);
  if (!in) throw IoError("no such file: " + path);

  CorrespondenceSet c;
  std::string line;
  std::size_t line_no = 0;
  int columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != 2 && v.size() != 6) {
      throw ParseError(path, line_no, "expected 2 or 6 numbers");
    }
    if (columns == 0) {
      columns = static_cast<int>(v.size());
    } else if (columns != static_cast<int>(v.size())) {
      throw ParseError(path, line_no, "inconsistent column count");
    }
    if (columns == 6) {
      c.pairs.push_back({Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    } else {
      if (source == nullptr || target == nullptr) {
        throw ParseError(path, line_no,
                         "index pairs require source and target clouds");
      }
      const auto i = static_cast<std::size_t>(v[0]);
      const auto j = static_cast<std::size_t>(v[1]);
      if (v[0] < 0 || v[1] < 0 || i >= source->size() ||
          j >= target->size()) {
        throw IndexOutOfRange(path + ":" + std::to_string(line_no) +
                              ": index pair out of range");
      }
      c.pairs.push_back({(*source)[i], (*target)[j]});
    }
  }
  return c;
}

void write_correspondences(const std::string& path,
                           const CorrespondenceSet& c) {
  AtomicWriter writer(path);
  for (const Correspondence& pair : c.pairs) {
    writer.stream() << fmt_double(pair.p.x()) << ' ' << fmt_double(pair.p.y())
                    << ' ' << fmt_double(pair.p.z()) << ' '
                    << fmt_double(pair.q.x()) << ' ' << fmt_double(pair.q.y())
                    << ' ' << fmt_double(pair.q.z()) << '\n';
  }
  writer.commit();
}

ResultRecord to_record(const RegistrationResult& result) {
  ResultRecord record;
  record.rotation = result.transform.rotation;
  record.translation = result.transform.translation;
  record.theta_star = result.theta_star;
  record.l_star = result.l_star;
  record.inliers_stage1 = result.inliers_stage1.size();
  record.inliers_stage2 = result.inliers_stage2.size();
  record.inliers_stage3 = result.inliers_stage3.size();
  record.timings = result.timings;
  return record;
}

void write_result(const ResultRecord& record, const std::string& path,
                  bool with_timings) {
  AtomicWriter writer(path);
  std::ofstream& out = writer.stream();
  out << "rotation";
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      out << ' ' << fmt_double(record.rotation(r, col));
    }
  }
  out << '\n';
  out << "translation " << fmt_double(record.translation.x()) << ' '
      << fmt_double(record.translation.y()) << ' '
      << fmt_double(record.translation.z()) << '\n';
  out << "theta_star " << fmt_double(record.theta_star) << '\n';
  out << "l_star " << fmt_double(record.l_star) << '\n';
  out << "inliers_stage1 " << record.inliers_stage1 << '\n';
  out << "inliers_stage2 " << record.inliers_stage2 << '\n';
  out << "inliers_stage3 " << record.inliers_stage3 << '\n';
  if (with_timings && record.timings) {
    out << "stage1_ms " << fmt_double(record.timings->stage1_s * 1e3) << '\n';
    out << "stage2_ms " << fmt_double(record.timings->stage2_s * 1e3) << '\n';
    out << "stage3_ms " << fmt_double(record.timings->stage3_s * 1e3) << '\n';
    out << "total_ms " << fmt_double(record.timings->total_s * 1e3) << '\n';
  }
  writer.commit();
}

namespace {

std::vector<double> require_values(const std::string& path,
                                   std::size_t line_no,
                                   const std::string& rest,
                                   std::size_t count) {
  std::vector<double> v = parse_numbers(rest);
  if (v.size() != count) {
    throw ParseError(path, line_no,
                     "expected " + std::to_string(count) + " values");
  }
  return v;
}

}  // namespace

ResultRecord read_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("no such file: " + path);

  ResultRecord record;
  StageTimings timings;
  bool have_timing = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    std::string rest;
    std::getline(ss, rest);
    if (key == "rotation") {
      const std::vector<double> v = require_values(path, line_no, rest, 9);
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
          record.rotation(r, col) = v[3 * r + col];
        }
      }
    } else if (key == "translation") {
      const std::vector<double> v = require_values(path, line_no, rest, 3);
      record.translation = Vec3(v[0], v[1], v[2]);
    } else if (key == "theta_star") {
      record.theta_star = require_values(path, line_no, rest, 1)[0];
    } else if (key == "l_star") {
      record.l_star = require_values(path, line_no, rest, 1)[0];
    } else if (key == "inliers_stage1") {
      record.inliers_stage1 =
          static_cast<std::size_t>(require_values(path, line_no, rest, 1)[0]);
    } else if (key == "inliers_stage2") {
      record.inliers_stage2 =
          static_cast<std::size_t>(require_values(path, line_no, rest, 1)[0]);
    } else if (key == "inliers_stage3") {
      record.inliers_stage3 =
          static_cast<std::size_t>(require_values(path, line_no, rest, 1)[0]);
    } else if (key == "stage1_ms") {
      timings.stage1_s = require_values(path, line_no, rest, 1)[0] / 1e3;
      have_timing = true;
    } else if (key == "stage2_ms") {
      timings.stage2_s = require_values(path, line_no, rest, 1)[0] / 1e3;
      have_timing = true;
    } else if (key == "stage3_ms") {
      timings.stage3_s = require_values(path, line_no, rest, 1)[0] / 1e3;
      have_timing = true;
    } else if (key == "total_ms") {
      timings.total_s = require_values(path, line_no, rest, 1)[0] / 1e3;
      have_timing = true;
    } else {
      throw ParseError(path, line_no, "unknown key '" + key + "'");
    }
  }
  if (have_timing) record.timings = timings;
  return record;
}

void write_truth(const std::string& path, const RigidTransform& truth) {
  AtomicWriter writer(path);
  std::ofstream& out = writer.stream();
  out << "rotation";
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      out << ' ' << fmt_double(truth.rotation(r, col));
    }
  }
  out << '\n';
  out << "translation " << fmt_double(truth.translation.x()) << ' '
      << fmt_double(truth.translation.y()) << ' '
      << fmt_double(truth.translation.z()) << '\n';
  writer.commit();
}

RigidTransform read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("no such file: " + path);
  RigidTransform truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    std::string rest;
    std::getline(ss, rest);
    if (key == "rotation") {
      const std::vector<double> v = require_values(path, line_no, rest, 9);
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
          truth.rotation(r, col) = v[3 * r + col];
        }
      }
    } else if (key == "translation") {
      const std::vector<double> v = require_values(path, line_no, rest, 3);
      truth.translation = Vec3(v[0], v[1], v[2]);
    }
    // other keys tolerated: a result file is a valid truth file
  }
  return truth;
}

}  // namespace gravreg
