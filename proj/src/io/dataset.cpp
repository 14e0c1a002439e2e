#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "raddist/io.hpp"

namespace raddist {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_number(std::string_view field, double& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(value);
}

[[noreturn]] void parse_error(std::string_view label, std::size_t line, const std::string& reason) {
  throw Error(ErrorKind::ParseError, std::string(label) + ":" + std::to_string(line) + ": " + reason);
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "cannot read " + file.string());
  return ss.str();
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create " + file.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + file.string());
}

}  // namespace

std::vector<PointPair> parse_point_lines(std::string_view text, std::string_view label) {
  std::vector<PointPair> points;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 2) {
      parse_error(label, line_no, "expected 2 numbers, found " + std::to_string(fields.size()) + " fields");
    }
    PointPair p;
    if (!parse_number(fields[0], p.a)) parse_error(label, line_no, "invalid number '" + std::string(fields[0]) + "'");
    if (!parse_number(fields[1], p.b)) parse_error(label, line_no, "invalid number '" + std::string(fields[1]) + "'");
    points.push_back(p);
  }
  return points;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_point_lines(const std::vector<PointPair>& points) {
  std::string out;
  for (const PointPair& p : points) {
    out += format_double(p.a);
    out += ' ';
    out += format_double(p.b);
    out += '\n';
  }
  return out;
}

std::string image_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "image%03zu.txt", index + 1);
  return buf;
}

CalibrationDataset load_dataset(const std::filesystem::path& directory) {
  const std::filesystem::path model_file = directory / "model.txt";
  if (!std::filesystem::is_regular_file(model_file)) {
    throw Error(ErrorKind::IoError, "missing " + model_file.string());
  }
  CalibrationDataset data;
  for (const PointPair& p : parse_point_lines(read_file(model_file), model_file.string())) {
    data.model_points.push_back({p.a, p.b});
  }
  for (std::size_t i = 0;; ++i) {
    const std::filesystem::path image = directory / image_file_name(i);
    if (!std::filesystem::is_regular_file(image)) break;
    const auto pairs = parse_point_lines(read_file(image), image.string());
    if (pairs.size() != data.point_count()) {
      throw Error(ErrorKind::CountMismatch, image.string() + ": expected " + std::to_string(data.point_count()) +
                                                " points, got " + std::to_string(pairs.size()));
    }
    std::vector<PixelPoint> obs;
    obs.reserve(pairs.size());
    for (const PointPair& p : pairs) obs.push_back({p.a, p.b});
    data.observations.push_back(std::move(obs));
  }
  validate_dataset(data);
  return data;
}

void write_dataset(const CalibrationDataset& data, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + directory.string() + ": " + ec.message());

  std::vector<PointPair> pairs;
  for (const PlanePoint& p : data.model_points) pairs.push_back({p.x, p.y});
  write_file(directory / "model.txt", format_point_lines(pairs));
  for (std::size_t i = 0; i < data.view_count(); ++i) {
    pairs.clear();
    for (const PixelPoint& p : data.observations[i]) pairs.push_back({p.u, p.v});
    write_file(directory / image_file_name(i), format_point_lines(pairs));
  }
}

IntrinsicParams parse_intrinsics(std::string_view text, std::string_view label) {
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (!values.empty()) parse_error(label, line_no, "unexpected extra line");
    if (fields.size() != 5) {
      parse_error(label, line_no,
                  "expected 5 numbers (alpha gamma u0 beta v0), found " + std::to_string(fields.size()) + " fields");
    }
    for (std::string_view f : fields) {
      double v = 0.0;
      if (!parse_number(f, v)) parse_error(label, line_no, "invalid number '" + std::string(f) + "'");
      values.push_back(v);
    }
  }
  if (values.empty()) throw Error(ErrorKind::ParseError, std::string(label) + ": no intrinsics line");
  return IntrinsicParams(values[0], values[3], values[1], values[2], values[4]);
}

IntrinsicParams read_intrinsics(const std::filesystem::path& file) {
  return parse_intrinsics(read_file(file), file.string());
}

std::string format_intrinsics(const IntrinsicParams& a) {
  return format_double(a.alpha()) + ' ' + format_double(a.gamma()) + ' ' + format_double(a.u0()) + ' ' +
         format_double(a.beta()) + ' ' + format_double(a.v0()) + '\n';
}

void write_intrinsics(const IntrinsicParams& a, const std::filesystem::path& file) {
  write_file(file, format_intrinsics(a));
}

std::vector<int> parse_model_list(std::string_view text) {
  const auto bad = [&](const std::string& why) {
    return Error(ErrorKind::InvalidArgument, "invalid model list '" + std::string(text) + "': " + why);
  };
  const auto parse_id = [&](std::string_view s) {
    int v = -1;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw bad("'" + std::string(s) + "' is not a model id");
    if (v < 0 || v > 9) throw bad("model ids range over 0..9");
    return v;
  };

  std::vector<int> ids;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(',', pos);
    const std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) {
      ids.push_back(parse_id(item));
    } else {
      const int lo = parse_id(item.substr(0, dash));
      const int hi = parse_id(item.substr(dash + 1));
      if (lo > hi) throw bad("empty range '" + std::string(item) + "'");
      for (int v = lo; v <= hi; ++v) ids.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[i] == ids[j]) throw bad("model " + std::to_string(ids[i]) + " is listed twice");
    }
  }
  return ids;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    while (!item.empty() && is_space(item.front())) item.remove_prefix(1);
    while (!item.empty() && is_space(item.back())) item.remove_suffix(1);
    double v = 0.0;
    if (!parse_number(item, v)) {
      throw Error(ErrorKind::InvalidArgument, "invalid number '" + std::string(item) + "' in '" + std::string(text) + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return values;
}

}  // namespace raddist
