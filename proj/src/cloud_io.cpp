#include "projseg/cloud_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string_view>

#include "projseg/error.hpp"

namespace projseg {

void PointCloud::reserve(std::size_t n) {
  x_.reserve(n);
  y_.reserve(n);
  z_.reserve(n);
  intensity_.reserve(n);
  rgb_.reserve(n);
}

void PointCloud::add(const Point3& p, const PointAttributes& attr) {
  if (labels_) throw DataError("cannot add points to a labeled cloud");
  x_.push_back(p.x);
  y_.push_back(p.y);
  z_.push_back(p.z);
  intensity_.push_back(attr.intensity);
  rgb_.push_back(attr.rgb);
}

void PointCloud::set_labels(std::vector<SemanticLabel> labels) {
  if (labels.size() != size()) {
    throw DataError("label count " + std::to_string(labels.size()) + " does not match point count " +
                    std::to_string(size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > kMaxLabel) {
      throw DataError("label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                      " is outside [0,8]");
    }
  }
  labels_ = std::move(labels);
}

namespace {

// Calls fn(line_number, line) for every line. Only the final newline of the
// stream may leave an empty trailing segment; any other empty line is an error.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError("read failure");
  std::string_view rest(text);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      throw ParseError(line_no, "empty line");
    }
    fn(line_no, line);
  }
}

template <std::size_t N>
std::size_t split_fields(std::string_view line, std::array<std::string_view, N>& out) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    pos = line.find_first_not_of(" \t", pos);
    if (pos == std::string_view::npos) break;
    const auto end = std::min(line.find_first_of(" \t", pos), line.size());
    if (count == N) return N + 1;
    out[count++] = line.substr(pos, end - pos);
    pos = end;
  }
  return count;
}

double to_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(line_no, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<SemanticLabel> parse_label_values(std::istream& in) {
  std::vector<SemanticLabel> labels;
  for_each_line(in, [&](std::size_t line_no, std::string_view line) {
    std::array<std::string_view, 1> f;
    if (split_fields(line, f) != 1) throw ParseError(line_no, "expected exactly one label");
    long v = 0;
    const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), v);
    if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) {
      throw ParseError(line_no, "label is not an integer: '" + std::string(f[0]) + "'");
    }
    if (v < 0 || v > kMaxLabel) {
      throw ParseError(line_no, "label " + std::to_string(v) + " outside [0,8]");
    }
    labels.push_back(static_cast<SemanticLabel>(v));
  });
  return labels;
}

}  // namespace

PointCloud parse_points(std::istream& in) {
  PointCloud cloud;
  for_each_line(in, [&](std::size_t line_no, std::string_view line) {
    std::array<std::string_view, 7> f;
    if (split_fields(line, f) != 7) {
      throw ParseError(line_no, "expected 7 fields: x y z intensity r g b");
    }
    std::array<double, 7> v;
    for (std::size_t k = 0; k < 7; ++k) v[k] = to_double(f[k], line_no);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!std::isfinite(v[k])) throw ParseError(line_no, "non-finite value");
    }
    PointAttributes attr;
    attr.intensity = static_cast<float>(v[3]);
    for (std::size_t c = 0; c < 3; ++c) {
      if (!(v[4 + c] >= 0.0 && v[4 + c] <= 255.0)) {
        throw ParseError(line_no, "color channel outside [0,255]");
      }
      attr.rgb[c] = static_cast<float>(v[4 + c]);
    }
    cloud.add({v[0], v[1], v[2]}, attr);
  });
  return cloud;
}

PointCloud parse_labels(std::istream& in, PointCloud cloud) {
  cloud.clear_labels();
  cloud.set_labels(parse_label_values(in));
  return cloud;
}

void write_predictions(std::span<const SemanticLabel> labels, std::ostream& out) {
  std::string buf;
  buf.reserve(labels.size() * 2);
  for (const auto l : labels) {
    buf += std::to_string(static_cast<int>(l));
    buf += '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failure");
}

std::pair<Point3, Point3> bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw DataError("bounding box of an empty cloud");
  const auto mm = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return std::pair{*lo, *hi};
  };
  const auto [x0, x1] = mm(cloud.xs());
  const auto [y0, y1] = mm(cloud.ys());
  const auto [z0, z1] = mm(cloud.zs());
  return {{x0, y0, z0}, {x1, y1, z1}};
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

template <typename Fn>
auto with_path_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.reason(), path);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace

PointCloud load_points(const std::string& path) {
  return with_path_context(path, [&] {
    auto in = open_in(path);
    return parse_points(in);
  });
}

std::vector<SemanticLabel> load_labels(const std::string& path, std::size_t expected_count) {
  return with_path_context(path, [&] {
    auto in = open_in(path);
    auto labels = parse_label_values(in);
    if (labels.size() != expected_count) {
      throw DataError("label count " + std::to_string(labels.size()) + " does not match point count " +
                      std::to_string(expected_count));
    }
    return labels;
  });
}

std::vector<SemanticLabel> load_label_file(const std::string& path) {
  return with_path_context(path, [&] {
    auto in = open_in(path);
    return parse_label_values(in);
  });
}

PointCloud load_points_with_labels(const std::string& points_path, const std::string& labels_path) {
  PointCloud cloud = load_points(points_path);
  auto labels = load_labels(labels_path, cloud.size());
  cloud.set_labels(std::move(labels));
  return cloud;
}

void save_predictions(std::span<const SemanticLabel> labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_predictions(labels, out);
  out.close();
  if (!out) throw DataError("write failure on " + path);
}

}  // namespace projseg
