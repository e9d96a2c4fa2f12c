#include "pvmincq/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

namespace pvmincq {

LabeledSample generate_moons(std::size_t n_pos, std::size_t n_neg, double noise_sd,
                             std::uint64_t seed, ArcSampling arc) {
  if (n_pos == 0 || n_neg == 0) throw SampleError("both moons need at least one point");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw SampleError("noise_sd must be finite and non-negative");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> arc_dist(0.0, std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);

  auto position = [&](std::size_t i, std::size_t n) {
    if (arc == ArcSampling::uniform) return arc_dist(rng);
    return n == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  const std::size_t m = n_pos + n_neg;
  PointMatrix points(2, static_cast<Eigen::Index>(m));
  std::vector<Label> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool upper = i < n_pos;
    const double t = upper ? position(i, n_pos) : position(i - n_pos, n_neg);
    double x = upper ? std::cos(t) : 1.0 - std::cos(t);
    double y = upper ? std::sin(t) : 0.5 - std::sin(t);
    if (noise_sd > 0.0) {
      x += noise_sd * noise(rng);
      y += noise_sd * noise(rng);
    }
    points(0, static_cast<Eigen::Index>(i)) = x;
    points(1, static_cast<Eigen::Index>(i)) = y;
    labels[i] = upper ? 1 : -1;
  }
  return LabeledSample(std::move(points), std::move(labels));
}

Eigen::VectorXd centroid(const PointMatrix& points) {
  if (points.cols() == 0) throw SampleError("centroid of an empty sample");
  return points.rowwise().mean();
}

PointMatrix apply_shift(const PointMatrix& points, const ShiftSpec& shift) {
  if (const auto* rot = std::get_if<Rotation>(&shift)) {
    if (points.rows() != 2) throw SampleError("rotation is only defined in two dimensions");
    if (!(rot->degrees > 0.0 && rot->degrees <= 360.0))
      throw SampleError("rotation angle must lie in (0, 360] degrees");
    const Eigen::Vector2d center = rot->center ? *rot->center : Eigen::Vector2d(centroid(points));
    const double theta = rot->degrees * std::numbers::pi / 180.0;
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return (r * (points.colwise() - center)).colwise() + center;
  }
  const auto& tr = std::get<Translation>(shift);
  if (tr.offset.size() != points.rows())
    throw SampleError("translation offset dimension does not match the sample");
  if (!tr.offset.allFinite()) throw SampleError("translation offset must be finite");
  return points.colwise() + tr.offset;
}

LabeledSample apply_shift(const LabeledSample& sample, const ShiftSpec& shift) {
  return LabeledSample(apply_shift(sample.points(), shift), sample.labels());
}

UnlabeledSample apply_shift(const UnlabeledSample& sample, const ShiftSpec& shift) {
  return UnlabeledSample(apply_shift(sample.points(), shift));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string render(const PointMatrix& points, const std::vector<Label>* labels) {
  std::string out;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if (r) out += ',';
    out += 'x' + std::to_string(r + 1);
  }
  if (labels) out += ",y";
  out += '\n';
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
      if (r) out += ',';
      append_double(out, points(r, c));
    }
    if (labels) out += (*labels)[static_cast<std::size_t>(c)] > 0 ? ",1" : ",-1";
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open " + path.string() + " for writing", 0);
  f << text;
  if (!f) throw CsvError("failed writing " + path.string(), 0);
}

}  // namespace

AnySample parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool labeled = false;
  bool first = true;
  std::vector<double> coords;
  std::vector<Label> labels;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i)
      numeric = parse_double(fields[i], values[i]);

    if (first) {
      first = false;
      columns = fields.size();
      if (!numeric) {
        labeled = fields.back() == "y";
        if (labeled && columns < 2) throw CsvError("a labeled file needs at least one coordinate", line_no);
        continue;
      }
    }
    if (fields.size() != columns)
      throw CsvError("expected " + std::to_string(columns) + " fields, found " +
                         std::to_string(fields.size()),
                     line_no);
    if (!numeric) throw CsvError("malformed numeric field", line_no);
    for (double v : values)
      if (!std::isfinite(v)) throw CsvError("non-finite value", line_no);

    const std::size_t dim = labeled ? columns - 1 : columns;
    coords.insert(coords.end(), values.begin(), values.begin() + static_cast<std::ptrdiff_t>(dim));
    if (labeled) {
      const double y = values.back();
      if (y != 1.0 && y != -1.0) throw CsvError("labels must be -1 or +1", line_no);
      labels.push_back(y > 0 ? 1 : -1);
    }
  }

  if (coords.empty()) throw CsvError("no data rows", 0);
  const std::size_t dim = labeled ? columns - 1 : columns;
  const auto m = static_cast<Eigen::Index>(coords.size() / dim);
  PointMatrix points = Eigen::Map<const PointMatrix>(coords.data(), static_cast<Eigen::Index>(dim), m);
  if (labeled) return LabeledSample(std::move(points), std::move(labels));
  return UnlabeledSample(std::move(points));
}

AnySample read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open " + path.string(), 0);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str());
}

std::string to_csv(const LabeledSample& sample) { return render(sample.points(), &sample.labels()); }
std::string to_csv(const UnlabeledSample& sample) { return render(sample.points(), nullptr); }

void write_csv(const LabeledSample& sample, const std::filesystem::path& path) {
  write_file(path, to_csv(sample));
}

void write_csv(const UnlabeledSample& sample, const std::filesystem::path& path) {
  write_file(path, to_csv(sample));
}

}  // namespace pvmincq
